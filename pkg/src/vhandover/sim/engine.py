"""Discrete-time handover simulation.

Every decision epoch the terminal moves, each in-range network yields a
window of received amplitudes, the window is summarized and tested
against the ``alpha`` acceptance threshold, and accepted networks are
ranked by cost. A non-serving network must stay top-ranked for the
dwell time before the terminal hands over to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .. import cost_engine, estimator, fading
from ..cost_engine import NetworkProfile, WeightMatrix
from .geometry import HexCell, MobilePath

DWELL_EPS = 1e-9


@dataclass(frozen=True)
class HandoverPolicy:
    dwell_time_s: float = 1.0
    alpha: float = estimator.DEFAULT_ALPHA
    sample_window: int = 20
    decision_period_s: float = 0.1

    def violations(self) -> list[str]:
        out = []
        if not self.dwell_time_s >= 0:
            out.append(f"policy.dwell_time_s must be >= 0, got {self.dwell_time_s!r}")
        if not 0 < self.alpha < 1:
            out.append(f"policy.alpha must lie in (0, 1), got {self.alpha!r}")
        if int(self.sample_window) != self.sample_window or self.sample_window < 1:
            out.append(f"policy.sample_window must be a positive integer, got {self.sample_window!r}")
        if not self.decision_period_s > 0:
            out.append(f"policy.decision_period_s must be positive, got {self.decision_period_s!r}")
        return out


@dataclass(frozen=True)
class RadioNetwork:
    """A candidate network plus its radio channel parameters."""

    profile: NetworkProfile
    lam: float = 1.0
    path_loss: fading.PathLossModel = field(default_factory=fading.PathLossModel)

    @property
    def id(self) -> str:
        return self.profile.id


@dataclass(frozen=True)
class HandoverEvent:
    time_s: float
    from_network: str | None
    to_network: str
    rss_db_at_decision: float
    z_values: Mapping[str, float]


@dataclass(frozen=True)
class TraceRecord:
    time_s: float
    position: tuple[float, float]
    serving_network: str | None
    rss_db: float
    z_per_network: Mapping[str, float]
    accepted: tuple[str, ...] = ()


@dataclass(frozen=True)
class SimState:
    t: float = 0.0
    serving: str | None = None
    candidate: str | None = None
    candidate_since: float = 0.0
    started: bool = False


@dataclass(frozen=True)
class Observation:
    """What the terminal measured from one network in one epoch."""

    network_id: str
    summary: estimator.EstimateSummary
    accepted: bool
    level_db: float  # window-mean level estimate, feeds the cost
    instant_db: float  # last sample of the window, goes to the trace


class Simulation:
    """Owns the per-network channels of one seeded run."""

    def __init__(
        self,
        cell: HexCell,
        networks: list[RadioNetwork],
        path: MobilePath,
        policy: HandoverPolicy,
        weights: WeightMatrix,
        seed: int = 0,
        active_services=None,
        fading_enabled: bool = True,
        run_id: int = 0,
        clamp_path: bool = False,
    ):
        self.cell = cell
        self.networks = list(networks)
        self.path = path
        self.policy = policy
        self.weights = weights
        self.seed = int(seed)
        self.active_services = list(active_services) if active_services is not None else None
        self.fading_enabled = fading_enabled
        self.clamp_path = clamp_path
        self.channels = {
            n.id: fading.RayleighChannel(n.lam, self.seed, fading.stream_key(n.id, run_id))
            for n in self.networks
        }

    @property
    def network_ids(self) -> list[str]:
        return [n.id for n in self.networks]

    def observe(self, net: RadioNetwork, position, t: float) -> Observation | None:
        center = net.profile.coverage_center
        d = math.hypot(position[0] - center[0], position[1] - center[1])
        if d > net.profile.coverage_radius_m:
            return None
        # Log-distance model is not used inside its reference distance.
        d = max(d, net.path_loss.ref_distance_m)
        channel = self.channels[net.id]
        n = self.policy.sample_window
        xs = channel.draw(n) if self.fading_enabled else np.full(n, channel.mean_amplitude)
        gain = net.path_loss.amplitude_gain(d)
        summary = estimator.summarize(xs * gain)
        c = estimator.threshold_for_alpha(net.lam, self.policy.alpha)
        mean_level = net.path_loss.mean_level_db(d)
        window_mean = float(np.mean(xs))
        level = mean_level + float(fading.fading_db(window_mean, net.lam)) if window_mean > 0 else -math.inf
        inst = fading.RssSample(t, float(xs[-1]), float(fading.fading_db(xs[-1], net.lam)), mean_level, gain)
        return Observation(net.id, summary, estimator.accept_signal(summary, c), level, inst.level_db)

    def decide(self, state: SimState) -> tuple[SimState, TraceRecord, HandoverEvent | None]:
        """Measure, rank and apply the dwell rule at ``state.t``."""
        t = state.t
        pos = self.path.position_at(t, clamp=self.clamp_path)
        obs = {}
        for net in self.networks:
            o = self.observe(net, pos, t)
            if o is not None:
                obs[net.id] = o

        z = {nid: math.nan for nid in self.network_ids}
        ranked: list[tuple[str, float]] = []
        if obs:
            profiles = [replace(n.profile, rss_dbm=obs[n.id].level_db) for n in self.networks if n.id in obs]
            profiles = [p for p in profiles if math.isfinite(p.rss_dbm)]
            if profiles:
                table = cost_engine.cost_table(profiles, self.weights, self.active_services)
                z.update(table)
                acceptance = {nid: o.accepted for nid, o in obs.items()}
                ranked = cost_engine.rank_costs(table, acceptance, serving=state.serving)
        accepted = tuple(nid for nid, _ in ranked)
        top = ranked[0][0] if ranked else None

        serving = state.serving if state.serving in accepted else None
        candidate, since = state.candidate, state.candidate_since
        event = None
        if not state.started:
            if top is not None:
                event = HandoverEvent(t, None, top, obs[top].instant_db, dict(z))
                serving = top
            candidate = None
        elif top is None or top == serving:
            candidate = None
        else:
            if candidate != top:
                candidate, since = top, t
            if t - since >= self.policy.dwell_time_s - DWELL_EPS:
                event = HandoverEvent(t, serving, top, obs[top].instant_db, dict(z))
                serving, candidate = top, None

        rss = obs[serving].instant_db if serving is not None else math.nan
        record = TraceRecord(t, pos, serving, rss, z, accepted)
        new_state = SimState(t, serving, candidate, since, True)
        return new_state, record, event

    def step(self, state: SimState, dt: float) -> tuple[SimState, TraceRecord, HandoverEvent | None]:
        """Advance by ``dt`` seconds, then take one decision."""
        if not 0 < dt <= self.policy.decision_period_s + 1e-12:
            raise ValueError(f"dt must lie in (0, decision_period_s], got {dt!r}")
        return self.decide(replace(state, t=state.t + dt))

    def run(self, duration_s: float) -> tuple[list[TraceRecord], list[HandoverEvent]]:
        period = self.policy.decision_period_s
        epochs = int(math.floor(duration_s / period + 1e-9))
        trace, events = [], []
        state, rec, ev = self.decide(SimState())
        trace.append(rec)
        if ev:
            events.append(ev)
        for k in range(1, epochs + 1):
            # absolute epoch times avoid accumulated drift
            state, rec, ev = self.decide(replace(state, t=k * period))
            trace.append(rec)
            if ev:
                events.append(ev)
        return trace, events


def ping_pong_count(events, window_s: float) -> int:
    """Count A->B->A pairs of consecutive handovers completed within ``window_s``."""
    if not window_s > 0:
        raise ValueError("window_s must be positive")
    count = 0
    for first, second in zip(events, events[1:]):
        if first.from_network is None or second.from_network is None:
            continue
        if (second.from_network == first.to_network and second.to_network == first.from_network
                and second.time_s - first.time_s <= window_s):
            count += 1
    return count


def band_occupancy(trace, band: tuple[float, float]) -> float:
    """Fraction of served epochs whose ``rss_db`` lies in the closed band."""
    lo, hi = band
    served = [r.rss_db for r in trace if r.serving_network is not None and math.isfinite(r.rss_db)]
    if not served:
        return 0.0
    return sum(lo <= v <= hi for v in served) / len(served)
