"""JSON scenario documents and their validation.

A scenario looks like::

    {
      "seed": 7,
      "duration_s": 300,
      "fading": true,
      "cell": {"center": [0, 0], "circumradius": 600},
      "networks": [
        {"id": "wlan_a", "technology": "wlan", "center": [-150, 0],
         "coverage_radius_m": 260, "latency_ms": 20, "lambda": 1.0,
         "path_loss": {"ref_power_db": 0, "ref_distance_m": 50, "exponent": 1.5}}
      ],
      "path": {"waypoints": [[-300, 0], [0, 80], [300, 0]], "speed_mps": 2,
               "fillet_radii_m": [150]},
      "policy": {"dwell_time_s": 1, "alpha": 0.05, "sample_window": 20,
                 "decision_period_s": 0.1},
      "weights": {"parameters": ["rss", "latency", "coverage"],
                  "priorities": [{"service_level": 3,
                                  "codes": {"rss": 4, "latency": 3, "coverage": 2}}]},
      "active_services": [3],
      "report": {"band_db": [-5, 5], "band_floor": 0.5, "ping_pong_window_s": 10}
    }

``weights`` may instead carry an explicit ``"matrix"`` (rows of floats)
with optional ``"services"`` labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .. import cost_engine
from ..cost_engine import NetworkProfile, PriorityEncoding, WeightMatrix
from ..errors import ScenarioError
from ..fading import PathLossModel
from .engine import HandoverPolicy, RadioNetwork, Simulation
from .geometry import HexCell, MobilePath


@dataclass(frozen=True)
class Report:
    band_db: tuple[float, float] = (-5.0, 5.0)
    band_floor: float = 0.0
    ping_pong_window_s: float = 10.0


@dataclass(frozen=True)
class Scenario:
    cell: HexCell
    networks: tuple[RadioNetwork, ...]
    path: MobilePath
    policy: HandoverPolicy
    weights: WeightMatrix
    duration_s: float
    seed: int = 0
    active_services: tuple | None = None
    fading: bool = True
    clamp_path: bool = False
    report: Report = field(default_factory=Report)
    name: str = ""

    def violations(self) -> list[str]:
        out = []
        if not self.networks:
            out.append("scenario has no networks")
        ids = [n.id for n in self.networks]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            out.append(f"duplicate network ids: {dupes}")
        for n in self.networks:
            if not n.lam > 0:
                out.append(f"network {n.id}: lambda must be positive")
            if not self.cell.disk_intersects(n.profile.coverage_center, n.profile.coverage_radius_m):
                out.append(f"network {n.id}: coverage disk does not intersect the cell")
        out.extend(str(v) for v in cost_engine.validate_weights(self.weights))
        if self.active_services is not None:
            for s in self.active_services:
                if s not in self.weights.services:
                    out.append(f"active service {s!r} has no weight row")
        out.extend(self.policy.violations())
        for i, wp in enumerate(self.path.waypoints):
            if not self.cell.contains(wp):
                out.append(f"path waypoint {i} {wp} lies outside the cell")
        if not self.duration_s > 0:
            out.append("duration_s must be positive")
        elif self.duration_s > self.path.duration * (1 + 1e-9) and not self.clamp_path:
            out.append(f"duration_s {self.duration_s} exceeds path travel time {self.path.duration:.6g}")
        if not 0 <= int(self.seed) < 2**64:
            out.append("seed must be a 64-bit unsigned integer")
        return out

    def validate(self) -> None:
        v = self.violations()
        if v:
            raise ScenarioError(v)

    def with_overrides(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def simulation(self, run_id: int = 0) -> Simulation:
        self.validate()
        return Simulation(
            self.cell, list(self.networks), self.path, self.policy, self.weights,
            seed=self.seed, active_services=self.active_services,
            fading_enabled=self.fading, run_id=run_id, clamp_path=self.clamp_path,
        )

    def run(self, run_id: int = 0):
        return self.simulation(run_id).run(self.duration_s)


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def build(self, what: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (KeyError, TypeError, ValueError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            self.errors.append(f"{what}: {msg}")
            return None


def _network(doc: dict) -> RadioNetwork:
    pl = doc.get("path_loss", {})
    profile = NetworkProfile(
        id=str(doc["id"]),
        technology=str(doc.get("technology", "generic")),
        rss_dbm=float(pl.get("ref_power_db", 0.0)),
        latency_ms=float(doc["latency_ms"]),
        coverage_radius_m=float(doc["coverage_radius_m"]),
        bandwidth_kbps=float(doc["bandwidth_kbps"]) if "bandwidth_kbps" in doc else None,
        coverage_center=tuple(float(c) for c in doc.get("center", (0.0, 0.0))),
    )
    return RadioNetwork(
        profile=profile,
        lam=float(doc.get("lambda", 1.0)),
        path_loss=PathLossModel(
            ref_power_db=float(pl.get("ref_power_db", 0.0)),
            ref_distance_m=float(pl.get("ref_distance_m", 1.0)),
            exponent=float(pl.get("exponent", 2.0)),
        ),
    )


def _weights(doc: dict) -> WeightMatrix:
    params = tuple(doc.get("parameters", cost_engine.DEFAULT_PARAMETERS))
    if "matrix" in doc:
        return WeightMatrix(np.asarray(doc["matrix"], dtype=float), params, tuple(doc.get("services", ())))
    encs = [PriorityEncoding(int(p.get("service_level", 3)), dict(p["codes"])) for p in doc["priorities"]]
    return cost_engine.weight_matrix_from_priorities(encs, params)


def scenario_from_dict(doc: dict[str, Any], name: str = "") -> Scenario:
    """Build and validate a scenario, reporting every problem found."""
    c = _Collector()
    cell_doc = doc.get("cell", {})
    cell = c.build("cell", HexCell, tuple(cell_doc.get("center", (0.0, 0.0))),
                   float(cell_doc.get("circumradius", 500.0)))
    nets_doc = doc.get("networks", [])
    networks = []
    for i, nd in enumerate(nets_doc):
        n = c.build(f"networks[{i}]", _network, nd)
        if n is not None:
            networks.append(n)
    if not nets_doc:
        c.errors.append("scenario has no networks")
    pd = doc.get("path")
    path = None
    if pd is None:
        c.errors.append("path: missing")
    else:
        path = c.build("path", lambda: MobilePath(
            tuple(tuple(p) for p in pd["waypoints"]), float(pd["speed_mps"]),
            tuple(pd.get("fillet_radii_m", ()))))
    policy = c.build("policy", lambda: HandoverPolicy(**doc.get("policy", {})))
    weights = c.build("weights", _weights, doc.get("weights", {"priorities": [{"codes": dict(
        cost_engine.DEFAULT_PARAMETER_CODES)}]}))
    rep = doc.get("report", {})
    report = c.build("report", lambda: Report(tuple(float(v) for v in rep.get("band_db", (-5.0, 5.0))),
                                              float(rep.get("band_floor", 0.0)),
                                              float(rep.get("ping_pong_window_s", 10.0))))
    duration = doc.get("duration_s")
    if duration is None:
        c.errors.append("duration_s: missing")
    active = doc.get("active_services")
    if None in (cell, path, policy, weights, report, duration):
        raise ScenarioError(c.errors or ["scenario is incomplete"])
    scen = Scenario(
        cell=cell,
        networks=tuple(networks),
        path=path,
        policy=policy,
        weights=weights,
        duration_s=float(duration),
        seed=int(doc.get("seed", 0)),
        active_services=tuple(active) if active is not None else None,
        fading=bool(doc.get("fading", True)),
        clamp_path=bool(doc.get("clamp_path", False)),
        report=report,
        name=name or str(doc.get("name", "")),
    )
    errors = c.errors + [v for v in scen.violations() if v not in c.errors]
    if errors:
        raise ScenarioError(errors)
    return scen


def load_scenario(path) -> Scenario:
    """Read a JSON scenario file. ``OSError`` propagates for I/O failures."""
    p = Path(path)
    with p.open(encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError([f"{p}: invalid JSON: {exc}"]) from None
    if not isinstance(doc, dict):
        raise ScenarioError([f"{p}: top level must be an object"])
    return scenario_from_dict(doc, name=p.stem)
