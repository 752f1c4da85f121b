"""Priority weights, cost normalization and the network cost function.

The cost of network ``n`` is ``Z_n = sum_s sum_i w[s, i] * K_n[s, i]``
where ``w`` is a row-stochastic matrix of user-service priority weights
and ``K_n`` holds min-max normalized per-parameter costs in ``[0, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError

ROW_SUM_TOL = 1e-9
TIE_DECIMALS = 12

# Parameter codes: rss dominates latency, which dominates coverage.
DEFAULT_PARAMETER_CODES = {"rss": 4, "latency": 3, "coverage": 2}
DEFAULT_PARAMETERS = ("rss", "latency", "coverage")

SERVICE_LEVELS = {1: "below average", 2: "average", 3: "above average"}


class Direction(Enum):
    BENEFIT = "benefit"
    COST = "cost"


DEFAULT_DIRECTIONS = {
    "rss": Direction.BENEFIT,
    "latency": Direction.COST,
    "coverage": Direction.BENEFIT,
    "bandwidth": Direction.BENEFIT,
}


@dataclass(frozen=True)
class NetworkProfile:
    id: str
    technology: str
    rss_dbm: float
    latency_ms: float
    coverage_radius_m: float
    bandwidth_kbps: float | None = None
    coverage_center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not self.latency_ms > 0:
            raise ValueError(f"network {self.id}: latency_ms must be positive")
        if not self.coverage_radius_m > 0:
            raise ValueError(f"network {self.id}: coverage_radius_m must be positive")

    @property
    def raw_metrics(self) -> dict[str, float]:
        m = {"rss": self.rss_dbm, "latency": self.latency_ms, "coverage": self.coverage_radius_m}
        if self.bandwidth_kbps is not None:
            m["bandwidth"] = self.bandwidth_kbps
        return m


@dataclass(frozen=True)
class WeightMatrix:
    """Row-stochastic ``(services, parameters)`` weight matrix."""

    weights: np.ndarray
    parameters: tuple[str, ...] = DEFAULT_PARAMETERS
    services: tuple = ()

    def __post_init__(self) -> None:
        w = np.atleast_2d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if w.shape[1] != len(self.parameters):
            raise DimensionError(
                f"weight matrix has {w.shape[1]} columns for {len(self.parameters)} parameters")
        services = tuple(self.services) or tuple(range(1, w.shape[0] + 1))
        if len(services) != w.shape[0]:
            raise DimensionError(f"{len(services)} service labels for {w.shape[0]} rows")
        object.__setattr__(self, "services", services)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    @property
    def k(self) -> int:
        return self.weights.shape[1]

    def rows_for(self, active_services: Iterable | None) -> np.ndarray:
        if active_services is None:
            return np.arange(self.m)
        idx = []
        for s in active_services:
            if s not in self.services:
                raise KeyError(f"unknown service {s!r}; known: {list(self.services)}")
            idx.append(self.services.index(s))
        return np.asarray(sorted(set(idx)), dtype=int)


@dataclass(frozen=True)
class Violation:
    row: int
    column: int | None
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class CostVector:
    """Normalized costs of one network; 1-D rows broadcast over services."""

    network_id: str
    costs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.costs, dtype=float)
        if np.any(c < 0) or np.any(c > 1):
            raise ValueError(f"costs for {self.network_id} must lie in [0, 1]")
        object.__setattr__(self, "costs", c)


@dataclass(frozen=True)
class PriorityEncoding:
    service_level: int = 3
    parameter_codes: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_PARAMETER_CODES))

    def __post_init__(self) -> None:
        if self.service_level not in SERVICE_LEVELS:
            raise ValueError(f"service level must be one of {sorted(SERVICE_LEVELS)}")
        for name, code in self.parameter_codes.items():
            if int(code) != code or code < 0:
                raise ValueError(f"code for {name!r} must be a nonnegative integer, got {code!r}")


def validate_weights(w: WeightMatrix | np.ndarray) -> list[Violation]:
    """Every row off unit sum by more than 1e-9 and every entry outside (0, 1).

    An empty list means the matrix is a valid stochastic weight matrix.
    """
    arr = w.weights if isinstance(w, WeightMatrix) else np.atleast_2d(np.asarray(w, dtype=float))
    out = []
    for s, row in enumerate(arr):
        for i, v in enumerate(row):
            if not 0.0 < v < 1.0:
                out.append(Violation(s, i, f"w[{s},{i}] = {v!r} is outside (0, 1)"))
        total = float(np.sum(row))
        if abs(total - 1.0) > ROW_SUM_TOL:
            out.append(Violation(s, None, f"row {s} sums to {total!r}, not 1"))
    return out


def weights_from_priority(enc: PriorityEncoding, parameters: Sequence[str] | None = None) -> np.ndarray:
    """Normalize integer codes into one stochastic weight row."""
    params = tuple(parameters) if parameters is not None else tuple(enc.parameter_codes)
    try:
        codes = np.array([enc.parameter_codes[p] for p in params], dtype=float)
    except KeyError as exc:
        raise KeyError(f"no priority code for parameter {exc.args[0]!r}") from None
    total = codes.sum()
    if total <= 0:
        raise ValueError("at least one priority code must be positive")
    return codes / total


def weight_matrix_from_priorities(encodings: Sequence[PriorityEncoding],
                                  parameters: Sequence[str] = DEFAULT_PARAMETERS) -> WeightMatrix:
    """One row per encoding, labelled by its service level."""
    rows = [weights_from_priority(e, parameters) for e in encodings]
    return WeightMatrix(np.vstack(rows), tuple(parameters), tuple(e.service_level for e in encodings))


def normalize_costs(
    candidates: Sequence[NetworkProfile],
    parameters: Sequence[str] = DEFAULT_PARAMETERS,
    directions: Mapping[str, Direction] | None = None,
) -> list[CostVector]:
    """Min-max costs per parameter across the candidate set.

    Benefit parameters map the best (largest) value to 0, cost parameters
    map the smallest to 0. A parameter on which all candidates tie is
    neutral at 0.5.
    """
    if not candidates:
        raise ValueError("need at least one candidate network")
    directions = {**DEFAULT_DIRECTIONS, **(directions or {})}
    raw = np.empty((len(candidates), len(parameters)))
    for r, net in enumerate(candidates):
        metrics = net.raw_metrics
        for c, p in enumerate(parameters):
            if p not in metrics or metrics[p] is None:
                raise KeyError(f"network {net.id!r} is missing metric {p!r}")
            raw[r, c] = metrics[p]
    k = np.full_like(raw, 0.5)
    for c, p in enumerate(parameters):
        col = raw[:, c]
        lo, hi = col.min(), col.max()
        if hi == lo:
            continue
        if directions[p] is Direction.BENEFIT:
            k[:, c] = (hi - col) / (hi - lo)
        else:
            k[:, c] = (col - lo) / (hi - lo)
    return [CostVector(net.id, np.clip(k[r], 0.0, 1.0)) for r, net in enumerate(candidates)]


def total_cost(w: WeightMatrix, k: CostVector | np.ndarray, active_services: Iterable | None = None) -> float:
    """``sum_s sum_i w[s, i] * K[s, i]`` over the active service rows."""
    costs = k.costs if isinstance(k, CostVector) else np.asarray(k, dtype=float)
    rows = w.rows_for(active_services)
    if costs.ndim == 1:
        if costs.shape[0] != w.k:
            raise DimensionError(f"{costs.shape[0]} costs for {w.k} parameters")
        return float(np.sum(w.weights[rows] @ costs))
    if costs.shape != w.weights.shape:
        raise DimensionError(f"cost matrix shape {costs.shape} != weight shape {w.weights.shape}")
    return float(np.sum(w.weights[rows] * costs[rows]))


def rank_networks(
    candidates: Sequence[NetworkProfile],
    w: WeightMatrix,
    active_services: Iterable | None = None,
    acceptance: Mapping[str, bool] | None = None,
    serving: str | None = None,
    directions: Mapping[str, Direction] | None = None,
) -> list[tuple[str, float]]:
    """Accepted networks sorted by ascending cost.

    Costs are normalized over all candidates before the acceptance
    filter drops networks. Costs equal to 12 decimals tie; ties go to
    ``serving`` first, then to the lexicographically smaller id. An empty
    list means no admissible network.
    """
    if not candidates:
        return []
    return rank_costs(cost_table(candidates, w, active_services, directions), acceptance, serving)


def rank_costs(z: Mapping[str, float], acceptance: Mapping[str, bool] | None = None,
               serving: str | None = None) -> list[tuple[str, float]]:
    """Order precomputed costs with the acceptance filter and tie rule of :func:`rank_networks`."""
    scored = [(nid, zv) for nid, zv in z.items()
              if acceptance is None or acceptance.get(nid, False)]
    # rounding keeps float noise from overriding the tie rule
    scored.sort(key=lambda item: (round(item[1], TIE_DECIMALS), item[0] != serving, item[0]))
    return scored


def cost_table(candidates: Sequence[NetworkProfile], w: WeightMatrix,
               active_services: Iterable | None = None,
               directions: Mapping[str, Direction] | None = None) -> dict[str, float]:
    """``Z`` for every candidate, unfiltered."""
    active = list(active_services) if active_services is not None else None
    return {cv.network_id: total_cost(w, cv, active)
            for cv in normalize_costs(candidates, w.parameters, directions)}
