"""Hexagonal cell and curved, arc-length parameterized mobile paths."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

Point = tuple[float, float]


def _pt(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2-D point, got {p!r}")
    return arr


@dataclass(frozen=True)
class HexCell:
    """Flat-topped regular hexagon given by its center and circumradius."""

    center: Point = (0.0, 0.0)
    circumradius: float = 500.0
    technologies: tuple = ()

    def __post_init__(self) -> None:
        if not self.circumradius > 0:
            raise ValueError("circumradius must be positive")

    @property
    def vertices(self) -> np.ndarray:
        ang = np.deg2rad(60.0 * np.arange(6))
        c = _pt(self.center)
        return c + self.circumradius * np.column_stack([np.cos(ang), np.sin(ang)])

    def contains(self, p, tol: float = 1e-9) -> bool:
        v = self.vertices
        q = _pt(p)
        for i in range(6):
            a, b = v[i], v[(i + 1) % 6]
            # counter-clockwise vertices: inside is to the left of every edge
            if (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) < -tol * self.circumradius:
                return False
        return True

    def distance_to(self, p) -> float:
        """Euclidean distance from ``p`` to the hexagon (0 inside)."""
        if self.contains(p):
            return 0.0
        q = _pt(p)
        v = self.vertices
        best = math.inf
        for i in range(6):
            a, b = v[i], v[(i + 1) % 6]
            ab = b - a
            t = min(1.0, max(0.0, float(np.dot(q - a, ab) / np.dot(ab, ab))))
            best = min(best, float(np.linalg.norm(q - (a + t * ab))))
        return best

    def disk_intersects(self, center, radius: float) -> bool:
        return self.distance_to(center) <= radius


@dataclass(frozen=True)
class _Line:
    start: np.ndarray
    end: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def at(self, s: float) -> np.ndarray:
        L = self.length
        return self.start + (self.end - self.start) * (s / L if L > 0 else 0.0)


@dataclass(frozen=True)
class _Arc:
    center: np.ndarray
    radius: float
    start_angle: float
    sweep: float  # signed, radians

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    def at(self, s: float) -> np.ndarray:
        a = self.start_angle + math.copysign(s / self.radius, self.sweep)
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])


@dataclass(frozen=True)
class MobilePath:
    """Polyline through ``waypoints`` with each interior corner rounded.

    ``fillet_radii`` gives the circular-arc radius (meters) at every
    interior joint; 0 keeps a sharp corner. A radius too large for the
    adjacent legs is shrunk so each arc uses at most half of each leg.
    The terminal moves at constant ``speed`` along the arc length.
    """

    waypoints: tuple
    speed: float
    fillet_radii: tuple = ()
    _segments: list = field(init=False, repr=False, compare=False)
    _cumulative: list = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = [_pt(p) for p in self.waypoints]
        if len(pts) < 2:
            raise ValueError("a path needs at least two waypoints")
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        radii = list(self.fillet_radii) or [0.0] * (len(pts) - 2)
        if len(radii) != len(pts) - 2:
            raise ValueError(f"need {len(pts) - 2} fillet radii, got {len(radii)}")
        if any(r < 0 for r in radii):
            raise ValueError("fillet radii must be nonnegative")
        object.__setattr__(self, "waypoints", tuple(tuple(map(float, p)) for p in pts))
        object.__setattr__(self, "fillet_radii", tuple(float(r) for r in radii))
        segs = self._build(pts, radii)
        cum = [0.0]
        for s in segs:
            cum.append(cum[-1] + s.length)
        if not cum[-1] > 0:
            raise ValueError("path length must be positive")
        object.__setattr__(self, "_segments", segs)
        object.__setattr__(self, "_cumulative", cum)

    @staticmethod
    def _build(pts, radii):
        segs = []
        cursor = pts[0]
        for j in range(1, len(pts) - 1):
            prev, here, nxt = pts[j - 1], pts[j], pts[j + 1]
            d_in = here - prev
            d_out = nxt - here
            l_in, l_out = np.linalg.norm(d_in), np.linalg.norm(d_out)
            if l_in == 0 or l_out == 0:
                continue
            d_in, d_out = d_in / l_in, d_out / l_out
            cross = d_in[0] * d_out[1] - d_in[1] * d_out[0]
            theta = math.atan2(abs(cross), float(np.dot(d_in, d_out)))
            r = radii[j - 1]
            if r <= 0 or theta < 1e-12 or math.pi - theta < 1e-9:
                segs.append(_Line(cursor, here))
                cursor = here
                continue
            tl = r * math.tan(theta / 2.0)
            tl_cap = min(np.linalg.norm(here - cursor), l_out / 2.0, l_in / 2.0)
            if tl > tl_cap:
                tl = tl_cap
                r = tl / math.tan(theta / 2.0)
            a = here - d_in * tl
            b = here + d_out * tl
            side = 1.0 if cross > 0 else -1.0
            normal = side * np.array([-d_in[1], d_in[0]])
            c = a + normal * r
            start_angle = math.atan2(a[1] - c[1], a[0] - c[0])
            segs.append(_Line(cursor, a))
            segs.append(_Arc(c, r, start_angle, side * theta))
            cursor = b
        segs.append(_Line(cursor, pts[-1]))
        return [s for s in segs if s.length > 0]

    @property
    def length(self) -> float:
        return self._cumulative[-1]

    @property
    def duration(self) -> float:
        return self.length / self.speed

    def position_at(self, t: float, clamp: bool = False) -> Point:
        """Position after ``t`` seconds of uniform-speed travel."""
        if t < 0 or t > self.duration * (1 + 1e-12):
            if not clamp:
                raise ValueError(f"t={t} outside [0, {self.duration}]")
            t = min(max(t, 0.0), self.duration)
        s = min(self.speed * t, self.length)
        i = bisect.bisect_right(self._cumulative, s) - 1
        i = min(max(i, 0), len(self._segments) - 1)
        p = self._segments[i].at(s - self._cumulative[i])
        return (float(p[0]), float(p[1]))


def position_at(path: MobilePath, t: float, clamp: bool = False) -> Point:
    return path.position_at(t, clamp)
