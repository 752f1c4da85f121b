"""Rayleigh fast-fading amplitude model and RSS synthesis.

The amplitude density is ``p(x) = x / lam**2 * exp(-x**2 / (2 * lam**2))``
for ``x >= 0``. Samples are drawn by inverse-CDF transform from a seeded
PCG64 stream, so a given ``(lam, seed, stream_key)`` always yields the
same amplitudes on every platform numpy supports.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


def _check_lambda(lam: float) -> None:
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError(f"lambda must be a positive finite number, got {lam!r}")


def _check_x(x: float) -> None:
    if x < 0 or math.isnan(x):
        raise DomainError(f"amplitude must be nonnegative, got {x!r}")


def pdf(x: float, lam: float) -> float:
    """Rayleigh density at amplitude ``x`` for scale ``lam``."""
    _check_x(x)
    _check_lambda(lam)
    return x / lam**2 * math.exp(-(x * x) / (2.0 * lam * lam))


def cdf(x: float, lam: float) -> float:
    """Rayleigh distribution function ``1 - exp(-x**2 / (2 lam**2))``."""
    _check_x(x)
    _check_lambda(lam)
    return -math.expm1(-(x * x) / (2.0 * lam * lam))


def inverse_cdf(u: float, lam: float) -> float:
    """Amplitude ``x`` with ``cdf(x, lam) == u`` for ``u`` in ``[0, 1)``."""
    _check_lambda(lam)
    if not 0.0 <= u < 1.0:
        raise DomainError(f"u must lie in [0, 1), got {u!r}")
    return lam * math.sqrt(-2.0 * math.log1p(-u))


def theoretical_mean(lam: float) -> float:
    _check_lambda(lam)
    return lam * SQRT_HALF_PI


def theoretical_variance(lam: float) -> float:
    _check_lambda(lam)
    return (4.0 - math.pi) / 2.0 * lam * lam


def stream_key(network_id: str, run_id: int = 0) -> tuple[int, int]:
    """Spawn key that decorrelates the streams of different networks and runs."""
    return (zlib.crc32(network_id.encode("utf-8")), int(run_id))


@dataclass
class RayleighChannel:
    """Seeded source of Rayleigh amplitudes.

    Parameters
    ----------
    lam : float
        Scale parameter, linear amplitude units.
    seed : int
        64-bit unsigned seed.
    key : tuple of int
        Spawn key mixed into the seed, see :func:`stream_key`.
    """

    lam: float
    seed: int = 0
    key: tuple[int, ...] = ()
    _rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_lambda(self.lam)
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        self.reset()

    def reset(self) -> None:
        """Rewind the channel to the start of its stream."""
        seq = np.random.SeedSequence(int(self.seed), spawn_key=tuple(self.key))
        self._rng = np.random.Generator(np.random.PCG64(seq))

    def uniforms(self, n: int) -> np.ndarray:
        return self._rng.random(n)

    def draw(self, n: int) -> np.ndarray:
        """Next ``n`` amplitudes from the stream."""
        if n < 1:
            raise ValueError(f"n must be a positive integer, got {n!r}")
        return self.lam * np.sqrt(-2.0 * np.log1p(-self.uniforms(n)))

    @property
    def mean_amplitude(self) -> float:
        return self.lam * SQRT_HALF_PI


def sample(channel: RayleighChannel, n: int) -> np.ndarray:
    """Draw ``n`` amplitudes from ``channel`` (advances its stream)."""
    return channel.draw(n)


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance mean level: ``ref_power_db - 10 * exponent * log10(d / d0)``."""

    ref_power_db: float = 0.0
    ref_distance_m: float = 1.0
    exponent: float = 2.0

    def __post_init__(self) -> None:
        if not self.ref_distance_m > 0:
            raise DomainError(f"ref_distance_m must be positive, got {self.ref_distance_m!r}")
        if self.exponent < 0:
            raise DomainError(f"exponent must be >= 0, got {self.exponent!r}")

    def mean_level_db(self, distance_m: float) -> float:
        if not distance_m > 0:
            raise DomainError(f"distance must be positive, got {distance_m!r}")
        return self.ref_power_db - 10.0 * self.exponent * math.log10(distance_m / self.ref_distance_m)

    def amplitude_gain(self, distance_m: float) -> float:
        """Linear amplitude factor relative to the reference distance."""
        return 10.0 ** ((self.mean_level_db(distance_m) - self.ref_power_db) / 20.0)


@dataclass(frozen=True)
class RssSample:
    """One received-signal observation.

    ``power_db`` is the fading deviation from the local mean level,
    ``20 * log10(amplitude / mean_amplitude)``; ``level_db`` adds the
    path-loss mean level back on top.
    """

    time_s: float
    amplitude: float
    power_db: float
    mean_level_db: float
    gain: float

    @property
    def level_db(self) -> float:
        return self.mean_level_db + self.power_db

    @property
    def received_amplitude(self) -> float:
        """Fading amplitude scaled by the path-loss gain."""
        return self.amplitude * self.gain


def fading_db(amplitude, lam: float):
    """Deviation of ``amplitude`` from the Rayleigh mean, in dB.

    Zero amplitudes map to ``-inf``.
    """
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.asarray(amplitude, dtype=float) / (lam * SQRT_HALF_PI))


def rss_at(
    channel: RayleighChannel,
    path_loss: PathLossModel,
    distance_m: float,
    t: float,
    amplitude: float | None = None,
) -> RssSample:
    """Synthesize one RSS sample at ``distance_m`` and time ``t``.

    ``amplitude`` overrides the fading draw (the channel stream is then
    not advanced), which gives a deterministic, fading-free sample when
    set to ``channel.mean_amplitude``.
    """
    level = path_loss.mean_level_db(distance_m)
    x = float(channel.draw(1)[0]) if amplitude is None else float(amplitude)
    _check_x(x)
    return RssSample(
        time_s=float(t),
        amplitude=x,
        power_db=float(fading_db(x, channel.lam)),
        mean_level_db=level,
        gain=path_loss.amplitude_gain(distance_m),
    )


def rss_window(
    channel: RayleighChannel,
    path_loss: PathLossModel,
    distance_m: float,
    t: float,
    n: int,
    fading: bool = True,
) -> list[RssSample]:
    """``n`` consecutive samples at a fixed position, vectorized."""
    level = path_loss.mean_level_db(distance_m)
    gain = path_loss.amplitude_gain(distance_m)
    if fading:
        xs = channel.draw(n)
    else:
        xs = np.full(n, channel.mean_amplitude)
    devs = fading_db(xs, channel.lam)
    return [RssSample(float(t), float(x), float(d), level, gain) for x, d in zip(xs, devs)]


def write_samples_csv(path, amplitudes: Sequence[float]) -> None:
    """One amplitude per line, 9 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for a in amplitudes:
            fh.write(f"{float(a):.9g}\n")
