"""Parametric estimation of the Rayleigh scale and signal acceptance tests.

Covers the log-likelihood of observed amplitudes, its closed-form
maximizer, Chebyshev concentration bounds for the sample mean, the
one-sided ``(c, +inf)`` acceptance interval at rejection level ``alpha``,
and the sign test on second derivatives at two interval endpoints.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import fading
from .errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.05
# eps**(1/4) balances truncation and rounding for a central second difference.
FD_STEP = float(np.finfo(float).eps) ** 0.25


class SampleSet:
    """Nonnegative amplitude observations ``A_1 .. A_n``."""

    __slots__ = ("observations",)

    def __init__(self, observations: Iterable[float]):
        if not isinstance(observations, (np.ndarray, list, tuple)):
            observations = list(observations)
        obs = np.asarray(observations, dtype=float).ravel()
        if obs.size < 1:
            raise DomainError("a sample set needs at least one observation")
        if not np.all(np.isfinite(obs)) or np.any(obs < 0):
            raise DomainError("observations must be finite and nonnegative")
        self.observations = obs

    @property
    def n(self) -> int:
        return int(self.observations.size)

    @property
    def zero_count(self) -> int:
        return int(np.count_nonzero(self.observations == 0))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"SampleSet(n={self.n})"


def _as_samples(samples) -> SampleSet:
    return samples if isinstance(samples, SampleSet) else SampleSet(samples)


@dataclass(frozen=True)
class EstimateSummary:
    sample_mean: float
    mle_lambda: float
    population_mean: float
    population_sd: float
    n: int


@dataclass(frozen=True)
class ConfidenceInterval:
    """Interval ``(lower, upper)`` for parameter ``i`` of network ``j``."""

    lower: float
    upper: float = math.inf
    alpha: float = DEFAULT_ALPHA
    parameter_index: int = 1
    network_index: int = 1

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise DomainError(f"interval lower bound {self.lower} exceeds upper {self.upper}")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def log_likelihood(samples, lam: float) -> float:
    """Sum of Rayleigh log-densities; ``-inf`` if any observation is zero."""
    s = _as_samples(samples)
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    x = s.observations
    if s.zero_count:
        return -math.inf
    return float(np.sum(np.log(x)) - 2.0 * s.n * math.log(lam) - np.dot(x, x) / (2.0 * lam * lam))


def mle_lambda(samples) -> float:
    """Closed-form maximizer ``sqrt(sum(x**2) / (2 n))``.

    Zero observations carry no density and are dropped from ``n`` with a
    logged warning.
    """
    s = _as_samples(samples)
    zeros = s.zero_count
    n_pos = s.n - zeros
    if n_pos == 0:
        raise DomainError("all observations are zero; the likelihood has no maximizer")
    if zeros:
        logger.warning("mle_lambda: dropped %d zero observation(s) of %d", zeros, s.n)
    x = s.observations
    return math.sqrt(float(np.dot(x, x)) / (2.0 * n_pos))


def summarize(samples) -> EstimateSummary:
    s = _as_samples(samples)
    lam = mle_lambda(s)
    return EstimateSummary(
        sample_mean=float(np.mean(s.observations)),
        mle_lambda=lam,
        population_mean=fading.theoretical_mean(lam),
        population_sd=math.sqrt(fading.theoretical_variance(lam)),
        n=s.n,
    )


def chebyshev_bound(lam: float, n: int, k: float) -> float:
    """Upper bound on ``P{|mean - lam*sqrt(pi/2)| >= k}`` for ``n`` samples."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    return min(1.0, fading.theoretical_variance(lam) / (n * k * k))


def mean_interval(lam: float, k: float) -> ConfidenceInterval:
    """Closed interval ``[mu - k, mu + k]`` around the Rayleigh mean."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    mu = fading.theoretical_mean(lam)
    return ConfidenceInterval(lower=mu - k, upper=mu + k, alpha=0.5)


def threshold_for_alpha(lam: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Lower limit ``c`` with ``P{c <= X < inf} = 1 - alpha``."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return fading.inverse_cdf(alpha, lam)


def acceptance_interval(lam: float, alpha: float = DEFAULT_ALPHA,
                        parameter_index: int = 1, network_index: int = 1) -> ConfidenceInterval:
    return ConfidenceInterval(threshold_for_alpha(lam, alpha), math.inf, alpha,
                              parameter_index, network_index)


def accept_signal(summary: EstimateSummary, c: float) -> bool:
    """True iff the sample mean lies in the open interval ``(c, +inf)``."""
    return summary.sample_mean > c


def second_derivative(f: Callable[[float], float], x: float) -> float:
    """Central second difference with step ``eps**(1/4) * max(1, |x|)``."""
    h = FD_STEP * max(1.0, abs(x))
    try:
        lo, mid, hi = f(x - h), f(x), f(x + h)
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(f"finite-difference stencil around {x} leaves the domain: {exc}") from exc
    if not all(math.isfinite(v) for v in (lo, mid, hi)):
        raise DomainError(f"finite-difference stencil around {x} leaves the domain")
    return (hi - 2.0 * mid + lo) / (h * h)


def curvature_product_test(f: Callable[[float], float], a: float, b: float) -> bool:
    """Retain ``(a, b)`` iff ``f''(a) * f''(b) < 0``."""
    if not a < b:
        raise DomainError(f"need a < b, got a={a!r}, b={b!r}")
    return second_derivative(f, a) * second_derivative(f, b) < 0


def loglik_curvature_test(samples, lam_lo: float, lam_hi: float) -> bool:
    """Curvature sign test applied to the log-likelihood as a function of lambda."""
    s = _as_samples(samples)
    return curvature_product_test(lambda lam: log_likelihood(s, lam), lam_lo, lam_hi)
