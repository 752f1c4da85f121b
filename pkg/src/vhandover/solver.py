"""SVD, minimum-norm least squares, and Newton-type stationarity solving.

The SVD is a one-sided Jacobi (Hestenes) iteration on real matrices.
``pinv_solve`` builds each solution column as
``sum_i (u_i . b_j / sigma_i) v_i`` over the singular values above a
rank tolerance. ``solve_stationarity`` linearizes the gradient of a
scalar objective and takes each Newton step with ``pinv_solve``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DimensionError

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``a = u @ diag(sigma) @ v.T``.

    ``u`` is ``(rows, r)``, ``v`` is ``(cols, r)`` with ``r = min(rows, cols)``;
    both have orthonormal columns and ``sigma`` is nonincreasing.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T

    def rank(self, tol: float | None = None) -> int:
        tol = default_tolerance(self.u.shape[0], self.v.shape[0], self.sigma) if tol is None else tol
        return int(np.count_nonzero(self.sigma > tol))


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate a dense real 2-D array (1-D input becomes a column)."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def default_tolerance(rows: int, cols: int, sigma: np.ndarray) -> float:
    smax = float(sigma[0]) if len(sigma) else 0.0
    return max(rows, cols) * smax * EPS


def _complete_basis(q: np.ndarray, filled: np.ndarray) -> np.ndarray:
    """Replace the columns of ``q`` not flagged in ``filled`` by an orthonormal completion."""
    m = q.shape[0]
    basis = [q[:, j] for j in range(q.shape[1]) if filled[j]]
    candidates = iter(np.eye(m))
    for j in range(q.shape[1]):
        if filled[j]:
            continue
        for e in candidates:
            w = e.copy()
            for _ in range(2):
                for b in basis:
                    w -= np.dot(b, w) * b
            nw = np.linalg.norm(w)
            if nw > 1e-8:
                q[:, j] = w / nw
                basis.append(q[:, j])
                break
    return q


def _jacobi_tall(a: np.ndarray, max_sweeps: int) -> SvdFactors:
    m, n = a.shape
    w = a.copy()
    v = np.eye(n)
    tol = EPS * n
    # columns at rounding-noise scale are treated as already orthogonal
    floor = (EPS * float(np.linalg.norm(a))) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = float(np.dot(w[:, p], w[:, p]))
                beta = float(np.dot(w[:, q], w[:, q]))
                gamma = float(np.dot(w[:, p], w[:, q]))
                if gamma == 0.0 or min(alpha, beta) <= floor or abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                wp = w[:, p].copy()
                w[:, p] = c * wp - s * w[:, q]
                w[:, q] = s * wp + c * w[:, q]
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        if not rotated:
            break
    else:
        raise ConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    v = v[:, order]
    cutoff = max(m, n) * (sigma[0] if n else 0.0) * EPS
    filled = sigma > cutoff
    u = np.zeros((m, n))
    u[:, filled] = w[:, filled] / sigma[filled]
    if not np.all(filled):
        u = _complete_basis(u, filled)
    return SvdFactors(u=u, sigma=sigma, v=v)


def svd(a) -> SvdFactors:
    """Thin singular value decomposition of a real matrix.

    Raises
    ------
    ConvergenceError
        If the rotations have not settled after ``100 * max(rows, cols)`` sweeps.
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    cap = 100 * max(m, n)
    if m >= n:
        return _jacobi_tall(a, cap)
    f = _jacobi_tall(a.T, cap)
    return SvdFactors(u=f.v, sigma=f.sigma, v=f.u)


def pinv_solve(a, b, tol: float | None = None) -> np.ndarray:
    """Minimum-norm least-squares solution of ``a @ x = b``.

    Parameters
    ----------
    a : (rows, cols) array_like
    b : (rows,) or (rows, p) array_like
        Each column is solved independently.
    tol : float, optional
        Singular values ``<= tol`` are discarded. Defaults to
        ``max(rows, cols) * sigma_max * eps``.

    Returns
    -------
    ndarray
        ``(cols,)`` if ``b`` was 1-D, else ``(cols, p)``.
    """
    a = as_matrix(a, "a")
    b_arr = np.asarray(b, dtype=float)
    vector = b_arr.ndim == 1
    b2 = as_matrix(b_arr, "b")
    if b2.shape[0] != a.shape[0]:
        raise DimensionError(f"a has {a.shape[0]} rows but b has {b2.shape[0]}")
    f = svd(a)
    if tol is None:
        tol = default_tolerance(*a.shape, f.sigma)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    x = np.zeros((a.shape[1], b2.shape[1]))
    for i, s in enumerate(f.sigma):
        if s <= tol:
            break
        x += np.outer(f.v[:, i], (f.u[:, i] @ b2) / s)
    return x[:, 0] if vector else x


@dataclass(frozen=True)
class StationarityResult:
    x: np.ndarray
    converged: bool
    iterations: int
    grad_norm: float


def gradient(func: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    """Central-difference gradient, step ``cbrt(eps) * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    h0 = EPS ** (1.0 / 3.0)
    for i in range(x.size):
        h = h0 * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (func(xp) - func(xm)) / (2.0 * h)
    return g


def hessian(func: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    """Finite-difference Jacobian of the gradient, symmetrized."""
    x = np.asarray(x, dtype=float)
    k = x.size
    fx = func(x)
    hmat = np.empty((k, k))
    steps = EPS ** 0.25 * np.maximum(1.0, np.abs(x))
    for i in range(k):
        for j in range(i, k):
            hi, hj = steps[i], steps[j]
            if i == j:
                xp = x.copy()
                xm = x.copy()
                xp[i] += hi
                xm[i] -= hi
                val = (func(xp) - 2.0 * fx + func(xm)) / (hi * hi)
            else:
                def at(si, sj):
                    y = x.copy()
                    y[i] += si * hi
                    y[j] += sj * hj
                    return func(y)
                val = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj)
            hmat[i, j] = hmat[j, i] = val
    return hmat


def solve_stationarity(
    loglik: Callable[[np.ndarray], float],
    x0,
    tol: float = 1e-8,
    max_iter: int = 50,
) -> StationarityResult:
    """Find a stationary maximizer of ``loglik`` by damped Newton iteration.

    Each step solves ``H dx = -g`` with :func:`pinv_solve`. A step that
    is not an ascent direction is replaced by the gradient; steps that
    leave the domain or lower the objective are halved. Convergence means
    ``max|g| <= tol``, or a full Newton step with
    ``max|dx| <= tol * max(1, max|x|)`` once finite-difference noise in
    the gradient of a large objective exceeds ``tol``. Non-convergence
    is reported through ``converged=False``, never silently.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()

    def safe(y):
        try:
            v = float(loglik(y))
        except (ValueError, ArithmeticError):
            return -math.inf
        return v if not math.isnan(v) else -math.inf

    fx = safe(x)
    if not math.isfinite(fx):
        raise ValueError("loglik is not finite at x0")
    g = gradient(safe, x)
    gnorm = float(np.max(np.abs(g)))
    it = 0
    while it < max_iter:
        if gnorm <= tol:
            return StationarityResult(x, True, it, gnorm)
        it += 1
        step = -pinv_solve(hessian(safe, x), g)
        newton = bool(np.dot(step, g) > 0)
        if not newton:
            step = g / max(1.0, float(np.linalg.norm(g)))
        t = 1.0
        for _ in range(60):
            cand = x + t * step
            fc = safe(cand)
            if math.isfinite(fc) and fc >= fx - 1e-12 * abs(fx):
                break
            t *= 0.5
        else:
            break
        small = newton and t == 1.0 and float(np.max(np.abs(cand - x))) <= tol * max(1.0, float(np.max(np.abs(x))))
        x, fx = cand, fc
        g = gradient(safe, x)
        gnorm = float(np.max(np.abs(g)))
        if small:
            return StationarityResult(x, True, it, gnorm)
    return StationarityResult(x, gnorm <= tol, it, gnorm)
