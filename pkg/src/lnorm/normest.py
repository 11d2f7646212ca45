"""Operator-norm estimation for truncated structured matrices.

Two estimators over the M x M principal truncation:

* ``norm2_power``: power iteration on A^T A, reported as a singular value.
* ``normp_boyd``: the nonlinear power method for the lp -> lp norm of a
  nonnegative matrix: y = Ax, z = A^T y^(p-1), x <- z^(1/(p-1)) renormalized.

Both start from the deterministic uniform positive vector (the dominant
eigenvector of these nonnegative matrices is positive, so a positive start
cannot land in a null space) and stop when the estimate stops moving.
Every reported value is a Rayleigh quotient of an explicit vector, hence a
valid lower bound on the truncated norm.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._env import default_max_iter, default_tol
from .errors import InternalConsistencyError
from .generators import KIND_CUSTOM, StructuredMatrix, VectorLike, as_array, matvec

_ASCENT_SLACK = 1e-12


@dataclass(frozen=True)
class NormEstimate:
    """Estimated truncated operator norm plus convergence bookkeeping.

    ``lower_certificate`` is the lp Rayleigh quotient of the final iterate:
    an unconditional lower bound on the truncated norm no matter how early
    the iteration stopped.  ``residual`` is the movement of the estimate
    over the last step (tol-sized when converged, larger when max_iter hit).
    """

    value: float
    p: float
    truncation: int
    iterations: int
    residual: float
    lower_certificate: float


def rayleigh_p(mat: StructuredMatrix, x: VectorLike, p: float = 2.0) -> float:
    """||A x||_p / ||x||_p over the truncation sized by x; rejects x = 0."""
    arr = as_array(x)
    nx = np.linalg.norm(arr, p)
    if nx == 0.0:
        raise ValueError("Rayleigh quotient of the zero vector is undefined")
    return float(np.linalg.norm(matvec(mat, arr), p) / nx)


def norm2_power(mat: StructuredMatrix, M: int, tol: float | None = None,
                max_iter: int | None = None,
                start: np.ndarray | None = None) -> NormEstimate:
    """Dominant singular value of the M x M truncation via power iteration.

    Uses only structured matvecs (A then A^T).  Deterministic.
    """
    if M < 1:
        raise ValueError(f"truncation size must be >= 1, got {M}")
    tol = default_tol() if tol is None else tol
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    max_iter = default_max_iter() if max_iter is None else max_iter
    if start is None:
        x = np.full(M, 1.0 / math.sqrt(M))
    else:
        x = np.asarray(start, dtype=float)
        if x.size != M:
            raise ValueError(f"start vector has length {x.size}, expected {M}")
        nx = np.linalg.norm(x)
        if nx == 0.0:
            raise ValueError("start vector must be nonzero")
        x = x / nx
    transpose = mat.transpose()
    sigma_prev = -math.inf
    sigma = 0.0
    iterations = 0
    residual = math.inf
    for iterations in range(1, max_iter + 1):
        y = matvec(mat, x)
        sigma = float(np.linalg.norm(y))  # = ||Ax||_2 / ||x||_2, a Rayleigh bound
        residual = abs(sigma - sigma_prev)
        if residual < tol:
            break
        sigma_prev = sigma
        z = matvec(transpose, y)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            residual = 0.0
            break
        x = z / nz
    return NormEstimate(value=sigma, p=2.0, truncation=M, iterations=iterations,
                        residual=residual, lower_certificate=sigma)


def normp_boyd(mat: StructuredMatrix, M: int, p: float, tol: float | None = None,
               max_iter: int | None = None,
               start: np.ndarray | None = None) -> NormEstimate:
    """lp -> lp norm of the truncation via the nonlinear power method.

    Valid for nonnegative matrices (all closed-form generators; custom
    generators are checked).  The Rayleigh quotient sequence must be
    nondecreasing; a decrease beyond rounding slack raises
    InternalConsistencyError because it would falsify the method's
    convergence guarantee.
    """
    if M < 1:
        raise ValueError(f"truncation size must be >= 1, got {M}")
    if not 1.0 < p < math.inf:
        raise ValueError(f"p must lie in (1, inf), got {p}")
    tol = default_tol() if tol is None else tol
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    max_iter = default_max_iter() if max_iter is None else max_iter
    if mat.gen.kind == KIND_CUSTOM and np.any(mat.gen.values(M) < 0):
        raise ValueError("the p-norm power method requires a nonnegative matrix")
    if start is None:
        x = np.full(M, M ** (-1.0 / p))
    else:
        x = np.asarray(start, dtype=float)
        if x.size != M:
            raise ValueError(f"start vector has length {x.size}, expected {M}")
        if np.any(x < 0):
            raise ValueError("start vector must be nonnegative")
        nx = np.linalg.norm(x, p)
        if nx == 0.0:
            raise ValueError("start vector must be nonzero")
        x = x / nx
    transpose = mat.transpose()
    e = p - 1.0
    r_prev = -math.inf
    r = 0.0
    iterations = 0
    residual = math.inf
    for iterations in range(1, max_iter + 1):
        y = matvec(mat, x)
        r = float(np.linalg.norm(y, p))  # ||x||_p == 1
        if r == 0.0:
            residual = 0.0
            break
        if r < r_prev - _ASCENT_SLACK * max(1.0, r_prev):
            raise InternalConsistencyError(
                f"p-norm Rayleigh quotient decreased: {r_prev} -> {r} at "
                f"iteration {iterations} (M={M}, p={p})")
        residual = abs(r - r_prev)
        if residual < tol:
            break
        r_prev = r
        z = matvec(transpose, y ** e)
        x = z ** (1.0 / e)
        x /= np.linalg.norm(x, p)
    return NormEstimate(value=r, p=p, truncation=M, iterations=iterations,
                        residual=residual, lower_certificate=r)


def truncation_sweep(mat: StructuredMatrix, p: float, sizes: Sequence[int],
                     tol: float | None = None, max_iter: int | None = None,
                     threads: int | None = None,
                     start_fn: Callable[[int], np.ndarray] | None = None,
                     ) -> list[NormEstimate]:
    """One estimate per size, checked for monotone growth.

    Principal truncations of a nonnegative matrix have nondecreasing norms,
    so converged estimates must not drop by more than tol from one size to
    the next; a violation raises InternalConsistencyError.
    """
    sizes = [int(M) for M in sizes]
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly increasing, got {sizes}")
    tol = default_tol() if tol is None else tol

    def run(M: int) -> NormEstimate:
        start = start_fn(M) if start_fn is not None else None
        if p == 2.0:
            return norm2_power(mat, M, tol=tol, max_iter=max_iter, start=start)
        return normp_boyd(mat, M, p, tol=tol, max_iter=max_iter, start=start)

    if threads is not None and threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            estimates = list(pool.map(run, sizes))
    else:
        estimates = [run(M) for M in sizes]
    for prev, cur in zip(estimates, estimates[1:]):
        if prev.residual <= tol and cur.residual <= tol:
            if cur.value < prev.value - tol:
                raise InternalConsistencyError(
                    f"truncated norms must be nondecreasing in M: "
                    f"{prev.value} at M={prev.truncation} vs "
                    f"{cur.value} at M={cur.truncation}")
    return estimates


def log_fit_extrapolation(estimates: Sequence[NormEstimate]) -> float | None:
    """Heuristic limit guess from fitting value ~ c - b / log M.

    Purely exploratory: nothing is known about the true rate at which
    truncated norms approach the operator norm.  Returns None with fewer
    than three points.
    """
    if len(estimates) < 3:
        return None
    basis = np.column_stack([
        np.ones(len(estimates)),
        [1.0 / math.log(e.truncation) for e in estimates],
    ])
    values = [e.value for e in estimates]
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    return float(coef[0])
