"""Numerical exploration of the critical points where the norm hits its plateau.

For each grid value of s the scan combines two one-sided tools:

* a witness certificate (norm strictly above the plateau target), which is
  a proof whenever it validates;
* a truncation sweep staying visibly below the target *together with* the
  analytic upper bound equalling the target, which is labeled evidence,
  because a truncated norm below the target never proves the operator norm is.

INCONCLUSIVE is an expected, honest verdict near the critical point.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytic import f_of_s, pq_constant, s_star
from .errors import NoValidEpsilonError
from .generators import GeneratorSequence, L, StructuredMatrix
from .normest import rayleigh_p, truncation_sweep
from .witness import build_as_witness, certify_as_witness

CERTIFIED_ABOVE = "CERTIFIED_ABOVE"
BELOW_EVIDENCE = "BELOW_EVIDENCE"
INCONCLUSIVE = "INCONCLUSIVE"

_BELOW_MARGIN = 1e-3
_TARGET_MATCH = 1e-12


def upper_bound_of_record(p: float, s: float) -> float | None:
    """Best analytic upper bound available at (p, s); None when there is none.

    p = 2: the delta-method value max{f(s), 4} for any s > 0.
    p != 2: the plateau constant p^2/(p-1), proven only for s >= 1.
    """
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    if p == 2.0:
        return max(f_of_s(s), 4.0)
    if s >= 1.0:
        return pq_constant(p)
    return None


@dataclass(frozen=True)
class ScanPoint:
    s: float
    verdict: str
    witness_ratio: float | None = None
    witness_eps: float | None = None
    sweep_max: float | None = None
    upper_bound: float | None = None


@dataclass(frozen=True)
class CriticalScan:
    p: float
    target: float
    grid: tuple[float, ...]
    points: tuple[ScanPoint, ...]
    bracket: tuple[float, float]


def _certify_above(p: float, s: float, target: float, witness_M: int,
                   ) -> tuple[float | None, float | None]:
    """(ratio, eps) when a certificate proves norm > target at s, else Nones."""
    if p != 2.0:
        return None, None
    if s <= 0.25:
        # trailing entries dominate: the first basis vector already gives
        # ||A e_0|| = sqrt(sum a_j^2) > 1/s >= 4
        mat = StructuredMatrix(L, GeneratorSequence.a_s(s))
        e0 = np.zeros(witness_M)
        e0[0] = 1.0
        ratio = rayleigh_p(mat, e0, 2.0)
        return (ratio, None) if ratio > target else (None, None)
    if s < s_star():
        try:
            cert = certify_as_witness(build_as_witness(s, witness_M))
        except NoValidEpsilonError:
            return None, None
        if cert.pointwise_ok and cert.ratio > target:
            return cert.ratio, cert.eps
    return None, None


def _sweep_sizes(M_max: int) -> list[int]:
    sizes = []
    M = 256
    while M < M_max:
        sizes.append(M)
        M *= 4
    sizes.append(M_max)
    return sizes


def scan_critical(p: float, s_grid: Sequence[float], M_max: int = 2**14,
                  tol: float | None = None, witness_M: int = 2**14,
                  threads: int | None = None) -> CriticalScan:
    """Verdict per grid point plus a bracketing interval for the critical s."""
    grid = [float(s) for s in s_grid]
    if not grid:
        raise ValueError("the s grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("the s grid must be strictly increasing")
    if M_max < 256:
        raise ValueError(f"M_max must be >= 256, got {M_max}")
    target = pq_constant(p)
    sizes = _sweep_sizes(M_max)

    def run(s: float) -> ScanPoint:
        ratio, eps = _certify_above(p, s, target, witness_M)
        mat = StructuredMatrix(L, GeneratorSequence.a_s(s))
        sweep = truncation_sweep(mat, p, sizes, tol=tol)
        sweep_max = max(e.value for e in sweep)
        ub = upper_bound_of_record(p, s)
        if ratio is not None:
            verdict = CERTIFIED_ABOVE
        elif (sweep_max < target - _BELOW_MARGIN and ub is not None
              and abs(ub - target) <= _TARGET_MATCH):
            verdict = BELOW_EVIDENCE
        else:
            verdict = INCONCLUSIVE
        return ScanPoint(s=s, verdict=verdict, witness_ratio=ratio, witness_eps=eps,
                         sweep_max=sweep_max, upper_bound=ub)

    if threads is not None and threads > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(run, grid))
    else:
        points = [run(s) for s in grid]

    # verdict monotonicity: a certificate above a below-evidence point would
    # contradict itself; both sides demote to INCONCLUSIVE
    certified = [pt.s for pt in points if pt.verdict == CERTIFIED_ABOVE]
    below = [pt.s for pt in points if pt.verdict == BELOW_EVIDENCE]
    if certified and below and max(certified) > min(below):
        bad_lo, bad_hi = min(below), max(certified)
        points = [
            ScanPoint(pt.s, INCONCLUSIVE, pt.witness_ratio, pt.witness_eps,
                      pt.sweep_max, pt.upper_bound)
            if pt.verdict != INCONCLUSIVE and bad_lo <= pt.s <= bad_hi else pt
            for pt in points
        ]
        certified = [pt.s for pt in points if pt.verdict == CERTIFIED_ABOVE]
        below = [pt.s for pt in points if pt.verdict == BELOW_EVIDENCE]

    bracket = (max(certified) if certified else grid[0],
               min(below) if below else grid[-1])
    return CriticalScan(p=p, target=target, grid=tuple(grid),
                        points=tuple(points), bracket=bracket)
