"""Compiled O(M) matvec kernels for the three structured shapes.

Every running sum uses Kahan compensation so that suffix sums of slowly
decaying terms remain accurate at M ~ 1e6 and beyond.  fastmath stays off:
the compensation step must not be re-associated away.

Each kernel returns True iff every accumulated quantity stayed finite,
which doubles as the non-finite-input check (NaN/Inf propagate through
the running sums).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def fill_recip(s: float, out: np.ndarray) -> None:
    for i in range(out.shape[0]):
        out[i] = 1.0 / (i + s)


@njit(cache=True)
def mv_l_recip(s: float, x: np.ndarray, out: np.ndarray) -> bool:
    # L shape, a_n = 1/(n+s):  y_i = a_i * sum_{j<=i} x_j + sum_{j>i} a_j x_j
    n = x.shape[0]
    acc = 0.0
    comp = 0.0
    for i in range(n - 1, 0, -1):
        y = x[i] / (i + s) - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        out[i - 1] = acc
    ok = math.isfinite(acc)
    ps = 0.0
    pc = 0.0
    for i in range(n):
        y = x[i] - pc
        t = ps + y
        pc = (t - ps) - y
        ps = t
        tail = out[i] if i < n - 1 else 0.0
        out[i] = ps / (i + s) + tail
    return ok and math.isfinite(ps)


@njit(cache=True)
def mv_l_arr(a: np.ndarray, x: np.ndarray, out: np.ndarray) -> bool:
    n = x.shape[0]
    acc = 0.0
    comp = 0.0
    for i in range(n - 1, 0, -1):
        y = a[i] * x[i] - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        out[i - 1] = acc
    ok = math.isfinite(acc)
    ps = 0.0
    pc = 0.0
    for i in range(n):
        y = x[i] - pc
        t = ps + y
        pc = (t - ps) - y
        ps = t
        tail = out[i] if i < n - 1 else 0.0
        out[i] = a[i] * ps + tail
    return ok and math.isfinite(ps)


@njit(cache=True)
def mv_c_recip(s: float, x: np.ndarray, out: np.ndarray) -> bool:
    # C shape (terraced):  y_i = a_i * sum_{j<=i} x_j
    ps = 0.0
    pc = 0.0
    for i in range(x.shape[0]):
        y = x[i] - pc
        t = ps + y
        pc = (t - ps) - y
        ps = t
        out[i] = ps / (i + s)
    return math.isfinite(ps)


@njit(cache=True)
def mv_c_arr(a: np.ndarray, x: np.ndarray, out: np.ndarray) -> bool:
    ps = 0.0
    pc = 0.0
    for i in range(x.shape[0]):
        y = x[i] - pc
        t = ps + y
        pc = (t - ps) - y
        ps = t
        out[i] = a[i] * ps
    return math.isfinite(ps)


@njit(cache=True)
def mv_ctr_recip(s: float, x: np.ndarray, out: np.ndarray) -> bool:
    # transpose of C:  y_i = sum_{j>=i} a_j x_j
    acc = 0.0
    comp = 0.0
    for i in range(x.shape[0] - 1, -1, -1):
        y = x[i] / (i + s) - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        out[i] = acc
    return math.isfinite(acc)


@njit(cache=True)
def mv_ctr_arr(a: np.ndarray, x: np.ndarray, out: np.ndarray) -> bool:
    acc = 0.0
    comp = 0.0
    for i in range(x.shape[0] - 1, -1, -1):
        y = a[i] * x[i] - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        out[i] = acc
    return math.isfinite(acc)


def warmup() -> None:
    """Force JIT compilation of every kernel (useful before timing)."""
    x = np.ones(4)
    a = np.ones(4)
    out = np.empty(4)
    fill_recip(1.0, out)
    mv_l_recip(1.0, x, out)
    mv_l_arr(a, x, out)
    mv_c_recip(1.0, x, out)
    mv_c_arr(a, x, out)
    mv_ctr_recip(1.0, x, out)
    mv_ctr_arr(a, x, out)
