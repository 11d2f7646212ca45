"""Generator sequences, structured matrices and their O(M) truncated matvecs.

The two matrix families share one storage idea: the whole infinite matrix
is described by a scalar sequence (a_n).

* L shape:   entry(i, j) = a_max(i, j)          (symmetric)
* C shape:   entry(i, j) = a_i for j <= i       (terraced / lower triangular)
* Ctr shape: transpose of the C shape

``matvec`` never materializes the matrix: one prefix-sum pass over x and
one suffix-sum pass over a*x suffice for every shape.  ``materialize_dense``
exists as the quadratic test oracle and is size-capped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels
from ._env import default_dense_cap

L = "L"
C = "C"
CTR = "Ctr"

_SHAPES = (L, C, CTR)

KIND_AS = "as"
KIND_CESARO = "cesaro"
KIND_LACUNARY = "lacunary"
KIND_CUSTOM = "custom"


@dataclass(frozen=True)
class GeneratorSequence:
    """A rule n -> a_n.  Immutable; safe to share across workers."""

    kind: str
    s: float | None = None
    N: int | None = None
    terms: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind in (KIND_AS, KIND_CESARO):
            if self.s is None or not (self.s > 0):
                raise ValueError(f"{self.kind} generator needs s > 0, got {self.s}")
        elif self.kind == KIND_LACUNARY:
            if self.N is None or self.N < 2:
                raise ValueError(f"lacunary generator needs integer N >= 2, got {self.N}")
        elif self.kind == KIND_CUSTOM:
            if self.terms is None:
                raise ValueError("custom generator needs a finite list of terms")
            if not all(math.isfinite(t) for t in self.terms):
                raise ValueError("custom generator terms must be finite")
        else:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    @classmethod
    def a_s(cls, s: float) -> "GeneratorSequence":
        """a_n = 1/(n+s), the sequence generating the symmetric family."""
        return cls(KIND_AS, s=float(s))

    @classmethod
    def cesaro(cls, s: float) -> "GeneratorSequence":
        """a_n = 1/(n+s), used with the terraced (C) shape."""
        return cls(KIND_CESARO, s=float(s))

    @classmethod
    def lacunary(cls, N: int) -> "GeneratorSequence":
        """a_n = N^(-j/2) when n = N^j for some j >= 1, else 0."""
        return cls(KIND_LACUNARY, N=int(N))

    @classmethod
    def custom(cls, values: Sequence[float]) -> "GeneratorSequence":
        """Finite list of terms, implicitly zero-padded beyond its length."""
        return cls(KIND_CUSTOM, terms=tuple(float(v) for v in values))

    @property
    def reciprocal_form(self) -> bool:
        return self.kind in (KIND_AS, KIND_CESARO)

    def eval(self, n: int) -> float:
        if n < 0:
            raise ValueError(f"index must be >= 0, got {n}")
        if self.reciprocal_form:
            return 1.0 / (n + self.s)
        if self.kind == KIND_LACUNARY:
            if n < self.N:
                return 0.0
            p, j = self.N, 1
            while p < n:
                p *= self.N
                j += 1
            return float(self.N) ** (-j / 2.0) if p == n else 0.0
        if n < len(self.terms):
            return self.terms[n]
        return 0.0

    def values(self, M: int) -> np.ndarray:
        """a_0 .. a_{M-1} as a float64 array."""
        if M < 1:
            raise ValueError(f"truncation size must be >= 1, got {M}")
        if self.reciprocal_form:
            out = np.empty(M)
            _kernels.fill_recip(self.s, out)
            return out
        if self.kind == KIND_LACUNARY:
            out = np.zeros(M)
            p, j = self.N, 1
            # exact integer powers; stops at the largest j with N^j < M
            while p < M:
                out[p] = float(self.N) ** (-j / 2.0)
                p *= self.N
                j += 1
            return out
        out = np.zeros(M)
        k = min(M, len(self.terms))
        out[:k] = self.terms[:k]
        return out


@dataclass(frozen=True)
class StructuredMatrix:
    """A shape tag plus a generator; never materialized unless asked to."""

    shape: str
    gen: GeneratorSequence

    def __post_init__(self) -> None:
        if self.shape not in _SHAPES:
            raise ValueError(f"shape must be one of {_SHAPES}, got {self.shape!r}")

    def transpose(self) -> "StructuredMatrix":
        if self.shape == L:
            return self
        return StructuredMatrix(C if self.shape == CTR else CTR, self.gen)

    def entry(self, i: int, j: int) -> float:
        if self.shape == L:
            return self.gen.eval(max(i, j))
        if self.shape == C:
            return self.gen.eval(i) if j <= i else 0.0
        return self.gen.eval(j) if i <= j else 0.0


@dataclass(frozen=True, eq=False)
class TruncatedVector:
    """A finite window x_0 .. x_{M-1} of an infinite sequence."""

    values: np.ndarray
    offset: int = 0

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("truncated vector must be 1-D with length >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("truncated vector entries must be finite")
        if self.offset != 0:
            raise ValueError("only offset 0 is supported")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


VectorLike = Union[TruncatedVector, np.ndarray, Sequence[float]]


def as_array(x: VectorLike) -> np.ndarray:
    if isinstance(x, TruncatedVector):
        return x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("vector must be 1-D with length >= 1")
    return arr


def matvec(mat: StructuredMatrix, x: VectorLike):
    """y = (M x M principal truncation of mat) @ x, in O(M) time.

    M is the length of x.  Matches the dense oracle entrywise; rejects
    non-finite inputs.  Returns the same container type it was given.
    """
    wrapped = isinstance(x, TruncatedVector)
    arr = as_array(x)
    out = np.empty_like(arr)
    gen = mat.gen
    if gen.reciprocal_form:
        s = gen.s
        if mat.shape == L:
            ok = _kernels.mv_l_recip(s, arr, out)
        elif mat.shape == C:
            ok = _kernels.mv_c_recip(s, arr, out)
        else:
            ok = _kernels.mv_ctr_recip(s, arr, out)
    else:
        a = gen.values(arr.size)
        if mat.shape == L:
            ok = _kernels.mv_l_arr(a, arr, out)
        elif mat.shape == C:
            ok = _kernels.mv_c_arr(a, arr, out)
        else:
            ok = _kernels.mv_ctr_arr(a, arr, out)
    if not ok:
        raise ValueError("matvec input contains non-finite entries (or overflowed)")
    return TruncatedVector(out) if wrapped else out


def matvec_gram(mat: StructuredMatrix, x: VectorLike) -> np.ndarray:
    """(A^T A) x using two structured matvecs."""
    return matvec(mat.transpose(), matvec(mat, as_array(x)))


def materialize_dense(mat: StructuredMatrix, M: int, cap: int | None = None) -> np.ndarray:
    """Dense M x M truncation; the quadratic oracle used by the tests.

    Guarded by a size cap (default 4096, LNORM_DENSE_CAP) so an accidental
    call cannot allocate gigabytes.
    """
    if cap is None:
        cap = default_dense_cap()
    if not 1 <= M <= cap:
        raise ValueError(f"dense size must be in [1, {cap}], got {M}")
    a = mat.gen.values(M)
    idx = np.arange(M)
    if mat.shape == L:
        return a[np.maximum.outer(idx, idx)]
    dense = np.where(idx[None, :] <= idx[:, None], a[:, None], 0.0)
    if mat.shape == C:
        return dense
    return dense.T.copy()
