"""Explicit lower-bound vectors and their runnable certificates.

Three constructions, one per norm result:

* the Gamma-ratio vector certifying ||A_s|| > 4 for s below s_star,
* the truncated power vector (k+s)^(-1/p) certifying the p-norm limit,
* the piecewise-constant vector attaining the lacunary matrix norm.

Certification always evaluates the relevant quantity twice, through
independent code paths, and reports honest uncertainty for anything the
finite truncation cannot see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import WitnessParams, g_and_h, pq_constant, s_star, gamma_m
from .errors import InternalConsistencyError, NoValidEpsilonError
from .generators import C, GeneratorSequence, L, StructuredMatrix, matvec
from .normest import rayleigh_p
from .special import lgamma, lgamma_ratio

_AUTO = "auto"
_BISECT_STEPS = 60
# validity margins for the eps search: keep h(1) strictly positive so the
# pointwise inequality survives floating-point evaluation at n = 1
_MARGIN_G = 1e-12
_MARGIN_H1 = 1e-9

_LACUNARY_MATERIALIZE_CAP = 2**25


# ---------------------------------------------------------------------------
# spectral witness for the symmetric family


@dataclass(frozen=True, eq=False)
class AsWitness:
    """x_0 = 1, x_n = s (n+s) K_n, with K_n the Gamma-ratio sequence."""

    params: WitnessParams
    M: int
    x: np.ndarray
    K: np.ndarray


@dataclass(frozen=True)
class AsCertificate:
    ratio: float
    pointwise_ok: bool
    eps: float
    tail_bound: float
    max_route_gap: float


def witness_k_values(params: WitnessParams, M: int) -> np.ndarray:
    """K_0 .. K_{M-1} by the exact ratio recurrence K_{n+1}/K_n = (n+b-a)/(n+b+1).

    Seeded with K_0 = 1/(beta (beta-alpha)) so the recurrence reproduces
    K_n = Gamma(beta) Gamma(n+beta-alpha) / (Gamma(n+beta+1) Gamma(beta-alpha+1)).
    The cumulative product runs in extended precision: the certificate
    demands 1e-10 agreement with the log-Gamma route at n ~ 1e6.
    """
    al, be = params.alpha, params.beta
    if be <= al:
        raise ValueError(f"need beta > alpha for a positive sequence; got {be} <= {al}")
    factors = np.empty(M, dtype=np.longdouble)
    factors[0] = 1.0 / (np.longdouble(be) * (np.longdouble(be) - np.longdouble(al)))
    if M > 1:
        n = np.arange(1, M, dtype=np.longdouble)
        factors[1:] = (n - 1.0 + be - al) / (n + be)
    return np.cumprod(factors).astype(np.float64)


def witness_k_values_gamma(params: WitnessParams, n) -> np.ndarray:
    """The same K_n through log-Gamma ratios; the cross-check route."""
    al, be = params.alpha, params.beta
    const = lgamma(be) - lgamma(be - al + 1.0)
    return np.exp(const + lgamma_ratio(n, be - al, be + 1.0))


def _valid_eps(s: float, eps: float) -> bool:
    try:
        params = WitnessParams.from_s_eps(s, eps)
    except ValueError:
        return False
    g, h1 = g_and_h(params, 1)
    return g > _MARGIN_G and h1 >= _MARGIN_H1


def find_epsilon(s: float) -> float:
    """Largest eps in (0, 1] keeping the pointwise certificate valid, by bisection."""
    if not 0.25 < s < s_star():
        raise NoValidEpsilonError(
            f"no valid epsilon exists outside (1/4, s*): s={s}, s*={s_star():.6f}")
    if _valid_eps(s, 1.0):
        return 1.0
    lo = 1e-12
    if not _valid_eps(s, lo):
        raise NoValidEpsilonError(f"validity conditions fail even as eps -> 0 at s={s}")
    hi = 1.0
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if _valid_eps(s, mid):
            lo = mid
        else:
            hi = mid
    return lo


def build_as_witness(s: float, M: int, eps: float | str = _AUTO) -> AsWitness:
    """Construct the certified witness; raises NoValidEpsilonError when impossible."""
    if M < 2:
        raise ValueError(f"witness length must be >= 2, got {M}")
    if eps == _AUTO:
        eps_val = find_epsilon(s)
    else:
        eps_val = float(eps)
        if not 0.25 < s < s_star():
            raise NoValidEpsilonError(
                f"no valid epsilon exists outside (1/4, s*): s={s}")
        if not _valid_eps(s, eps_val):
            raise NoValidEpsilonError(
                f"validity conditions g > 0, h(1) >= 0 fail at s={s}, eps={eps_val}")
    params = WitnessParams.from_s_eps(s, eps_val)
    K = witness_k_values(params, M)
    n = np.arange(M, dtype=float)
    x = s * (n + s) * K
    x[0] = 1.0
    return AsWitness(params=params, M=M, x=x, K=K)


def _tail_envelope(w: AsWitness) -> float:
    """Upper bound on sum_{j>=M} a_j x_j = s * sum_{j>=M} K_j.

    K_{j+1}/K_j = 1 - (alpha+1)/(j+beta+1) <= ((M+beta+1)/(j+beta+1))^(alpha+1)
    cumulatively, so the tail is at most K_M (1 + (M+beta+1)/alpha).
    """
    al, be = w.params.alpha, w.params.beta
    M = w.M
    k_m = w.K[-1] * (M - 1.0 + be - al) / (M + be)
    return w.params.s * k_m * (1.0 + (M + be + 1.0) / al)


def certify_as_witness(w: AsWitness) -> AsCertificate:
    """Check y >= (4+eps) x entrywise and report the certified Rayleigh quotient.

    The image y = A x is computed (a) in closed form through the Gamma-ratio
    identity, exact for the infinite matrix, and (b) by structured matvec
    over the truncation, which misses exactly the tail sum_{j>=M} a_j x_j.
    The two routes must agree within the analytic tail envelope.
    """
    params = w.params
    s, eps, al, be = params.s, params.eps, params.alpha, params.beta
    n = np.arange(w.M, dtype=float)
    multiplier = (n + be - al) * (n + be) / (n + s) ** 2
    y_closed = (4.0 + eps) * multiplier * w.x
    y_closed[0] = 4.0 + eps

    mat = StructuredMatrix(L, GeneratorSequence.a_s(s))
    y_mv = matvec(mat, w.x)
    tail = _tail_envelope(w)
    gap = np.abs(y_closed - y_mv)
    allowed = tail * (1.0 + 1e-6) + 1e-12 * (1.0 + np.abs(y_closed))
    if np.any(gap > allowed):
        worst = int(np.argmax(gap - allowed))
        raise InternalConsistencyError(
            f"closed-form and matvec images disagree beyond the tail bound at "
            f"n={worst}: gap={gap[worst]:.3e}, allowed={allowed[worst]:.3e}")

    pointwise_ok = bool(np.all(y_closed >= (4.0 + eps) * w.x))
    ratio = float(np.linalg.norm(y_closed) / np.linalg.norm(w.x))
    return AsCertificate(ratio=ratio, pointwise_ok=pointwise_ok, eps=eps,
                         tail_bound=tail, max_route_gap=float(gap.max()))


def as_witness_decay_band(w: AsWitness) -> tuple[float, float, float]:
    """(min, max, limit) of x_n n^alpha over the back half of the truncation.

    The limit is s Gamma(beta)/Gamma(beta-alpha+1); the band edges are
    empirical, used to confirm the expected n^(-alpha) decay.
    """
    al, be = w.params.alpha, w.params.beta
    lo = max(1, w.M // 2)
    n = np.arange(lo, w.M, dtype=float)
    scaled = w.x[lo:] * n**al
    c_inf = w.params.s * math.exp(lgamma(be) - lgamma(be - al + 1.0))
    return float(scaled.min()), float(scaled.max()), c_inf


# ---------------------------------------------------------------------------
# p-norm witness


@dataclass(frozen=True, eq=False)
class PnormWitness:
    """Entries (k+s)^(-1/p) for k <= m, zero-padded to 4(m+1) for certification."""

    s: float
    p: float
    m: int
    x: np.ndarray


@dataclass(frozen=True)
class PnormCertificate:
    ratio: float
    self_bound_ok: bool
    slack: float
    gamma: float
    xnorm_pp: float


def build_pnorm_witness(s: float, p: float, m: int) -> PnormWitness:
    if s < 1:
        raise ValueError(f"the p-norm witness needs s >= 1, got {s}")
    if not 1.0 < p < math.inf:
        raise ValueError(f"p must lie in (1, inf), got {p}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    x = np.zeros(4 * (m + 1))
    k = np.arange(m + 1, dtype=float)
    x[: m + 1] = (k + s) ** (-1.0 / p)
    return PnormWitness(s=s, p=p, m=m, x=x)


def certify_pnorm_witness(w: PnormWitness) -> PnormCertificate:
    """Certified Rayleigh quotient plus the self-validating inequality.

    ratio^p >= (pq)^p - gamma_m / ||x||_p^p  must hold (it is proved for the
    infinite image, and truncating the image only weakens the left side
    while rows 0..m are fully represented).  ratio <= pq must hold as well;
    violating it means a bug, so that direction raises.
    """
    s, p, m = w.s, w.p, w.m
    pq = pq_constant(p)
    mat = StructuredMatrix(L, GeneratorSequence.a_s(s))
    ratio = rayleigh_p(mat, w.x, p)
    if ratio > pq * (1.0 + 1e-9):
        raise InternalConsistencyError(
            f"witness Rayleigh quotient {ratio} exceeds the proven bound {pq}")
    gm = gamma_m(s, p, m)
    k = np.arange(m + 1, dtype=float)
    xnorm_pp = math.fsum(1.0 / (k + s))
    slack = ratio**p - (pq**p - gm / xnorm_pp)
    return PnormCertificate(ratio=ratio, self_bound_ok=bool(slack >= -1e-8),
                            slack=float(slack), gamma=gm, xnorm_pp=xnorm_pp)


# ---------------------------------------------------------------------------
# lacunary witness


@dataclass(frozen=True)
class LacunaryWitness:
    """Piecewise-constant vector: 1 on [0, N], N^(-n/2) on (N^n, N^(n+1)]."""

    N: int
    levels: int
    norm_sq: float  # ||x||_2^2 = 2 + (N-1) levels, exactly
    support_len: int  # N^levels + 1


@dataclass(frozen=True)
class LacunaryCertificate:
    ratio_sq: float
    bound_ok: bool
    rayleigh_bound: float
    limit: float


def build_lacunary_witness(N: int, levels: int) -> LacunaryWitness:
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    support_len = N**levels + 1  # exact integer arithmetic, any size
    return LacunaryWitness(N=N, levels=levels, norm_sq=2.0 + (N - 1.0) * levels,
                           support_len=support_len)


def lacunary_vector(w: LacunaryWitness, length: int | None = None) -> np.ndarray:
    """Materialize the vector (padded or cut to ``length``).

    Refuses absurd sizes: the closed forms below make materialization
    unnecessary for large level counts.
    """
    length = w.support_len if length is None else int(length)
    if length > _LACUNARY_MATERIALIZE_CAP:
        raise ValueError(
            f"refusing to materialize {length} entries (cap {_LACUNARY_MATERIALIZE_CAP}); "
            "use the closed-form certificate instead")
    x = np.zeros(length)
    x[: min(w.N + 1, length)] = 1.0
    for n in range(1, w.levels):
        lo, hi = w.N**n + 1, w.N ** (n + 1) + 1
        if lo >= length:
            break
        # same expression the generator uses for its entries, bit for bit
        x[lo: min(hi, length)] = float(w.N) ** (-n / 2.0)
    return x


def lacunary_y_closed(w: LacunaryWitness, n: int) -> float:
    """Image value at row N^n: y_{N^n} = (sqrt(N)+1) - (sqrt(N)-1)/sqrt(N)^n."""
    if not 1 <= n <= w.levels:
        raise ValueError(f"row level must be in [1, levels], got {n}")
    rN = math.sqrt(w.N)
    return (rN + 1.0) - (rN - 1.0) / rN**n


def lacunary_rayleigh_sq(w: LacunaryWitness) -> float:
    """||C x||^2 / ||x||^2 over the truncation N^levels + 1, in closed form."""
    ys = [lacunary_y_closed(w, n) ** 2 for n in range(1, w.levels + 1)]
    return math.fsum(ys) / w.norm_sq


def certify_lacunary_witness(w: LacunaryWitness) -> LacunaryCertificate:
    """Closed-form ratio^2 against the guaranteed Rayleigh lower bound.

    The bound ((sqrt(N)+1)^2 levels + c)/(2+(N-1) levels) with
    c = -2(sqrt(N)+1) must not exceed the exact ratio^2, and the exact
    ratio^2 must stay below the limiting value (N-1)/(sqrt(N)-1)^2.
    """
    rN = math.sqrt(w.N)
    ratio_sq = lacunary_rayleigh_sq(w)
    c = -2.0 * (rN + 1.0)
    bound = ((rN + 1.0) ** 2 * w.levels + c) / w.norm_sq
    limit = (w.N - 1.0) / (rN - 1.0) ** 2
    if ratio_sq > limit * (1.0 + 1e-12):
        raise InternalConsistencyError(
            f"lacunary ratio^2 {ratio_sq} exceeds the proven norm^2 {limit}")
    return LacunaryCertificate(ratio_sq=ratio_sq, bound_ok=bool(ratio_sq >= bound),
                               rayleigh_bound=bound, limit=limit)


def lacunary_matvec_check(w: LacunaryWitness) -> float:
    """Max relative gap between closed-form row values and the real matvec.

    Only for witnesses small enough to materialize.
    """
    x = lacunary_vector(w)
    mat = StructuredMatrix(C, GeneratorSequence.lacunary(w.N))
    y = matvec(mat, x)
    worst = 0.0
    for n in range(1, w.levels + 1):
        closed = lacunary_y_closed(w, n)
        got = y[w.N**n]
        worst = max(worst, abs(got - closed) / abs(closed))
    return worst
