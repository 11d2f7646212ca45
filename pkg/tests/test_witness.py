import math

import numpy as np
import pytest

from lnorm import (
    C,
    GeneratorSequence,
    L,
    NoValidEpsilonError,
    StructuredMatrix,
    as_witness_decay_band,
    build_as_witness,
    build_lacunary_witness,
    build_pnorm_witness,
    certify_as_witness,
    certify_lacunary_witness,
    certify_pnorm_witness,
    find_epsilon,
    lacunary_matvec_check,
    lacunary_rayleigh_sq,
    lacunary_vector,
    lacunary_y_closed,
    matvec,
    pq_constant,
    rayleigh_p,
    s_star,
    witness_k_values,
    witness_k_values_gamma,
)


class TestEpsilonSearch:
    def test_auto_epsilon_values(self):
        # frozen from the bisection against the validity conditions
        assert find_epsilon(0.28) == pytest.approx(0.27795625, abs=1e-6)
        assert find_epsilon(0.30) == pytest.approx(0.13925889, abs=1e-6)
        assert find_epsilon(0.33) == pytest.approx(0.01937825, abs=1e-6)

    def test_epsilon_shrinks_toward_s_star(self):
        eps = [find_epsilon(s) for s in (0.26, 0.29, 0.32, 0.34)]
        assert eps == sorted(eps, reverse=True)
        assert all(e > 0 for e in eps)

    def test_no_epsilon_beyond_s_star(self):
        with pytest.raises(NoValidEpsilonError):
            find_epsilon(0.36)
        with pytest.raises(NoValidEpsilonError):
            find_epsilon(s_star() + 1e-6)

    def test_no_epsilon_at_or_below_quarter(self):
        with pytest.raises(NoValidEpsilonError):
            find_epsilon(0.25)

    def test_tiny_explicit_epsilon_accepted(self):
        w = build_as_witness(0.3, 64, eps=1e-6)
        assert w.params.eps == 1e-6

    def test_oversized_explicit_epsilon_rejected(self):
        with pytest.raises(NoValidEpsilonError):
            build_as_witness(0.33, 64, eps=0.5)


class TestAsWitness:
    def test_k_seed_and_first_step(self):
        w = build_as_witness(0.3, 4, eps=0.01)
        al, be = w.params.alpha, w.params.beta
        assert w.K[0] == pytest.approx(1.0 / (be * (be - al)), rel=1e-14)
        assert w.K[1] == pytest.approx(1.0 / (be * (be + 1.0)), rel=1e-13)

    def test_x_starts_at_one_and_stays_positive(self):
        w = build_as_witness(0.3, 10**4)
        assert w.x[0] == 1.0
        assert np.all(w.x > 0)

    def test_k_recurrence_vs_log_gamma(self):
        w = build_as_witness(0.3, 10**5)
        idx = np.unique(np.geomspace(1, 10**5 - 1, 300).astype(int))
        gamma_route = witness_k_values_gamma(w.params, idx.astype(float))
        rel = np.abs(w.K[idx] - gamma_route) / gamma_route
        assert float(rel.max()) <= 1e-10

    def test_certificate_head_value(self):
        # y_0 = 4 + eps exactly
        w = build_as_witness(0.28, 2**12)
        cert = certify_as_witness(w)
        eps = w.params.eps
        y0_expected = 4.0 + eps
        n = 0
        assert cert.eps == eps
        # pointwise certificate holds at the head with equality
        assert cert.pointwise_ok
        mult0 = (n + w.params.beta - w.params.alpha) * (n + w.params.beta)
        assert y0_expected >= (4.0 + eps) * w.x[0]
        assert mult0 > 0

    def test_certificate_at_moderate_size(self):
        w = build_as_witness(0.3, 10**5)
        cert = certify_as_witness(w)
        assert cert.pointwise_ok
        assert cert.ratio > 4.0 + w.params.eps / 2.0
        assert cert.tail_bound < 1e-2
        assert cert.max_route_gap <= cert.tail_bound * (1 + 1e-6)

    def test_ratio_never_beats_analytic_upper_bound(self):
        from lnorm import f_of_s

        for s in (0.28, 0.31, 0.34):
            cert = certify_as_witness(build_as_witness(s, 2**12))
            assert cert.ratio <= max(f_of_s(s), 4.0) + 1e-8

    def test_matvec_route_close_to_closed_form(self):
        # the truncation misses exactly the tail mass, identical in every row
        w = build_as_witness(0.33, 2**10)
        mat = StructuredMatrix(L, GeneratorSequence.a_s(0.33))
        y_mv = matvec(mat, w.x)
        n = np.arange(w.M, dtype=float)
        mult = (n + w.params.beta - w.params.alpha) * (n + w.params.beta)
        y_closed = (4.0 + w.params.eps) * mult / (n + 0.33) ** 2 * w.x
        y_closed[0] = 4.0 + w.params.eps
        gaps = y_closed - y_mv
        assert np.all(gaps > 0)  # matvec only ever misses positive tail mass
        assert gaps.max() / gaps.min() < 1.0 + 1e-9  # same tail in every row

    def test_decay_band(self):
        w = build_as_witness(0.3, 10**5)
        lo, hi, c_inf = as_witness_decay_band(w)
        assert 0.5 * c_inf <= lo <= hi <= 2.0 * c_inf

    def test_rejects_tiny_m(self):
        with pytest.raises(ValueError):
            build_as_witness(0.3, 1)


class TestPnormWitness:
    def test_entries_worked_example(self):
        w = build_pnorm_witness(1.0, 2.0, 2)
        assert w.x[:3] == pytest.approx(
            [1.0, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(3.0)], rel=1e-15
        )
        assert np.all(w.x[3:] == 0.0)
        assert len(w.x) == 12  # zero padding to 4(m+1)

    def test_m_zero_single_entry(self):
        w = build_pnorm_witness(2.0, 3.0, 0)
        assert w.x[0] == pytest.approx(2.0 ** (-1.0 / 3.0), rel=1e-15)
        assert np.all(w.x[1:] == 0.0)

    def test_norm_is_partial_harmonic_mass(self):
        w = build_pnorm_witness(1.5, 2.5, 200)
        k = np.arange(201, dtype=float)
        want = math.fsum(1.0 / (k + 1.5))
        assert np.linalg.norm(w.x, 2.5) ** 2.5 == pytest.approx(want, rel=1e-12)

    def test_entries_strictly_decreasing(self):
        w = build_pnorm_witness(1.0, 1.5, 50)
        head = w.x[:51]
        assert np.all(np.diff(head) < 0)
        assert np.all(head > 0)

    def test_certificate_self_bound(self):
        w = build_pnorm_witness(1.0, 2.0, 10**4)
        cert = certify_pnorm_witness(w)
        assert cert.self_bound_ok
        assert cert.ratio < 4.0

    def test_ratio_increases_toward_limit_p3(self):
        ratios = []
        for m in (10**2, 10**3, 10**4):
            cert = certify_pnorm_witness(build_pnorm_witness(1.0, 3.0, m))
            assert cert.self_bound_ok
            ratios.append(cert.ratio)
        assert ratios == sorted(ratios)
        assert all(r < 4.5 for r in ratios)

    def test_ratio_matches_rayleigh_route(self):
        w = build_pnorm_witness(1.0, 2.0, 10**3)
        cert = certify_pnorm_witness(w)
        direct = rayleigh_p(StructuredMatrix(L, GeneratorSequence.a_s(1.0)), w.x, 2.0)
        assert cert.ratio == pytest.approx(direct, rel=1e-12)

    def test_ratio_below_pq_for_many_parameters(self):
        for p in (1.5, 2.0, 3.0, 4.0):
            for s in (1.0, 2.0):
                cert = certify_pnorm_witness(build_pnorm_witness(s, p, 500))
                assert cert.ratio <= pq_constant(p) * (1.0 + 1e-9)
                assert cert.self_bound_ok

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            build_pnorm_witness(0.5, 2.0, 10)
        with pytest.raises(ValueError):
            build_pnorm_witness(1.0, 1.0, 10)
        with pytest.raises(ValueError):
            build_pnorm_witness(1.0, 2.0, -1)


class TestLacunaryWitness:
    def test_norm_sq_closed_form(self):
        w = build_lacunary_witness(2, 3)
        assert w.norm_sq == 5.0
        x = lacunary_vector(w)
        assert float(x @ x) == pytest.approx(5.0, rel=1e-12)

    def test_norm_sq_direct_summation(self):
        for N, levels in ((2, 6), (3, 4), (5, 3)):
            w = build_lacunary_witness(N, levels)
            x = lacunary_vector(w)
            assert math.fsum((x * x).tolist()) == pytest.approx(w.norm_sq, rel=1e-12)

    def test_vector_blocks(self):
        w = build_lacunary_witness(2, 3)
        x = lacunary_vector(w)
        assert x.tolist() == [1, 1, 1] + [2 ** -0.5] * 2 + [0.5] * 4

    def test_y_closed_matches_matvec(self):
        for levels in (2, 4, 6):
            w = build_lacunary_witness(2, levels)
            assert lacunary_matvec_check(w) <= 1e-12

    def test_y_closed_matches_matvec_other_N(self):
        assert lacunary_matvec_check(build_lacunary_witness(3, 4)) <= 1e-12
        assert lacunary_matvec_check(build_lacunary_witness(5, 3)) <= 1e-12

    def test_certificate_bound_holds(self):
        for N in (2, 3, 4, 5):
            for levels in (8, 16, 32):
                cert = certify_lacunary_witness(build_lacunary_witness(N, levels))
                assert cert.bound_ok
                assert cert.ratio_sq <= cert.limit

    def test_gap_to_limit_within_exact_correction(self):
        # limit - ratio^2 <= 2 sqrt(N) (sqrt(N)+1)^2 / ((N-1) ||x||^2), the
        # gap implied by the constant-c correction of the Rayleigh bound
        for N in (2, 3, 4, 5):
            rN = math.sqrt(N)
            for levels in (8, 16, 32):
                w = build_lacunary_witness(N, levels)
                gap = (N - 1.0) / (rN - 1.0) ** 2 - lacunary_rayleigh_sq(w)
                cap = 2.0 * rN * (rN + 1.0) ** 2 / ((N - 1.0) * w.norm_sq)
                assert 0.0 < gap <= cap

    def test_row_values(self):
        w = build_lacunary_witness(4, 5)
        assert lacunary_y_closed(w, 1) == pytest.approx(3.0 - 1.0 / 2.0, rel=1e-15)

    def test_huge_levels_never_materialize(self):
        w = build_lacunary_witness(2, 50)
        assert w.support_len == 2**50 + 1
        ratio_sq = lacunary_rayleigh_sq(w)
        assert ratio_sq < (2 - 1) / (math.sqrt(2) - 1) ** 2
        with pytest.raises(ValueError):
            lacunary_vector(w)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            build_lacunary_witness(1, 3)
        with pytest.raises(ValueError):
            build_lacunary_witness(2, 0)
