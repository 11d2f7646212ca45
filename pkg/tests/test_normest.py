import math

import numpy as np
import pytest

from lnorm import (
    C,
    CTR,
    GeneratorSequence,
    L,
    StructuredMatrix,
    build_as_witness,
    build_pnorm_witness,
    lacunary_norm,
    lacunary_rayleigh_sq,
    lacunary_vector,
    build_lacunary_witness,
    log_fit_extrapolation,
    materialize_dense,
    matvec,
    norm2_power,
    normp_boyd,
    pq_constant,
    rayleigh_p,
    truncation_sweep,
)

AS1 = StructuredMatrix(L, GeneratorSequence.a_s(1.0))


def brute_force_sigma(mat, M, iters=10**5):
    """Dense power iteration on the explicit Gram matrix; the slow oracle."""
    dense = materialize_dense(mat, M)
    gram = dense.T @ dense
    x = np.full(M, 1.0 / math.sqrt(M))
    for _ in range(iters):
        y = gram @ x
        n = np.linalg.norm(y)
        if n == 0.0:
            return 0.0
        x = y / n
    return math.sqrt(float(x @ gram @ x))


class TestNorm2Power:
    def test_one_by_one(self):
        est = norm2_power(AS1, 1)
        assert est.value == pytest.approx(1.0, abs=1e-12)
        assert est.truncation == 1

    def test_norm_dominates_largest_entry(self):
        mat = StructuredMatrix(L, GeneratorSequence.a_s(0.1))
        for M in (1, 8, 64):
            est = norm2_power(mat, M, tol=1e-12)
            assert est.value >= 10.0 - 1e-12

    def test_sweep_monotone_below_four(self):
        ests = truncation_sweep(AS1, 2.0, [2**8, 2**10, 2**12])
        values = [e.value for e in ests]
        assert values == sorted(values)
        assert all(a < b for a, b in zip(values, values[1:]))
        assert all(v < 4.0 for v in values)

    def test_sweep_above_plateau_onset(self):
        # s = 0.6 sits in the region where the norm is exactly 4; truncations
        # stay strictly under it while climbing
        mat = StructuredMatrix(L, GeneratorSequence.a_s(0.6))
        ests = truncation_sweep(mat, 2.0, [2**6, 2**8, 2**10, 2**12])
        values = [e.value for e in ests]
        assert values == sorted(values)
        assert all(v < 4.0 for v in values)

    def test_matches_dense_oracle(self):
        for shape, gen, M in [
            (L, GeneratorSequence.a_s(1.0), 48),
            (L, GeneratorSequence.a_s(0.3), 64),
            (C, GeneratorSequence.cesaro(1.0), 64),
            (CTR, GeneratorSequence.cesaro(2.0), 32),
            (C, GeneratorSequence.lacunary(2), 64),
            (L, GeneratorSequence.custom([0.9, 0.5, 0.1, 0.05]), 16),
        ]:
            mat = StructuredMatrix(shape, gen)
            est = norm2_power(mat, M, tol=1e-13)
            want = brute_force_sigma(mat, M, iters=2000)
            assert est.value == pytest.approx(want, rel=1e-8)

    def test_lower_certificate_not_above_value(self):
        est = norm2_power(AS1, 256)
        assert est.lower_certificate <= est.value + 1e-15

    def test_random_rayleigh_never_beats_estimate(self):
        rng = np.random.default_rng(8)
        est = norm2_power(AS1, 128, tol=1e-13)
        for _ in range(50):
            x = rng.uniform(0.0, 1.0, 128)
            assert rayleigh_p(AS1, x, 2.0) <= est.value + 1e-10

    def test_witness_start_vector_certifies_above_four(self):
        # at s = 0.3 the truncated norm already exceeds 4 at moderate M;
        # seeding with the certified witness gets there in a handful of steps
        mat = StructuredMatrix(L, GeneratorSequence.a_s(0.3))
        M = 2**15
        w = build_as_witness(0.3, M)
        est = norm2_power(mat, M, start=w.x)
        assert est.value > 4.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            norm2_power(AS1, 0)
        with pytest.raises(ValueError):
            norm2_power(AS1, 4, tol=0.0)
        with pytest.raises(ValueError):
            norm2_power(AS1, 4, start=np.ones(3))


class TestBoydIteration:
    def test_p_two_agrees_with_power_iteration(self):
        tol = 1e-10
        a = norm2_power(AS1, 256, tol=tol)
        b = normp_boyd(AS1, 256, 2.0, tol=tol)
        assert b.value == pytest.approx(a.value, abs=10 * tol)

    def test_values_stay_below_pq(self):
        for s in (1.0, 2.0, 5.0):
            mat = StructuredMatrix(L, GeneratorSequence.a_s(s))
            for p in (1.5, 2.0, 3.0, 4.0):
                limit = pq_constant(p)
                ests = truncation_sweep(mat, p, [2**6, 2**8, 2**10])
                assert all(e.value < limit for e in ests)
                vals = [e.value for e in ests]
                assert vals == sorted(vals)

    def test_cesaro_approaches_conjugate_from_below(self):
        mat = StructuredMatrix(C, GeneratorSequence.cesaro(1.0))
        ests = truncation_sweep(mat, 2.0, [2**8, 2**11, 2**14])
        vals = [e.value for e in ests]
        assert vals == sorted(vals)
        assert all(v < 2.0 for v in vals)
        assert vals[-1] > 1.8

    def test_transpose_duality(self):
        # ||C^tr||_p equals ||C||_q for the finite truncation
        for p in (1.5, 3.0):
            q = p / (p - 1.0)
            v1 = normp_boyd(
                StructuredMatrix(CTR, GeneratorSequence.cesaro(1.0)), 256, p
            ).value
            v2 = normp_boyd(
                StructuredMatrix(C, GeneratorSequence.cesaro(1.0)), 256, q
            ).value
            assert v1 == pytest.approx(v2, abs=1e-6)

    def test_dominated_by_terraced_pair(self):
        gen = GeneratorSequence.a_s(0.7)
        for p in (2.0, 3.0):
            a = normp_boyd(StructuredMatrix(L, gen), 256, p).value
            c = normp_boyd(StructuredMatrix(C, gen), 256, p).value
            ctr = normp_boyd(StructuredMatrix(CTR, gen), 256, p).value
            assert a <= c + ctr + 1e-9

    def test_zero_matrix(self):
        mat = StructuredMatrix(C, GeneratorSequence.custom([0.0]))
        est = normp_boyd(mat, 8, 3.0)
        assert est.value == 0.0

    def test_rejects_bad_p_and_negative_entries(self):
        with pytest.raises(ValueError):
            normp_boyd(AS1, 8, 1.0)
        with pytest.raises(ValueError):
            normp_boyd(AS1, 8, math.inf)
        neg = StructuredMatrix(C, GeneratorSequence.custom([1.0, -0.2]))
        with pytest.raises(ValueError):
            normp_boyd(neg, 4, 3.0)


class TestRayleigh:
    def test_identity_like_case(self):
        mat = StructuredMatrix(C, GeneratorSequence.custom([1.0, 0.0, 0.0]))
        assert rayleigh_p(mat, np.array([1.0, 0.0, 0.0]), 2.0) == 1.0

    def test_pnorm_witness_band(self):
        w = build_pnorm_witness(1.0, 2.0, 10**4)
        value = rayleigh_p(StructuredMatrix(L, GeneratorSequence.a_s(1.0)), w.x, 2.0)
        assert 3.0 < value < 4.0

    def test_lacunary_extremal_vector_two_routes(self):
        # materialized Rayleigh quotient against the closed-form evaluation
        w = build_lacunary_witness(2, 12)
        x = lacunary_vector(w)
        mat = StructuredMatrix(C, GeneratorSequence.lacunary(2))
        direct = rayleigh_p(mat, x, 2.0)
        closed = math.sqrt(lacunary_rayleigh_sq(w))
        assert direct == pytest.approx(closed, rel=1e-12)
        assert direct == pytest.approx(2.1606823249906353, rel=1e-10)
        assert direct < lacunary_norm(2)

    def test_lacunary_ratio_grows_with_levels(self):
        r12 = lacunary_rayleigh_sq(build_lacunary_witness(2, 12))
        r24 = lacunary_rayleigh_sq(build_lacunary_witness(2, 24))
        assert r24 > r12

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            rayleigh_p(AS1, np.zeros(4), 2.0)


class TestSweepPlumbing:
    def test_single_size(self):
        ests = truncation_sweep(AS1, 2.0, [64])
        assert len(ests) == 1

    def test_rejects_unsorted_sizes(self):
        with pytest.raises(ValueError):
            truncation_sweep(AS1, 2.0, [64, 64])
        with pytest.raises(ValueError):
            truncation_sweep(AS1, 2.0, [128, 64])
        with pytest.raises(ValueError):
            truncation_sweep(AS1, 2.0, [])

    def test_threaded_matches_serial(self):
        sizes = [2**6, 2**7, 2**8, 2**9]
        serial = truncation_sweep(AS1, 2.0, sizes, threads=1)
        threaded = truncation_sweep(AS1, 2.0, sizes, threads=4)
        assert [e.value for e in serial] == [e.value for e in threaded]

    def test_extrapolation_heuristic(self):
        ests = truncation_sweep(AS1, 2.0, [2**7, 2**9, 2**11, 2**13])
        fit = log_fit_extrapolation(ests)
        # exploratory: should land in the right neighbourhood of the limit 4
        assert 3.0 < fit < 5.0
        assert log_fit_extrapolation(ests[:2]) is None

    def test_env_tolerance_override(self, monkeypatch):
        monkeypatch.setenv("LNORM_MAX_ITER", "3")
        est = norm2_power(AS1, 256, tol=1e-14)
        assert est.iterations == 3
        assert est.residual > 1e-14
