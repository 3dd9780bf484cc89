import math

import numpy as np
import pytest

from klms.errors import ConfigurationError
from klms.estimator import KernelExpansion
from klms.risk import (RiskReport, TargetFunction, excess_risk_closed,
                       excess_risk_finite_dim, excess_risk_fourier,
                       excess_risk_mc, kernel_target_inner, risk_report,
                       target_norm_sq)

EMPTY = KernelExpansion(np.zeros(0), np.zeros(0))


def random_expansion(rng, max_centers=50):
    n = int(rng.integers(1, max_centers + 1))
    return KernelExpansion(rng.random(n), rng.uniform(-1.0, 1.0, n))


class TestTargetNorm:
    def test_exact_values(self):
        assert target_norm_sq(1) == pytest.approx(1 / 12, abs=1e-17)
        assert target_norm_sq(2) == pytest.approx(1 / 180, abs=1e-18)
        assert target_norm_sq(3) == pytest.approx(1 / 840, abs=1e-18)

    def test_parseval_cross_check(self):
        # 2 (k!)^2 sum_j (2 pi j)^{-2k}
        j = np.arange(1, 10**6, dtype=float)
        for k in (1, 2, 3):
            parseval = 2.0 * math.factorial(k) ** 2 * np.sum((2 * np.pi * j) ** (-2 * k))
            tol = 1e-7 if k == 1 else 1e-12
            assert target_norm_sq(k) == pytest.approx(parseval, abs=tol)

    def test_target_function_wrapper(self):
        t = TargetFunction(2)
        assert t.norm_sq == pytest.approx(1 / 180)
        assert t(1.25) == pytest.approx(t(0.25), abs=1e-15)


class TestKernelTargetInner:
    def test_known_values(self):
        assert kernel_target_inner(1, 2, 0.0) == pytest.approx(1 / 360, abs=1e-15)
        assert kernel_target_inner(1, 1, 0.5) == pytest.approx(0.0, abs=1e-16)

    def test_fourier_oracle(self):
        # independent inner product: sum_j a_j(K_x) a_j(B_k) + b_j(K_x) b_j(B_k)
        J = 10**5
        j = np.arange(1, J + 1, dtype=float)
        omega = 2 * np.pi * j
        rng = np.random.default_rng(0)
        for m in (1, 2):
            for k in (1, 2, 3):
                kfac = math.factorial(k)
                for x in rng.random(3):
                    a_kx = np.sqrt(2.0) * omega ** (-2.0 * m) * np.cos(omega * x)
                    b_kx = np.sqrt(2.0) * omega ** (-2.0 * m) * np.sin(omega * x)
                    t_c = -np.sqrt(2.0) * kfac * math.cos(k * np.pi / 2) / omega**k
                    t_s = -np.sqrt(2.0) * kfac * math.sin(k * np.pi / 2) / omega**k
                    oracle = float(np.sum(a_kx * t_c + b_kx * t_s))
                    assert kernel_target_inner(m, k, x) == pytest.approx(
                        oracle, abs=1e-9), (m, k, x)

    def test_vectorized(self):
        xs = np.linspace(0, 1, 5, endpoint=False)
        vec = kernel_target_inner(2, 3, xs)
        for x, v in zip(xs, vec):
            assert v == pytest.approx(kernel_target_inner(2, 3, float(x)), abs=1e-16)


class TestClosedForm:
    def test_empty_expansion_gives_target_norm(self):
        assert excess_risk_closed(EMPTY, 1, 2) == pytest.approx(1 / 180, abs=1e-15)
        assert excess_risk_closed(EMPTY, 1, 1) == pytest.approx(1 / 12, abs=1e-15)

    def test_three_way_agreement(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            m = int(rng.integers(1, 3))
            k = int(rng.integers(1, 4))
            exp = random_expansion(rng)
            closed = excess_risk_closed(exp, m, k)
            assert closed == pytest.approx(
                excess_risk_fourier(exp, m, k, 10**5), abs=1e-8)
            assert closed == pytest.approx(
                excess_risk_mc(exp, m, k, 10**5), abs=1e-5)

    def test_non_negative(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            exp = random_expansion(rng, max_centers=20)
            assert excess_risk_closed(exp, 1, 2) >= -1e-10

    def test_precomputed_paths_match(self):
        from klms.kernels import PeriodicSplineKernel
        rng = np.random.default_rng(29)
        exp = random_expansion(rng, max_centers=20)
        k2 = PeriodicSplineKernel(2)
        full = excess_risk_closed(exp, 2, 1)
        cached = excess_risk_closed(
            exp, 2, 1,
            doubled_gram=k2.doubled_gram(exp.centers),
            inner=kernel_target_inner(2, 1, exp.centers))
        assert cached == pytest.approx(full, abs=1e-16)


class TestFourierOracle:
    def test_zero_expansion_parseval(self):
        assert excess_risk_fourier(EMPTY, 1, 2, 10**5) == pytest.approx(1 / 180, abs=1e-10)

    def test_bare_partial_sums_monotone_in_J(self):
        exp = KernelExpansion(np.array([0.37]), np.array([0.8]))
        vals = [excess_risk_fourier(exp, 1, 2, J, include_target_tail=False)
                for J in (1, 10, 100)]
        assert vals[0] <= vals[1] <= vals[2]
        assert vals[2] <= excess_risk_closed(exp, 1, 2) + 1e-12

    def test_k1_needs_tail(self):
        # the k = 1 target tail beyond 1e5 frequencies is ~5e-7 and the
        # corrected oracle absorbs it
        bare = excess_risk_fourier(EMPTY, 1, 1, 10**5, include_target_tail=False)
        full = excess_risk_fourier(EMPTY, 1, 1, 10**5)
        assert abs(bare - 1 / 12) > 1e-8
        assert full == pytest.approx(1 / 12, abs=1e-10)


class TestQuadratureOracle:
    def test_zero_expansion(self):
        assert excess_risk_mc(EMPTY, 1, 1, 10**5) == pytest.approx(1 / 12, abs=1e-6)

    def test_perfect_fit_is_zero(self):
        # expansion equal to the target cannot be built finitely; a zero
        # target difference can: fit nothing against B_k and subtract
        got = excess_risk_mc(EMPTY, 2, 2, 10**4)
        assert got - target_norm_sq(2) == pytest.approx(0.0, abs=1e-8)

    def test_rejects_small_grid(self):
        with pytest.raises(ConfigurationError):
            excess_risk_mc(EMPTY, 1, 1, 10)


class TestFiniteDimRisk:
    def test_zero_distance(self):
        theta = np.array([1.0, 2.0])
        assert excess_risk_finite_dim(theta, theta, np.eye(2)) == 0.0

    def test_identity_covariance_unit_vector(self):
        assert excess_risk_finite_dim(
            np.array([1.0, 0.0]), np.array([0.0, 0.0]), np.eye(2)) == pytest.approx(1.0)

    def test_naive_triple_loop(self):
        rng = np.random.default_rng(31)
        d = 6
        a = rng.standard_normal((d, d))
        cov = a @ a.T
        t1, t2 = rng.standard_normal(d), rng.standard_normal(d)
        naive = sum((t1[i] - t2[i]) * cov[i, j] * (t1[j] - t2[j])
                    for i in range(d) for j in range(d))
        assert excess_risk_finite_dim(t1, t2, cov) == pytest.approx(naive, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            excess_risk_finite_dim(np.zeros(2), np.zeros(3), np.eye(3))


class TestRiskReport:
    def test_clamps_tiny_negative(self):
        rep = RiskReport(-1e-14, "closed")
        assert rep.excess_risk == 0.0

    def test_rejects_large_negative(self):
        with pytest.raises(ValueError):
            RiskReport(-1e-3, "closed")

    def test_wrapper_methods_agree(self):
        rng = np.random.default_rng(37)
        exp = random_expansion(rng, max_centers=10)
        closed = risk_report(exp, 1, 2, "closed")
        fourier = risk_report(exp, 1, 2, "fourier")
        assert closed.excess_risk == pytest.approx(fourier.excess_risk, abs=1e-8)
        with pytest.raises(ConfigurationError):
            risk_report(exp, 1, 2, "exact")
