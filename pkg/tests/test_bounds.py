import numpy as np
import pytest

from trish import (
    ConfigurationError,
    complexity_budget,
    complexity_params_check,
    nonconvex_fixed_bound,
    pl_fixed_envelope,
    pl_geometric_envelope,
    pl_sublinear_envelope,
    pl_sublinear_fixed_gamma_envelope,
)
from trish.bounds import (
    pl_fixed_constants,
    pl_geometric_constants,
    pl_sublinear_constants,
    pl_sublinear_fixed_gamma_constants,
)


class TestNonconvexFixedBound:
    def test_direct_substitution(self):
        # (1/10)(8/0.1)(1) + (8 - 1)(1) = 8 + 7
        assert nonconvex_fixed_bound(10, 1.0, 1.0, 0.1, 1.0, 1.0, 0.0) == pytest.approx(15.0)

    def test_zero_variance_floor(self):
        assert nonconvex_fixed_bound(10**9, 1.0, 1.0, 0.1, 0.0, 1.0, 0.0) == pytest.approx(
            0.0, abs=1e-6)

    def test_equal_gammas_floor_is_7mg(self):
        val = nonconvex_fixed_bound(10**12, 1.0, 1.0, 0.1, 2.0, 1.0, 0.0)
        assert val == pytest.approx(14.0, rel=1e-3)


class TestPLFixedEnvelope:
    def test_theta_value(self):
        consts = pl_fixed_constants(1.0, 1.0, 0.1, 1.0, 1.0)
        assert consts.theta == pytest.approx(3.5)  # 4 (1 - 1/8)

    def test_zero_variance_pure_decay(self):
        vals = [pl_fixed_envelope(k, 1.0, 1.0, 0.1, 0.0, 1.0, 8.0) for k in (1, 50, 2000)]
        assert vals[0] == pytest.approx(8.0)
        assert vals[1] < vals[0] and vals[2] < vals[1]
        assert vals[2] == pytest.approx(8.0 * (1 - 0.025) ** 1999, rel=1e-9)

    def test_limit_is_theta(self):
        theta = pl_fixed_constants(2.0, 1.0, 0.01, 1.0, 1.0).theta
        assert pl_fixed_envelope(10**7, 2.0, 1.0, 0.01, 1.0, 1.0, 50.0) == pytest.approx(theta)

    def test_k1_equals_gap0(self):
        assert pl_fixed_envelope(1, 2.0, 1.0, 0.01, 1.0, 1.0, 42.0) == pytest.approx(42.0)

    def test_precondition_enforced(self):
        with pytest.raises(ConfigurationError):
            pl_fixed_envelope(1, 1.0, 1.0, 10.0, 1.0, 1.0, 1.0)


class TestPLSublinearEnvelope:
    def test_gap0_branch_dominates(self):
        consts = pl_sublinear_constants(4.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1e-9, 100.0)
        assert consts.phi == pytest.approx(2.0 * 100.0)

    def test_delta2_value(self):
        # eta=1, gamma1=1, L+M=2, M_g=1: delta2 = (3 + 2)/2
        consts = pl_sublinear_constants(4.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5, 0.5, 1.0, 0.0)
        assert consts.delta2 == pytest.approx(2.5)

    def test_noise_branch_formula(self):
        # delta1 = 1, delta2 = 1, a = 4, b = 1, gap0 = 0: phi = 16 / 3
        consts = pl_sublinear_constants(
            a=4.0, b=1.0, eta=1.0 / 3.0, gamma1=1.0, gamma2_first=2.0, c=1.0,
            grad_lipschitz=1.0, m_h=0.0, m_g=1.0, gap0=0.0)
        assert consts.delta1 == pytest.approx(1.0)
        assert consts.delta2 == pytest.approx(1.0)
        assert consts.phi == pytest.approx(16.0 / 3.0)

    def test_infeasible_a_raises(self):
        with pytest.raises(ConfigurationError):
            pl_sublinear_envelope(1, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)


class TestPLSublinearFixedGamma:
    def test_proof_coefficient(self):
        consts = pl_sublinear_fixed_gamma_constants(8.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0)
        assert consts.delta2 == pytest.approx(7.0 / 8.0)  # gamma1^2/gamma2 - gamma2/8
        assert consts.delta1 == pytest.approx(0.25)
        assert consts.delta1 * 8.0 - 1.0 == pytest.approx(1.0)

    def test_zero_variance_gap_branch(self):
        consts = pl_sublinear_fixed_gamma_constants(8.0, 3.0, 1.0, 1.0, 0.0, 1.0, 5.0)
        assert consts.phi == pytest.approx(4.0 * 5.0)


class TestPLGeometricEnvelope:
    def test_rho_value(self):
        consts = pl_geometric_constants(1.0, 1.0, 0.8, 1.0, 1.0, 0.5, 1.0)
        assert consts.rho == pytest.approx(0.9)  # max{1 - c alpha/8, zeta}

    def test_k1_is_omega_and_dominates_gap0(self):
        consts = pl_geometric_constants(1.0, 1.0, 0.1, 1.0, 1.0, 0.5, 1.0)
        assert consts.kappa2 == pytest.approx(7.0 / 8.0)
        assert consts.omega == pytest.approx(7.0)  # kappa2/(c kappa1) >= gap0
        assert pl_geometric_envelope(1, 1.0, 1.0, 0.1, 1.0, 1.0, 0.5, 1.0) == pytest.approx(7.0)

    def test_rho_out_of_range_raises(self):
        with pytest.raises(ConfigurationError):
            pl_geometric_envelope(1, 1.0, 1.0, 0.0, 1.0, 1.0, 0.5, 1.0)


class TestComplexityChecks:
    def test_high_precision_example(self):
        # 50-digit evaluation of 0.99^4 - 0.01/0.99 - 0.01/0.99^2
        # - 2/(3*0.99^3) = 0.2532185246406760... >= 1/6
        lhs = 0.99**4 - 0.01 / 0.99 - 0.01 / 0.99**2 - 2.0 / (3.0 * 0.99**3)
        assert lhs == pytest.approx(0.25321852464067605, rel=1e-12)
        assert complexity_params_check(0.99, 0.99, 0.99, 0.01, 0.01)

    def test_small_lambda3_fails(self):
        # 2/(3 * 0.125) = 16/3 dominates everything
        assert not complexity_params_check(0.5, 0.5, 0.5, 0.01, 0.01)

    def test_near_limit_case(self):
        # lambda -> 1, mu -> 0 gives LHS -> 1/3 >= 1/6
        assert complexity_params_check(1 - 1e-9, 1 - 1e-9, 1 - 1e-9, 0.0, 0.0)

    def test_budget_values(self):
        assert complexity_budget(1.0, 1.0, 1.0) == 3
        assert complexity_budget(0.25, 1.0, 1.0) == 24  # 3 * 8
        assert complexity_budget(0.37, 2.0, 0.0) == 0

    def test_parameter_ranges(self):
        with pytest.raises(ConfigurationError):
            complexity_params_check(1.2, 0.9, 0.9, 0.0, 0.0)
        with pytest.raises(ConfigurationError):
            complexity_params_check(0.9, 0.9, 0.9, 0.2, 0.0)


class TestEnvelopeInvariants:
    def test_all_envelopes_nonincreasing(self):
        ks = np.arange(1, 3000, 7)
        fixed = [pl_fixed_envelope(int(k), 2.0, 1.0, 0.01, 1.0, 1.0, 100.0) for k in ks]
        merging = [pl_sublinear_envelope(int(k), 3.0, 135.0, 1.0, 1.0, 0.99, 1.0,
                                         10.0, 0.5, 1.0, 10.0) for k in ks]
        sub = [pl_sublinear_fixed_gamma_envelope(int(k), 20.0, 799.0, 1.0, 1.0, 1.0,
                                                 1.0, 10.0) for k in ks]
        geom = [pl_geometric_envelope(int(k), 1.0, 1.0, 0.025, 1.0, 1.0, 0.5, 10.0)
                for k in ks]
        for seq in (fixed, merging, sub, geom):
            assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))

    def test_linear_scaling_in_mg(self):
        t1 = pl_fixed_constants(2.0, 1.0, 0.01, 1.0, 1.0).theta
        t3 = pl_fixed_constants(2.0, 1.0, 0.01, 3.0, 1.0).theta
        assert t3 == pytest.approx(3.0 * t1)
        w1 = pl_geometric_constants(1.0, 1.0, 0.1, 1.0, 1.0, 0.5, 0.0).omega
        w2 = pl_geometric_constants(1.0, 1.0, 0.1, 2.0, 1.0, 0.5, 0.0).omega
        assert w2 == pytest.approx(2.0 * w1)
