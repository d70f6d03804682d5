import numpy as np
import pytest

from trish import NoiseModel, make_quadratic
from trish.harness.grid import (
    GridSpec,
    baseline_gradient_norm,
    build_grid,
    tune,
)

# exponent sets used for the image-classification tuning round
FASHION_SPEC = GridSpec(
    lambda_exponents=tuple(-1.0 + i / 7.0 for i in range(8)),
    a_exponents=(2.0, 4.0),
    b_exponents=(1.0, 3.0),
)
G_REFERENCE = 1.5644


class TestBuildGrid:
    def test_reported_gamma_values(self):
        grid = build_grid(G_REFERENCE, FASHION_SPEC)
        gamma1s = sorted({g1 for _, g1, _ in grid.trish_settings})
        gamma2s = sorted({g2 for _, _, g2 in grid.trish_settings})
        # reported echoes carry up to 2 units of rounding in the 4th decimal
        assert gamma1s == pytest.approx([2.5568, 10.2274], abs=2e-4)
        assert gamma2s == pytest.approx([0.07990, 0.3196], abs=2e-4)

    def test_sg_range_and_count(self):
        grid = build_grid(G_REFERENCE, FASHION_SPEC)
        assert len(grid.sg_stepsizes) == 32 == len(grid.trish_settings)
        assert grid.sg_stepsizes[0] == pytest.approx(0.00799, abs=2e-4)
        assert grid.sg_stepsizes[-1] == pytest.approx(10.2275, abs=2e-4)
        # log-uniform: constant ratio between consecutive stepsizes
        ratios = np.diff(np.log(grid.sg_stepsizes))
        assert np.allclose(ratios, ratios[0])

    def test_fairness_rule_for_any_spec(self):
        spec = GridSpec((-2.0, -1.0, 0.0), (1.0,), (0.0, 2.0))
        grid = build_grid(3.7, spec)
        assert len(grid.sg_stepsizes) == len(grid.trish_settings) == spec.sg_count

    def test_invalid_g_rejected(self):
        from trish.core import ConfigurationError
        with pytest.raises(ConfigurationError):
            build_grid(0.0, FASHION_SPEC)


class TestBaselineG:
    def test_deterministic_across_invocations(self):
        prob = make_quadratic(5, 1.0, 4.0, seed=2)
        noise = NoiseModel(kind="bounded", m_g=0.5)
        g1 = baseline_gradient_norm(prob, noise, 50, seed=7, x0=np.ones(5))
        g2 = baseline_gradient_norm(prob, noise, 50, seed=7, x0=np.ones(5))
        assert g1 == g2 > 0

    def test_zero_norm_edge_case_warns(self, caplog):
        prob = make_quadratic(3, 1.0, 2.0, seed=2)
        with caplog.at_level("WARNING", logger="trish.harness.grid"):
            g = baseline_gradient_norm(prob, NoiseModel(), 10, seed=0,
                                       x0=prob.x_star)
        assert g == 0.0
        assert any("zero" in rec.message for rec in caplog.records)


class TestTune:
    def test_single_setting_grid(self):
        prob = make_quadratic(3, 1.0, 2.0, seed=5)
        grid = build_grid(1.0, GridSpec((-1.0,), (1.0,), (1.0,)))
        result = tune(prob, "trish1", grid, seeds=[0], iterations=20,
                      noise=NoiseModel(kind="bounded", m_g=0.1))
        assert result.best.setting == {
            "alpha": 0.1, "gamma1": 2.0, "gamma2": 0.5}

    def test_selects_optimal_sg_stepsize_on_isotropic_quadratic(self):
        # zero noise, A = I: stepsize 1/L_g = 1 reaches the minimizer in one
        # step, so it must win the leaderboard
        prob = make_quadratic(4, 1.0, 1.0, seed=6)
        from trish.harness.grid import HyperGrid
        grid = HyperGrid(trish_settings=(), sg_stepsizes=(0.3, 1.0, 1.6),
                         baseline_g=1.0)
        result = tune(prob, "sg", grid, seeds=[0, 1], iterations=15,
                      noise=NoiseModel(), x0=np.ones(4))
        assert result.best.setting["alpha"] == 1.0
        assert result.best.mean_loss == pytest.approx(prob.f_min, abs=1e-20)

    def test_leaderboard_is_order_invariant(self):
        prob = make_quadratic(3, 1.0, 3.0, seed=8)
        from trish.harness.grid import HyperGrid
        settings = ((0.1, 2.0, 1.0), (0.05, 2.0, 1.0), (0.1, 4.0, 1.0))
        g1 = HyperGrid(trish_settings=settings, sg_stepsizes=(), baseline_g=1.0)
        g2 = HyperGrid(trish_settings=settings[::-1], sg_stepsizes=(), baseline_g=1.0)
        kwargs = dict(seeds=[0, 1], iterations=25,
                      noise=NoiseModel(kind="bounded", m_g=0.2))
        r1 = tune(prob, "trish1", g1, **kwargs)
        r2 = tune(prob, "trish1", g2, **kwargs)
        assert [e.setting for e in r1.leaderboard] == [e.setting for e in r2.leaderboard]
