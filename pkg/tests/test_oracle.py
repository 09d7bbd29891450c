import math

import numpy as np
import pytest

from cartel_fringe import TABLE1, select_strategy
from cartel_fringe.model import validate
from cartel_fringe.oracle import (
    check_deter_quadrature,
    check_limit_phase_quadrature,
    check_share_riemann,
    check_stock_balance,
    discounted_trapezoid,
    discretized_profit,
    draw_params,
    optimize_discrete_control,
    quadrature,
    run_oracle,
    verify_fringe_nash,
    verify_share_optimality,
)
from cartel_fringe.phases import share_bounds, share_control
from cartel_fringe.strategy import profit_share

T_F = 22.125
T_C = 57.78540565788742


class TestQuadrature:
    def test_exponential(self):
        assert quadrature(lambda t: math.exp(-t), 0.0, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)

    def test_empty_interval(self):
        assert quadrature(math.exp, 2.0, 2.0) == 0.0

    def test_reversed_interval(self):
        with pytest.raises(ValueError):
            quadrature(math.exp, 1.0, 0.0)

    def test_deter_profit(self):
        rep = check_deter_quadrature(TABLE1)
        assert rep.passed and rep.oracle == pytest.approx(35635, rel=5e-3)

    def test_limit_phase(self):
        rep = check_limit_phase_quadrature(TABLE1)
        assert rep.passed and rep.oracle == pytest.approx(29350, rel=1e-3)

    def test_riemann_cross_check(self):
        rep = check_share_riemann(TABLE1)
        assert rep.passed and rep.gap < 1e-6


class TestDiscountedTrapezoid:
    def test_linear_is_exact(self):
        t = np.array([0.0, 1.0, 1.0, 4.0])
        y = np.array([2.0, 3.0, 5.0, -1.0])
        r = 0.3
        exact = quadrature(lambda s: math.exp(-r * s) * (2 + s), 0, 1) + quadrature(
            lambda s: math.exp(-r * s) * (5 - 2 * (s - 1)), 1, 4
        )
        assert discounted_trapezoid(t, y, r) == pytest.approx(exact, rel=1e-13)

    def test_zero_rate(self):
        assert discounted_trapezoid([0.0, 2.0], [1.0, 3.0], 0.0) == pytest.approx(4.0)

    def test_rejects_decreasing_times(self):
        with pytest.raises(ValueError):
            discounted_trapezoid([1.0, 0.0], [1.0, 1.0], 0.1)


class TestShareOptimality:
    def test_present_value_closed_form_is_optimal(self):
        rep = verify_share_optimality(TABLE1, n_steps=500, n_starts=3, seed=1, convention="present_value")
        assert rep.passed
        assert rep.gap <= 0

    def test_default_closed_form_falls_short(self):
        # the brute-force optimum coincides with the present-value closed form instead
        rep = verify_share_optimality(TABLE1, n_steps=500, n_starts=3, seed=1)
        assert not rep.passed
        assert rep.gap == pytest.approx(2.76e-3, rel=0.02)
        pv = profit_share(TABLE1, "present_value").profit
        assert rep.oracle == pytest.approx(pv, rel=1e-6)

    def test_perturbation_lowers_profit(self):
        n = 2000
        mids = (np.arange(n) + 0.5) * T_F / n
        q = np.array([share_control(t, T_F, T_C, TABLE1) for t in mids])
        bumped = q + np.where(mids < T_F / 2, 0.5, 0.0)
        assert discretized_profit(bumped, TABLE1) < discretized_profit(q, TABLE1)

    def test_single_step_present_value(self):
        _, best, _ = optimize_discrete_control(TABLE1, [5.0])
        assert best <= profit_share(TABLE1, "present_value").profit

    @pytest.mark.xfail(strict=True, reason="default costate closed form is beaten by a constant rate")
    def test_single_step_default(self):
        _, best, _ = optimize_discrete_control(TABLE1, [5.0])
        assert best <= profit_share(TABLE1).profit

    def test_starts_agree(self):
        lo, up = share_bounds(TABLE1)
        a = optimize_discrete_control(TABLE1, np.full(200, lo))
        b = optimize_discrete_control(TABLE1, np.full(200, up))
        np.testing.assert_allclose(a[0], b[0], atol=1e-9)
        assert lo <= a[0].min() and a[0].max() <= up

    def test_constant_control_profit(self):
        p = TABLE1
        c = 8.0
        a = p.alpha - p.beta * p.m_f - p.k_c
        head = (a - p.beta * c) * c * (1 - math.exp(-p.r * T_F)) / p.r
        left = p.s0_c - c * T_F
        t_c = T_F + left * p.beta / (p.alpha - p.b)
        tail = (p.b - p.k_c) * (p.alpha - p.b) / (p.beta * p.r) * (math.exp(-p.r * T_F) - math.exp(-p.r * t_c))
        assert discretized_profit(np.full(7, c), p) == pytest.approx(head + tail, rel=1e-13)

    def test_rejects_infeasible(self):
        with pytest.raises(ValueError, match="infeasible"):
            verify_share_optimality(TABLE1.replace(s0_f=0.0), n_steps=10, n_starts=1)


class TestNash:
    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_benchmark_classes(self, index):
        out = select_strategy(TABLE1).outcomes[index]
        rep = verify_fringe_nash(out, TABLE1, seed=3)
        assert rep.passed

    def test_deter_is_trivial(self):
        out = select_strategy(TABLE1).outcomes[0]
        rep = verify_fringe_nash(out, TABLE1, seed=3)
        assert rep.closed_form == 0.0 and rep.oracle == 0.0

    def test_seeded(self):
        out = select_strategy(TABLE1).outcomes[1]
        assert verify_fringe_nash(out, TABLE1, seed=9) == verify_fringe_nash(out, TABLE1, seed=9)


class TestDraws:
    def test_draws_are_admissible_and_seeded(self):
        a = [draw_params(np.random.default_rng(5)) for _ in range(2)]
        assert a[0] == a[1]
        rng = np.random.default_rng(6)
        for _ in range(5):
            p = draw_params(rng)
            assert validate(p).all_hold
            out = profit_share(p)
            assert out.feasible and not out.clipped


class TestRunOracle:
    def test_benchmark(self):
        reports = run_oracle(TABLE1, seed=42, n_steps=200, n_starts=2)
        names = [r.check for r in reports]
        assert names == [
            "pi1_quadrature",
            "pi3_quadrature",
            "I2_quadrature",
            "I1_antiderivative",
            "pi2_riemann",
            "stock_antiderivative",
            "stock_quadrature",
            "horizon_residual",
            "share_optimality[paper]",
            "share_optimality[present_value]",
            "fringe_nash[Deter]",
            "fringe_nash[Share]",
            "fringe_nash[Wait]",
        ]
        failed = {r.check for r in reports if r.failed}
        assert failed == {"share_optimality[paper]"}

    def test_skips_when_share_infeasible(self):
        reports = run_oracle(TABLE1.replace(r=0.2, m_f=28.5), seed=1, n_steps=50, n_starts=1)
        skipped = [r.check for r in reports if r.passed is None]
        assert "fringe_nash[Share]" in skipped and "pi2_riemann" in skipped
        assert not any(r.failed for r in reports)

    def test_clipped_stock_mismatch_flagged(self):
        p = TABLE1.replace(r=0.002, m_f=20.0)
        anti, quad = check_stock_balance(p)
        assert anti.tolerance == 1e-6 and anti.detail == "clipped"
        assert anti.failed and quad.failed
