import numpy as np
import pytest

from cartel_fringe import TABLE1, select_strategy
from cartel_fringe.fringe import ReactionKind, jsrf
from cartel_fringe.phases import InfeasibleError, PhaseLabel, share_bounds
from cartel_fringe.strategy import StrategyClass, profit_share
from cartel_fringe.trajectory import render


@pytest.fixture(scope="module")
def outcomes():
    return {o.strategy: o for o in select_strategy(TABLE1).outcomes}


def _render(outcomes, kind, n=200):
    return render(outcomes[kind], TABLE1, n)


class TestShapes:
    def test_deter_jump(self, outcomes):
        tr = _render(outcomes, StrategyClass.DETER)
        assert len(tr.jumps) == 1
        jump = tr.jumps[0]
        assert jump.time == pytest.approx(31.973006134969321)
        assert jump.p_left == pytest.approx(62.5) and jump.p_right == 102.5
        assert tr.phase[-1] is PhaseLabel.F and tr.phase[-2] is PhaseLabel.C

    def test_share_price_path(self, outcomes):
        tr = _render(outcomes, StrategyClass.SHARE)
        s = np.array([ph is PhaseLabel.S for ph in tr.phase])
        assert tr.p[0] == pytest.approx(66.05916952329542, rel=1e-12)
        assert np.all(np.diff(tr.p[s]) > 0)
        assert tr.p[s].max() < TABLE1.b
        assert tr.p[-1] == TABLE1.b
        (jump,) = tr.jumps
        assert jump.time == 22.125 and jump.p_right > jump.p_left

    def test_wait_price_flat(self, outcomes):
        tr = _render(outcomes, StrategyClass.WAIT)
        assert np.all(tr.p == TABLE1.b)
        assert tr.jumps == []

    def test_boundaries_duplicated(self, outcomes):
        tr = _render(outcomes, StrategyClass.SHARE, 5)
        assert len(tr) == 10
        assert tr.t[4] == tr.t[5] == 22.125
        assert np.all(np.diff(tr.t) >= 0)


@pytest.mark.parametrize("kind", list(StrategyClass))
class TestInvariants:
    def test_stocks(self, outcomes, kind):
        tr = _render(outcomes, kind)
        out = outcomes[kind]
        for s, s0 in ((tr.s_c, TABLE1.s0_c), (tr.s_f, TABLE1.s0_f)):
            assert np.all(np.diff(s) <= 1e-9 * s0)
            assert s.min() >= -1e-9 * s0
        assert abs(tr.s_c[-1]) <= 1e-9 * TABLE1.s0_c
        if kind is not StrategyClass.DETER:
            idx = np.searchsorted(tr.t, out.depletion_fringe)
            assert abs(tr.s_f[idx]) <= 1e-9 * TABLE1.s0_f

    def test_fringe_follows_reaction(self, outcomes, kind):
        tr = _render(outcomes, kind)
        for i in range(len(tr)):
            # at a phase's right end the stock is a left limit, still positive inside the phase
            s_f = tr.s_f[i]
            if i + 1 < len(tr) and tr.t[i + 1] == tr.t[i] and tr.q_f[i] > 0:
                s_f = max(s_f, 1e-12)
            reaction = jsrf(tr.q_c[i], s_f, TABLE1)
            assert reaction.kind is not ReactionKind.EMPTY
            assert reaction.value == tr.q_f[i]

    def test_profit_accumulates_to_total(self, outcomes, kind):
        tr = _render(outcomes, kind)
        assert np.all(np.diff(tr.cum_profit) >= -1e-9)
        assert tr.cum_profit[-1] == pytest.approx(outcomes[kind].profit, rel=1e-10)

    def test_mass_balance(self, outcomes, kind):
        tr = _render(outcomes, kind)
        used_c = np.trapezoid(tr.q_c, tr.t)
        used_f = np.trapezoid(tr.q_f, tr.t)
        assert used_c == pytest.approx(tr.s_c[0] - tr.s_c[-1], rel=1e-6)
        if used_f:
            assert used_f == pytest.approx(tr.s_f[0] - tr.s_f[-1], rel=1e-6)


def test_too_few_points(outcomes):
    with pytest.raises(ValueError):
        render(outcomes[StrategyClass.SHARE], TABLE1, 1)


def test_infeasible_outcome():
    out = profit_share(TABLE1.replace(s0_f=0.0))
    with pytest.raises(InfeasibleError):
        render(out, TABLE1.replace(s0_f=0.0), 10)


def test_clipped_path_stays_in_band():
    p = TABLE1.replace(r=0.002, m_f=26.0)
    tr = render(profit_share(p), p, 100)
    lo, up = share_bounds(p)
    s = np.array([ph is PhaseLabel.S for ph in tr.phase])
    assert tr.q_c[s].min() == lo
    assert tr.q_c[s].max() <= up
