import math

import numpy as np
import pytest

from cartel_fringe import TABLE1
from cartel_fringe.fringe import (
    ReactionKind,
    firm_payoff,
    fringe_depletion_time,
    full_threshold,
    jsrf,
    zero_threshold,
)


class TestJSRF:
    def test_large_cartel_output_gives_zero(self):
        assert jsrf(50.0, 100.0, TABLE1).kind is ReactionKind.ZERO

    def test_small_cartel_output_gives_full(self):
        reaction = jsrf(5.0, 100.0, TABLE1)
        assert reaction.kind is ReactionKind.FULL
        assert reaction.value == 28.0

    def test_middle_band_is_empty(self):
        reaction = jsrf(20.0, 100.0, TABLE1)
        assert reaction.is_empty and reaction.value is None

    def test_exhausted_stock_gives_zero(self):
        assert jsrf(5.0, 0.0, TABLE1).kind is ReactionKind.ZERO

    def test_boundary_tie_goes_to_zero(self):
        assert jsrf(zero_threshold(TABLE1), 100.0, TABLE1).kind is ReactionKind.ZERO

    def test_full_threshold_inclusive(self):
        assert jsrf(full_threshold(TABLE1), 1.0, TABLE1).kind is ReactionKind.FULL

    def test_thresholds(self):
        assert zero_threshold(TABLE1) == pytest.approx(37.906976744186046)
        assert full_threshold(TABLE1) == pytest.approx(9.906976744186048)


class TestDepletion:
    @pytest.mark.parametrize(
        "s0_f, m_f, expected", [(619.5, 28.0, 22.125), (0.0, 28.0, 0.0), (619.5, 619.5, 1.0)]
    )
    def test_values(self, s0_f, m_f, expected):
        assert fringe_depletion_time(TABLE1.replace(s0_f=s0_f, m_f=m_f)) == expected


class TestFirmPayoff:
    t = np.linspace(0.0, 10.0, 201)

    def test_zero_margin(self):
        p = np.full_like(self.t, TABLE1.k_f)
        q = np.random.default_rng(0).uniform(0, 1, self.t.size)
        assert firm_payoff(1.0, (self.t, p), (self.t, q), TABLE1) == 0.0

    def test_constant_cap_price(self):
        c = 0.7
        p = np.full_like(self.t, TABLE1.b)
        q = np.full_like(self.t, c)
        expected = c * (TABLE1.b - TABLE1.k_f) * (1 - math.exp(-TABLE1.r * 10.0)) / TABLE1.r
        assert firm_payoff(c, (self.t, p), (self.t, q), TABLE1) == pytest.approx(expected, rel=1e-14)

    def test_mismatched_grids(self):
        with pytest.raises(ValueError, match="grid"):
            firm_payoff(1.0, (self.t, self.t), (self.t[:-1], self.t[:-1]), TABLE1)

    def test_schedule_above_capacity(self):
        p = np.full_like(self.t, TABLE1.b)
        with pytest.raises(ValueError, match="capacity"):
            firm_payoff(1.0, (self.t, p), (self.t, np.full_like(self.t, 2.0)), TABLE1)
