"""Closed-form cartel controls and phase durations.

Phase labels:

* ``F``: only the fringe extracts.
* ``C``: only the cartel extracts, price below ``b``.
* ``S``: cartel and fringe extract simultaneously.
* ``L``: only the cartel extracts, price equal to ``b``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .fringe import fringe_depletion_time
from .model import MarketParams


class InfeasibleError(ValueError):
    """The requested regime is not an equilibrium at these parameters."""


class PhaseLabel(str, enum.Enum):
    F = "F"
    C = "C"
    S = "S"
    L = "L"


class CostateConvention(str, enum.Enum):
    """How the share-class shadow price is discounted.

    ``PAPER`` discounts the terminal marginal value ``b - k_c`` by
    ``e^{-r(T^f + T^c)}``. ``PRESENT_VALUE`` discounts by ``e^{-r T^c}``,
    which is what the transversality condition gives for a current-value
    marginal profit ``b - k_c`` at ``T^c``. The former is the default
    everywhere; the latter is a diagnostic.
    """

    PAPER = "paper"
    PRESENT_VALUE = "present_value"


@dataclass(frozen=True)
class Costate:
    gamma_c: float
    convention: CostateConvention = CostateConvention.PAPER


def deter_control(params: MarketParams) -> float:
    """Constant cartel rate that pins the price at ``k_f``.

    Raises:
        InfeasibleError: If ``2 k_f - k_c > alpha``, where holding the price
            at ``k_f`` is no longer the cartel's best reply.
    """
    if 2.0 * params.k_f - params.k_c > params.alpha:
        raise InfeasibleError("2 k_f - k_c > alpha: pricing at k_f is not optimal")
    return (params.alpha - params.k_f) / params.beta


def deter_depletion(params: MarketParams) -> float:
    return params.s0_c * params.beta / (params.alpha - params.k_f)


def limit_price_control(params: MarketParams) -> float:
    """Constant cartel rate that holds the price at the cap ``b``.

    Raises:
        InfeasibleError: If ``2b - k_c > alpha``. The cartel would then
            prefer an interior rate above ``(alpha - b)/beta`` before settling
            at the cap, a path this solver does not construct.
    """
    if 2.0 * params.b - params.k_c > params.alpha:
        raise InfeasibleError(
            "2b - k_c > alpha: an interior segment precedes the limit-price phase"
        )
    return (params.alpha - params.b) / params.beta


def wait_depletion(params: MarketParams) -> float:
    limit_price_control(params)
    return fringe_depletion_time(params) + params.s0_c * params.beta / (params.alpha - params.b)


def costate_share(
    t_f: float,
    t_c: float,
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
) -> Costate:
    """Discounted shadow price of cartel stock in the share class.

    Args:
        t_f: Fringe depletion time.
        t_c: Cartel depletion time, ``t_c > t_f``.
        params: Market parameters.
        convention: Discounting convention, see :class:`CostateConvention`.
    """
    convention = CostateConvention(convention)
    if not t_c > t_f:
        raise ValueError(f"need t_f < t_c, got t_f={t_f}, t_c={t_c}")
    horizon = t_f + t_c if convention is CostateConvention.PAPER else t_c
    return Costate((params.b - params.k_c) * math.exp(-params.r * horizon), convention)


def share_bounds(params: MarketParams) -> tuple[float, float]:
    """Cartel rates compatible with full fringe output and a price in ``[k_f, b]``."""
    mf_beta = params.m_f * params.beta
    lo = (params.alpha - params.b - mf_beta) / params.beta
    up = (params.alpha - params.k_f - mf_beta) / params.beta
    return lo, up


def share_interior(t: float, gamma_c: float, params: MarketParams) -> float:
    """Unconstrained maximiser of the share-phase Hamiltonian at time ``t``."""
    p = params
    return (p.alpha - p.k_c - p.m_f * p.beta) / (2.0 * p.beta) - gamma_c / (
        2.0 * p.beta
    ) * math.exp(p.r * t)


def clip_time(gamma_c: float, params: MarketParams) -> float:
    """Time at which the interior share control falls to the lower bound.

    The result may lie outside the phase: negative (or ``-inf``) when the
    interior rate starts below the band, beyond ``T^f`` when it never
    reaches it.
    """
    p = params
    ratio = (2.0 * p.b - p.k_c - p.alpha + p.m_f * p.beta) / gamma_c
    if ratio <= 0.0:
        return -math.inf
    return math.log(ratio) / p.r


def share_control(
    t: float,
    t_f: float,
    t_c: float,
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
) -> float:
    """Optimal cartel rate at time ``t`` of the simultaneous-extraction phase.

    The interior formula is projected onto the lower end of the admissible
    band pointwise. That projection is inactive for every ``t`` exactly when
    the interior share condition holds at ``t_c``, since the interior path is
    decreasing and the condition is the statement that it ends above the
    band.

    Raises:
        ValueError: If ``t`` is outside ``[0, t_f]``.
        InfeasibleError: If the interior rate exceeds the upper end of the
            band, where the fringe would not extract at full capacity.
    """
    if not 0.0 <= t <= t_f:
        raise ValueError(f"t={t} outside the share phase [0, {t_f}]")
    gamma = costate_share(t_f, t_c, params, convention).gamma_c
    q = share_interior(t, gamma, params)
    lo, up = share_bounds(params)
    if q > up * (1.0 + 1e-12) + 1e-12:
        raise InfeasibleError(
            f"share control {q:.6g} exceeds the full-fringe bound {up:.6g} at t={t:.6g}"
        )
    return max(q, lo)
