"""Discounted cartel profit for each strategy class and the optimal choice.

* Deter: the cartel floods the market at price ``k_f`` until its stock is
  gone, keeping the fringe out.
* Share: both extract until the fringe is exhausted, then the cartel sells
  alone at the cap ``b``.
* Wait: the cartel stays idle while the fringe depletes, then sells at ``b``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .fringe import fringe_depletion_time, full_threshold
from .horizon import HorizonError, HorizonSolution, solve_t_c, stock_residual
from .integrate import quadrature
from .model import MarketParams, interior_share_condition, validate
from .phases import (
    CostateConvention,
    InfeasibleError,
    PhaseLabel,
    clip_time,
    costate_share,
    deter_control,
    deter_depletion,
    limit_price_control,
    share_control,
    wait_depletion,
)

TIE_RTOL = 1e-12


class StrategyClass(str, enum.Enum):
    DETER = "Deter"
    SHARE = "Share"
    WAIT = "Wait"


STRATEGY_ORDER = (StrategyClass.DETER, StrategyClass.SHARE, StrategyClass.WAIT)


@dataclass(frozen=True)
class PhaseInterval:
    label: PhaseLabel
    start: float
    end: float


@dataclass(frozen=True)
class StrategyOutcome:
    """Result of evaluating one strategy class.

    ``depletion_fringe`` is 0 for Deter, where the fringe is inactive on the
    cartel's schedule, and ``T^f`` otherwise. Infeasible outcomes carry a
    reason and a NaN profit.
    """

    strategy: StrategyClass
    profit: float
    depletion_cartel: float
    depletion_fringe: float
    feasible: bool
    reason: str = ""
    code: str = ""
    phases: tuple[PhaseInterval, ...] = ()
    horizon: HorizonSolution | None = None
    costate: float | None = None
    convention: CostateConvention = CostateConvention.PAPER
    clipped: bool = False
    stock_residual: float = 0.0
    components: dict[str, float] = field(default_factory=dict)
    expanded_profit: float | None = None


@dataclass(frozen=True)
class StrategyComparison:
    outcomes: tuple[StrategyOutcome, StrategyOutcome, StrategyOutcome]
    best: StrategyClass | None
    tied: tuple[StrategyClass, ...]
    margins: dict[str, float]

    def outcome(self, strategy: StrategyClass | str) -> StrategyOutcome:
        strategy = StrategyClass(strategy)
        return next(o for o in self.outcomes if o.strategy is strategy)

    @property
    def is_tie(self) -> bool:
        return len(self.tied) > 1


def _infeasible(strategy: StrategyClass, code: str, reason: str, **kw) -> StrategyOutcome:
    return StrategyOutcome(
        strategy=strategy,
        profit=math.nan,
        depletion_cartel=math.nan,
        depletion_fringe=math.nan,
        feasible=False,
        reason=reason,
        code=code,
        **kw,
    )


def profit_deter(params: MarketParams) -> StrategyOutcome:
    p = params
    report = validate(p)
    try:
        deter_control(p)
    except InfeasibleError as exc:
        return _infeasible(StrategyClass.DETER, "a2", str(exc))
    if not report.capacity.holds:
        return _infeasible(
            StrategyClass.DETER,
            "capacity",
            f"cartel capacity {p.m_c:.6g} below the deterrence rate {report.capacity.rhs:.6g}",
        )
    t_end = deter_depletion(p)
    profit = (p.k_f - p.k_c) * (p.alpha - p.k_f) / (p.beta * p.r) * -math.expm1(-p.r * t_end)
    return StrategyOutcome(
        strategy=StrategyClass.DETER,
        profit=profit,
        depletion_cartel=t_end,
        depletion_fringe=0.0,
        feasible=True,
        phases=(PhaseInterval(PhaseLabel.C, 0.0, t_end),),
    )


def profit_wait(params: MarketParams) -> StrategyOutcome:
    p = params
    validate(p)
    try:
        t_end = wait_depletion(p)
    except InfeasibleError as exc:
        return _infeasible(StrategyClass.WAIT, "a1", str(exc))
    if p.s0_f > 0.0 and full_threshold(p) < 0.0:
        return _infeasible(
            StrategyClass.WAIT, "fringe_idle", "fringe does not extract at capacity while the cartel is idle"
        )
    t_f = fringe_depletion_time(p)
    tail = p.s0_c * p.beta / (p.alpha - p.b)
    profit = (
        (p.b - p.k_c) * (p.alpha - p.b) / (p.beta * p.r) * math.exp(-p.r * t_f)
        * -math.expm1(-p.r * tail)
    )
    phases = []
    if t_f > 0.0:
        phases.append(PhaseInterval(PhaseLabel.F, 0.0, t_f))
    phases.append(PhaseInterval(PhaseLabel.L, t_f, t_end))
    return StrategyOutcome(
        strategy=StrategyClass.WAIT,
        profit=profit,
        depletion_cartel=t_end,
        depletion_fringe=t_f,
        feasible=True,
        phases=tuple(phases),
    )


def limit_phase_profit(t_f: float, t_c: float, params: MarketParams) -> float:
    """Discounted profit of selling ``(alpha - b)/beta`` at price ``b`` over ``[t_f, t_c]``."""
    p = params
    return (
        (p.b - p.k_c) * (p.alpha - p.b) / (p.beta * p.r)
        * (math.exp(-p.r * t_f) - math.exp(-p.r * t_c))
    )


def expanded_share_profit(t_f: float, t_c: float, params: MarketParams) -> float:
    """Alternative term-by-term algebraic expansion of the share profit.

    Retained only as a diagnostic to compare against the integral
    definition. Several of its exponents and coefficients do not follow from
    the integrand, so it does not agree with :func:`profit_share`.
    """
    p = params
    mfb = p.m_f * p.beta
    e_sum = math.exp(-p.r * (t_f + t_c))
    half = (p.b - p.k_c) / 2.0
    return (
        (p.alpha - p.k_c - mfb) / (2 * p.beta * p.r) * (p.alpha - p.k_c + mfb) / 2
        * (1 - math.exp(-p.r * t_f))
        + half * (p.alpha - p.b - mfb) / (2 * p.beta) * e_sum * t_f
        - (p.alpha - p.k_c + mfb) / 2 * (p.b - p.k_c) / (2 * p.beta) * e_sum * t_f
        - half**2 / (p.r * p.beta) * math.exp(-p.r * t_f - 2 * t_c) * (1 - math.exp(-p.r * t_f))
        + limit_phase_profit(t_f, t_c, p)
    )


def profit_share(
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
    diagnostics: bool = False,
    rel_tol: float = 1e-12,
) -> StrategyOutcome:
    """Share-class profit.

    The simultaneous phase is integrated by adaptive quadrature of the
    instantaneous cartel profit along the closed-form control. The limit
    phase uses its closed form.

    Args:
        params: Market parameters.
        convention: Costate discounting convention.
        diagnostics: Also evaluate :func:`expanded_share_profit`.
        rel_tol: Quadrature tolerance for the simultaneous phase.

    Returns:
        The outcome. It is infeasible, with a reason and a short code, when the limit-price
        phase is undefined, the fringe has no stock, the resource-order
        condition fails, the horizon equation has no root, or the control
        leaves the full-fringe band.
    """
    convention = CostateConvention(convention)
    p = params
    report = validate(p)
    share = StrategyClass.SHARE
    try:
        limit_price_control(p)
    except InfeasibleError as exc:
        return _infeasible(share, "a1", str(exc), convention=convention)
    t_f = fringe_depletion_time(p)
    if t_f <= 0.0:
        return _infeasible(
            share,
            "no_fringe_stock",
            "fringe stock is empty, no simultaneous phase",
            convention=convention,
        )
    if not report.a3_share_lb_positive.holds:
        return _infeasible(
            share, "a3", "alpha - beta m_f <= b: no admissible share band", convention=convention
        )
    if not report.a4_resource_order.holds:
        return _infeasible(
            share,
            "a4",
            f"fringe would outlast the cartel (slack {report.a4_resource_order.slack:.6g})",
            convention=convention,
        )
    try:
        horizon = solve_t_c(p, convention)
    except HorizonError as exc:
        return _infeasible(share, "horizon", str(exc), convention=convention)
    t_c = horizon.t_c
    try:
        # the control is decreasing, so its maximum is at t = 0
        share_control(0.0, t_f, t_c, p, convention)
    except InfeasibleError as exc:
        return _infeasible(share, "upper_bound", str(exc), horizon=horizon, convention=convention)

    gamma = costate_share(t_f, t_c, p, convention).gamma_c
    clipped = interior_share_condition(p, t_c).holds is False
    t_star = clip_time(gamma, p)

    def integrand(t: float) -> float:
        q = share_control(t, t_f, t_c, p, convention)
        return math.exp(-p.r * t) * (p.alpha - p.beta * (q + p.m_f) - p.k_c) * q

    i1 = quadrature(integrand, 0.0, t_f, rel_tol, points=[t_star] if clipped else None)
    i2 = limit_phase_profit(t_f, t_c, p)
    return StrategyOutcome(
        strategy=share,
        profit=i1 + i2,
        depletion_cartel=t_c,
        depletion_fringe=t_f,
        feasible=True,
        phases=(PhaseInterval(PhaseLabel.S, 0.0, t_f), PhaseInterval(PhaseLabel.L, t_f, t_c)),
        horizon=horizon,
        costate=gamma,
        convention=convention,
        clipped=clipped,
        stock_residual=stock_residual(t_f, t_c, p, convention),
        components={"I1": i1, "I2": i2},
        expanded_profit=expanded_share_profit(t_f, t_c, p) if diagnostics else None,
    )


def compare(outcomes: tuple[StrategyOutcome, StrategyOutcome, StrategyOutcome]) -> StrategyComparison:
    """Pick the most profitable feasible outcome.

    Profits within ``TIE_RTOL`` relative of the maximum are reported as tied;
    ``best`` is then the first of them in Deter, Share, Wait order.
    """
    feasible = [o for o in outcomes if o.feasible]
    margins: dict[str, float] = {}
    for i, a in enumerate(outcomes):
        for b in outcomes[i + 1 :]:
            key = f"{a.strategy.value}-{b.strategy.value}"
            margins[key] = a.profit - b.profit if a.feasible and b.feasible else math.nan
    if not feasible:
        return StrategyComparison(outcomes, None, (), margins)
    top = max(o.profit for o in feasible)
    tol = TIE_RTOL * max(abs(top), 1.0)
    tied = tuple(
        s for s in STRATEGY_ORDER for o in feasible if o.strategy is s and top - o.profit <= tol
    )
    return StrategyComparison(outcomes, tied[0], tied, margins)


def select_strategy(
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
    diagnostics: bool = False,
) -> StrategyComparison:
    """Evaluate all three classes and return the comparison."""
    outcomes = (
        profit_deter(params),
        profit_share(params, convention, diagnostics),
        profit_wait(params),
    )
    return compare(outcomes)
