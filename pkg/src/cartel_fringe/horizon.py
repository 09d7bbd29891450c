"""Cartel depletion time in the share class.

Stock conservation over the two phases of the share class reads::

    int_0^{T^f} q(t) dt + (alpha - b)/beta * (T^c - T^f) = S0c

With the interior control ``q(t) = A/(2 beta) - gamma/(2 beta) e^{r t}``,
``A = alpha - k_c - beta m_f``, the integral is
``A T^f/(2 beta) - gamma (e^{r T^f} - 1)/(2 beta r)``. Multiplying through by
``beta/(alpha - b)`` and collecting the ``T^f`` terms gives ``tau_c(T^c) = 0``
with::

    tau_c(t) = t - S0c beta/(alpha - b)
               - (alpha + k_c + beta m_f - 2b)/(2(alpha - b)) T^f
               - (e^{r T^f} - 1) gamma(t) / (2 r (alpha - b))

The costate ``gamma(t)`` decays in ``t``, so ``tau_c`` is strictly increasing
and has at most one root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import optimize

from .fringe import fringe_depletion_time
from .model import MarketParams, validate
from .phases import (
    CostateConvention,
    clip_time,
    costate_share,
    share_bounds,
)

EPS_T = 1e-9
ROOT_TOL = 1e-12


class HorizonError(RuntimeError):
    """No share-class depletion time exists at these parameters."""

    def __init__(self, message: str, diagnostics: dict[str, float] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class HorizonSolution:
    t_c: float
    residual: float
    iterations: int
    bracket: tuple[float, float]
    convention: CostateConvention = CostateConvention.PAPER
    diagnostics: dict[str, float] = field(default_factory=dict)


def _gamma(t: float, t_f: float, params: MarketParams, convention: CostateConvention) -> float:
    horizon = t_f + t if convention is CostateConvention.PAPER else t
    return (params.b - params.k_c) * math.exp(-params.r * horizon)


def tau_c(
    t: float,
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
) -> float:
    """Residual of the share-class horizon equation at candidate depletion time ``t``."""
    convention = CostateConvention(convention)
    p = params
    t_f = fringe_depletion_time(p)
    span = p.alpha - p.b
    lead = (p.alpha + p.k_c + p.m_f * p.beta - 2.0 * p.b) / (2.0 * span)
    decay = math.expm1(p.r * t_f) * _gamma(t, t_f, p, convention) / (2.0 * p.r * span)
    return t - p.s0_c * p.beta / span - lead * t_f - decay


def upper_bracket(params: MarketParams) -> float:
    """Explicit point where ``tau_c`` is positive.

    The decaying term is bounded by ``(b - k_c)/(2 r (alpha - b))`` for any
    ``t > T^f`` in both conventions.
    """
    p = params
    t_f = fringe_depletion_time(p)
    span = p.alpha - p.b
    lead = (p.alpha + p.k_c + p.m_f * p.beta - 2.0 * p.b) / (2.0 * span)
    return t_f + p.s0_c * p.beta / span + lead * t_f + (p.b - p.k_c) / (2.0 * p.r * span)


def solve_t_c(
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
) -> HorizonSolution:
    """Solve the horizon equation by bracketed Brent iteration.

    Args:
        params: Market parameters.
        convention: Costate discounting convention.

    Returns:
        The root together with its residual and the bracket used.

    Raises:
        HorizonError: If ``tau_c`` is already non-negative just after ``T^f``.
            The cartel would then exhaust its stock no later than the fringe,
            outside the share class. Diagnostics carry the resource-order
            slack and the residual at the lower end.
    """
    convention = CostateConvention(convention)
    t_f = fringe_depletion_time(params)
    lo = t_f + EPS_T
    f_lo = tau_c(lo, params, convention)
    if not f_lo < 0.0:
        report = validate(params)
        raise HorizonError(
            f"no depletion time after T^f={t_f:.6g}: tau_c(T^f+eps)={f_lo:.6g} >= 0",
            {
                "tau_at_lower": f_lo,
                "resource_order_slack": report.a4_resource_order.slack,
                "t_f": t_f,
            },
        )
    hi = max(upper_bracket(params), lo + 1.0)
    while tau_c(hi, params, convention) <= 0.0:
        hi = lo + 2.0 * (hi - lo)
    root, info = optimize.brentq(
        tau_c,
        lo,
        hi,
        args=(params, convention),
        xtol=1e-15,
        rtol=4.0 * 2.220446049250313e-16,
        maxiter=200,
        full_output=True,
    )
    residual = tau_c(root, params, convention)
    if abs(residual) > ROOT_TOL * max(1.0, root):
        raise HorizonError(f"root refinement stalled with residual {residual:.3g}")
    return HorizonSolution(root, residual, info.iterations, (lo, hi), convention)


def share_phase_extraction(
    t_f: float,
    t_c: float,
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
    upto: float | None = None,
) -> float:
    """Closed-form cumulative cartel extraction over ``[0, upto]`` in phase S.

    Includes the pointwise projection onto the lower bound of the share band.

    Args:
        t_f: Fringe depletion time.
        t_c: Cartel depletion time.
        params: Market parameters.
        convention: Costate discounting convention.
        upto: End of the integration window, defaults to ``t_f``.
    """
    p = params
    end = t_f if upto is None else upto
    gamma = costate_share(t_f, t_c, p, convention).gamma_c
    a_half = (p.alpha - p.k_c - p.m_f * p.beta) / (2.0 * p.beta)
    lo, _ = share_bounds(p)
    t_star = min(max(clip_time(gamma, p), 0.0), end)
    interior = a_half * t_star - gamma / (2.0 * p.beta * p.r) * math.expm1(p.r * t_star)
    return interior + lo * (end - t_star)


def stock_residual(
    t_f: float,
    t_c: float,
    params: MarketParams,
    convention: CostateConvention | str = CostateConvention.PAPER,
) -> float:
    """Total share-class extraction minus the initial cartel stock."""
    p = params
    tail = (p.alpha - p.b) / p.beta * (t_c - t_f)
    return share_phase_extraction(t_f, t_c, p, convention) + tail - p.s0_c
