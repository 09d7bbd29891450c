"""Aggregate fringe behaviour: joint static reaction and per-firm payoffs."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .integrate import discounted_trapezoid
from .model import MarketParams


class ReactionKind(enum.Enum):
    ZERO = "Zero"
    FULL = "Full"
    EMPTY = "Empty"


@dataclass(frozen=True)
class FringeReaction:
    """Joint fringe best response to a cartel extraction rate.

    ``value`` is None for the empty reaction, where no aggregate fringe output
    is consistent with individual optimisation.
    """

    kind: ReactionKind
    value: float | None

    @property
    def is_empty(self) -> bool:
        return self.kind is ReactionKind.EMPTY


def zero_threshold(params: MarketParams) -> float:
    """Cartel rate at or above which the fringe margin is non-positive."""
    return (params.alpha - params.k_f) / params.beta


def full_threshold(params: MarketParams) -> float:
    """Cartel rate at or below which the fringe margin stays positive at full output."""
    return (params.alpha - params.beta * params.m_f - params.k_f) / params.beta


def jsrf(q_c: float, s_f: float, params: MarketParams) -> FringeReaction:
    """Joint static reaction of the fringe.

    Args:
        q_c: Cartel extraction rate, non-negative.
        s_f: Remaining fringe stock, non-negative.
        params: Market parameters.

    Returns:
        Zero when the price at ``q_c`` is at or below ``k_f`` or the stock is
        exhausted, Full (``m_f``) when even full fringe output leaves the price
        at or above ``k_f``, Empty otherwise.
    """
    if q_c >= zero_threshold(params) or s_f <= 0.0:
        return FringeReaction(ReactionKind.ZERO, 0.0)
    if q_c <= full_threshold(params):
        return FringeReaction(ReactionKind.FULL, params.m_f)
    return FringeReaction(ReactionKind.EMPTY, None)


def fringe_depletion_time(params: MarketParams) -> float:
    return params.s0_f / params.m_f


def firm_payoff(
    capacity_share: float,
    price_path: tuple[np.ndarray, np.ndarray],
    extraction_schedule: tuple[np.ndarray, np.ndarray],
    params: MarketParams,
) -> float:
    """Discounted profit of one negligible fringe firm.

    The price path is taken as given. Both series are sampled and linearly
    interpolated; the margin times extraction product is integrated with the
    exact discounted trapezoid rule.

    Args:
        capacity_share: The firm's extraction capacity.
        price_path: ``(t, p)`` samples.
        extraction_schedule: ``(t, q)`` samples on the same grid, with
            ``0 <= q <= capacity_share``.
        params: Market parameters (``k_f`` and ``r`` are used).

    Returns:
        The firm's discounted net profit.

    Raises:
        ValueError: If the grids differ or the schedule leaves
            ``[0, capacity_share]``.
    """
    t_p, p = (np.asarray(a, dtype=float) for a in price_path)
    t_q, q = (np.asarray(a, dtype=float) for a in extraction_schedule)
    if t_p.shape != t_q.shape or not np.array_equal(t_p, t_q):
        raise ValueError("price path and extraction schedule must share a grid")
    if p.shape != t_p.shape or q.shape != t_q.shape:
        raise ValueError("series length does not match its grid")
    tol = 1e-12 * max(1.0, capacity_share)
    if np.any(q < -tol) or np.any(q > capacity_share + tol):
        raise ValueError("extraction schedule leaves [0, capacity_share]")
    return discounted_trapezoid(t_p, (p - params.k_f) * q, params.r)
