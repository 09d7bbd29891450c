"""Sampled equilibrium paths for a strategy outcome."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .horizon import share_phase_extraction
from .model import MarketParams, price
from .phases import (
    InfeasibleError,
    PhaseLabel,
    clip_time,
    deter_control,
    limit_price_control,
    share_bounds,
    share_control,
)
from .strategy import StrategyClass, StrategyOutcome

JUMP_RTOL = 1e-9


@dataclass(frozen=True)
class Jump:
    time: float
    p_left: float
    p_right: float


@dataclass
class Trajectory:
    """Plot-ready time series.

    Phase boundaries appear twice in ``t``, once as the left limit (labelled
    with the earlier phase) and once as the right limit.
    """

    strategy: StrategyClass
    t: np.ndarray
    phase: list[PhaseLabel]
    q_c: np.ndarray
    q_f: np.ndarray
    p: np.ndarray
    s_c: np.ndarray
    s_f: np.ndarray
    cum_profit: np.ndarray
    jumps: list[Jump] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.t.size)

    def rows(self):
        for i in range(len(self)):
            yield (
                self.t[i],
                self.phase[i].value,
                self.q_c[i],
                self.q_f[i],
                self.p[i],
                self.s_c[i],
                self.s_f[i],
                self.cum_profit[i],
            )


COLUMNS = ("t", "phase", "q_c", "q_f", "p", "s_c", "s_f", "cum_profit")


def share_phase_profit(t: float, t_f: float, gamma: float, params: MarketParams) -> float:
    """Closed-form discounted cartel profit over ``[0, t]`` of the simultaneous phase.

    With ``A = alpha - beta m_f - k_c`` the interior integrand simplifies to
    ``(A^2 e^{-r s} - gamma^2 e^{r s}) / (4 beta)``. After the control hits
    the lower bound ``lo`` the margin is ``b - k_c``.
    """
    p = params
    a = p.alpha - p.beta * p.m_f - p.k_c
    lo, _ = share_bounds(p)
    t_star = min(max(clip_time(gamma, p), 0.0), t)
    k = 4.0 * p.beta * p.r
    head = a * a / k * -math.expm1(-p.r * t_star) - gamma * gamma / k * math.expm1(p.r * t_star)
    tail = (p.b - p.k_c) * lo * (math.exp(-p.r * t_star) - math.exp(-p.r * t)) / p.r
    return head + tail


def _phase_grid(start: float, end: float, n: int) -> np.ndarray:
    return np.linspace(start, end, n)


def render(outcome: StrategyOutcome, params: MarketParams, n_points: int = 200) -> Trajectory:
    """Sample the equilibrium path of a feasible outcome.

    Args:
        outcome: Result from the strategy module.
        params: The parameters that produced ``outcome``.
        n_points: Samples per phase, at least 2.

    Returns:
        The trajectory. Stocks and accumulated profit come from closed-form
        antiderivatives of the piecewise controls.

    Raises:
        InfeasibleError: If ``outcome`` is infeasible.
        ValueError: If ``n_points < 2``.
    """
    if not outcome.feasible:
        raise InfeasibleError(f"cannot render infeasible {outcome.strategy.value}: {outcome.reason}")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    p = params
    r = p.r
    cols: dict[str, list] = {k: [] for k in COLUMNS}

    def emit(t, label, q_c, q_f, s_c, s_f, cum):
        t = np.asarray(t, dtype=float)
        n = t.size
        cols["t"].append(t)
        cols["phase"].extend([label] * n)
        cols["q_c"].append(np.broadcast_to(np.asarray(q_c, dtype=float), t.shape))
        cols["q_f"].append(np.broadcast_to(np.asarray(q_f, dtype=float), t.shape))
        cols["s_c"].append(np.broadcast_to(np.asarray(s_c, dtype=float), t.shape))
        cols["s_f"].append(np.broadcast_to(np.asarray(s_f, dtype=float), t.shape))
        cols["cum_profit"].append(np.broadcast_to(np.asarray(cum, dtype=float), t.shape))

    def limit_phase(t0: float, t1: float, s_c0: float, cum0: float) -> None:
        q = limit_price_control(p)
        t = _phase_grid(t0, t1, n_points)
        cum = cum0 + (p.b - p.k_c) * q * (np.exp(-r * t0) - np.exp(-r * t)) / r
        emit(t, PhaseLabel.L, q, 0.0, s_c0 - q * (t - t0), 0.0, cum)

    kind = outcome.strategy
    if kind is StrategyClass.DETER:
        q = deter_control(p)
        t_end = outcome.depletion_cartel
        t = _phase_grid(0.0, t_end, n_points)
        cum = (p.k_f - p.k_c) * q * -np.expm1(-r * t) / r
        emit(t, PhaseLabel.C, q, 0.0, p.s0_c - q * t, p.s0_f, cum)
        # right limit at exhaustion: the fringe takes over
        q_f = p.m_f if p.s0_f > 0.0 else 0.0
        emit([t_end], PhaseLabel.F, 0.0, q_f, 0.0, p.s0_f, cum[-1])
    elif kind is StrategyClass.WAIT:
        t_f = outcome.depletion_fringe
        if t_f > 0.0:
            t = _phase_grid(0.0, t_f, n_points)
            emit(t, PhaseLabel.F, 0.0, p.m_f, p.s0_c, p.s0_f - p.m_f * t, 0.0)
        limit_phase(t_f, outcome.depletion_cartel, p.s0_c, 0.0)
    else:
        t_f = outcome.depletion_fringe
        t_c = outcome.depletion_cartel
        conv = outcome.convention
        gamma = outcome.costate
        t = _phase_grid(0.0, t_f, n_points)
        q_c = np.array([share_control(x, t_f, t_c, p, conv) for x in t])
        used = np.array([share_phase_extraction(t_f, t_c, p, conv, upto=x) for x in t])
        cum = np.array([share_phase_profit(x, t_f, gamma, p) for x in t])
        emit(t, PhaseLabel.S, q_c, p.m_f, p.s0_c - used, p.s0_f - p.m_f * t, cum)
        limit_phase(t_f, t_c, p.s0_c - used[-1], cum[-1])

    traj = Trajectory(
        strategy=kind,
        t=np.concatenate(cols["t"]),
        phase=cols["phase"],
        q_c=np.concatenate(cols["q_c"]).copy(),
        q_f=np.concatenate(cols["q_f"]).copy(),
        p=np.empty(0),
        s_c=np.concatenate(cols["s_c"]).copy(),
        s_f=np.concatenate(cols["s_f"]).copy(),
        cum_profit=np.concatenate(cols["cum_profit"]).copy(),
    )
    traj.p = np.asarray(price(traj.q_c, traj.q_f, p), dtype=float)
    traj.jumps = find_jumps(traj.t, traj.p, p.b)
    return traj


def find_jumps(t: np.ndarray, p: np.ndarray, scale: float) -> list[Jump]:
    """Price discontinuities at repeated grid times."""
    jumps = []
    for i in range(1, t.size):
        if t[i] == t[i - 1] and abs(p[i] - p[i - 1]) > JUMP_RTOL * scale:
            jumps.append(Jump(float(t[i]), float(p[i - 1]), float(p[i])))
    return jumps
