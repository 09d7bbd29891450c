"""Parameter sweeps, region classification and strategy-indifference curves."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .model import PARAM_NAMES, MarketParams, ModelError, validate
from .strategy import StrategyClass, StrategyComparison, select_strategy

BISECT_XTOL = 1e-8


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.name not in PARAM_NAMES:
            raise ValueError(f"unknown parameter {self.name!r}")
        if self.n < 1:
            raise ValueError("axis needs at least one point")
        if self.n > 1 and not self.hi > self.lo:
            raise ValueError(f"axis {self.name}: need lo < hi")

    @classmethod
    def parse(cls, text: str) -> AxisSpec:
        """Parse ``name:lo:hi:n``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis spec {text!r} is not name:lo:hi:n")
        name, lo, hi, n = parts
        try:
            return cls(name.strip(), float(lo), float(hi), int(n))
        except ValueError as exc:
            raise ValueError(f"bad axis spec {text!r}: {exc}") from None

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class SweepCell:
    values: tuple[float, ...]
    pi1: float
    pi2: float
    pi3: float
    best: str
    valid: bool
    reason: str

    @property
    def profits(self) -> tuple[float, float, float]:
        return (self.pi1, self.pi2, self.pi3)


@dataclass
class SweepGrid:
    axes: tuple[AxisSpec, ...]
    cells: list[SweepCell] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes) + ("pi1", "pi2", "pi3", "best", "valid", "reason")

    def column(self, name: str) -> np.ndarray:
        if name in ("pi1", "pi2", "pi3"):
            return np.array([getattr(c, name) for c in self.cells])
        idx = [a.name for a in self.axes].index(name)
        return np.array([c.values[idx] for c in self.cells])

    def rows(self):
        for c in self.cells:
            yield (*c.values, c.pi1, c.pi2, c.pi3, c.best, c.valid, c.reason)


def evaluate_cell(params: MarketParams, values: tuple[float, ...] = ()) -> SweepCell:
    """Strategy comparison for one grid point, never raising on bad parameters.

    A cell is valid when the hard parameter checks pass and every standing
    assumption that does not need the share horizon holds. Invalid cells
    still report whatever profits are defined; ``reason`` lists the failed
    conditions and any infeasible class as ``Class:code``.
    """
    try:
        report = validate(params)
    except ModelError as exc:
        return SweepCell(values, math.nan, math.nan, math.nan, "", False, f"hard: {exc}")
    reasons = report.failed()
    cmp: StrategyComparison = select_strategy(params)
    reasons += [f"{o.strategy.value}:{o.code}" for o in cmp.outcomes if not o.feasible]
    share = cmp.outcome(StrategyClass.SHARE)
    if share.feasible and share.clipped:
        reasons.append("Share:clipped")
    valid = report.all_hold
    best = ""
    if valid and cmp.best is not None:
        best = "|".join(s.value for s in cmp.tied)
    pis = tuple(o.profit for o in cmp.outcomes)
    return SweepCell(values, *pis, best, valid, ";".join(reasons))


def sweep_grid(axes, params: MarketParams) -> SweepGrid:
    """Evaluate every point of the Cartesian product of ``axes`` in row-major order."""
    axes = tuple(axes)
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise ValueError(f"repeated axis names: {names}")
    grid = SweepGrid(axes)
    for point in itertools.product(*(a.values() for a in axes)):
        values = tuple(float(v) for v in point)
        cell_params = params.replace(**dict(zip(names, values)))
        grid.cells.append(evaluate_cell(cell_params, values))
    return grid


def m_f_cap(params: MarketParams) -> float:
    """Largest fringe capacity that still leaves room for the cartel at price ``b``."""
    return (params.alpha - params.b) / params.beta


def sweep_1d(name: str, lo: float, hi: float, n: int, params: MarketParams) -> SweepGrid:
    """One-parameter sweep.

    Raises:
        ValueError: If ``n < 2`` or an ``m_f`` sweep reaches
            ``(alpha - b)/beta``.
    """
    if n < 2:
        raise ValueError("a sweep needs at least two points")
    if name == "m_f" and hi >= m_f_cap(params):
        raise ValueError(f"m_f must stay below (alpha - b)/beta = {m_f_cap(params):.6g}")
    return sweep_grid([AxisSpec(name, lo, hi, n)], params)


def classify_regions(
    kf_range: tuple[float, float],
    kc_range: tuple[float, float],
    n: int,
    params: MarketParams,
) -> SweepGrid:
    """Best strategy over an ``n x n`` grid in the ``(k_f, k_c)`` plane."""
    return sweep_grid(
        [AxisSpec("k_f", *kf_range, n), AxisSpec("k_c", *kc_range, n)],
        params,
    )


def _profit(params: MarketParams, strategy: StrategyClass) -> float:
    try:
        validate(params)
    except ModelError:
        return math.nan
    out = select_strategy(params).outcome(strategy)
    return out.profit if out.feasible else math.nan


def profit_gap(params: MarketParams, pair: tuple[StrategyClass, StrategyClass]) -> float:
    """``pi_i - pi_j``, NaN when either class is infeasible."""
    i, j = (StrategyClass(s) for s in pair)
    return _profit(params, i) - _profit(params, j)


def find_crossings(
    pair: tuple[StrategyClass, StrategyClass],
    name: str,
    lo: float,
    hi: float,
    params: MarketParams,
    n_scan: int = 61,
    xtol: float = BISECT_XTOL,
) -> list[float]:
    """Values of ``name`` in ``[lo, hi]`` where ``pi_i - pi_j`` changes sign.

    Adjacent scan points where both classes are feasible and the gap changes
    sign are refined by a bracketed root search. Scan intervals touching an
    infeasible point are not searched.
    """
    xs = np.linspace(lo, hi, n_scan)
    gaps = [profit_gap(params.replace(**{name: float(x)}), pair) for x in xs]
    roots = []
    for k in range(n_scan - 1):
        g0, g1 = gaps[k], gaps[k + 1]
        if not (math.isfinite(g0) and math.isfinite(g1)):
            continue
        if g0 == 0.0:
            roots.append(float(xs[k]))
            continue
        if g0 * g1 < 0.0:
            root = optimize.brentq(
                lambda x: profit_gap(params.replace(**{name: x}), pair),
                float(xs[k]),
                float(xs[k + 1]),
                xtol=xtol,
            )
            roots.append(float(root))
    if n_scan and gaps[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


@dataclass(frozen=True)
class RegionBoundary:
    """Sampled indifference curve between two strategy classes.

    ``points`` holds ``(k_f, k_c)`` pairs; ``no_crossing`` lists sampled
    ``k_f`` values where no sign change was found.
    """

    name: str
    points: tuple[tuple[float, float], ...]
    tolerance: float
    no_crossing: tuple[float, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.points


def trace_boundary(
    pair: tuple[StrategyClass, StrategyClass],
    kf_values,
    params: MarketParams,
    kc_range: tuple[float, float] = (0.0, 60.0),
    n_scan: int = 61,
) -> RegionBoundary:
    """Indifference points between two classes along ``k_c`` for each ``k_f``.

    The ``k_c`` scan is restricted to ``k_c < k_f``. A ``k_f`` with no sign
    change is recorded in ``no_crossing`` rather than raising.
    """
    i, j = (StrategyClass(s) for s in pair)
    name = f"{i.value}={j.value}"
    points = []
    missing = []
    for kf in np.atleast_1d(np.asarray(kf_values, dtype=float)):
        kf = float(kf)
        hi = min(kc_range[1], np.nextafter(kf, -math.inf))
        if hi <= kc_range[0]:
            missing.append(kf)
            continue
        roots = find_crossings((i, j), "k_c", kc_range[0], hi, params.replace(k_f=kf), n_scan)
        if not roots:
            missing.append(kf)
        points.extend((kf, kc) for kc in roots)
    return RegionBoundary(name, tuple(points), BISECT_XTOL, tuple(missing))
