"""Market primitives, standing assumptions and the capped inverse demand.

All quantities are unit-agnostic. The benchmark calibration uses US$/bbl for
prices, billion barrels for stocks and years for time.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np


class ModelError(ValueError):
    """Parameters for which the market model is undefined."""


class ConfigError(ValueError):
    """Malformed parameter configuration text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class MarketParams:
    alpha: float  # choke price
    beta: float  # inverse-demand slope
    b: float  # backstop marginal cost, i.e. the price cap
    k_c: float  # cartel marginal extraction cost
    k_f: float  # fringe marginal extraction cost
    r: float  # discount rate
    s0_c: float  # cartel initial reserve
    s0_f: float  # fringe joint initial reserve
    m_f: float  # aggregate fringe extraction capacity
    m_c: float  # cartel extraction capacity

    def replace(self, **changes: float) -> MarketParams:
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


PARAM_NAMES: tuple[str, ...] = tuple(f.name for f in fields(MarketParams))

TABLE1 = MarketParams(
    alpha=225.5,
    beta=4.3,
    b=102.5,
    k_c=18.0,
    k_f=62.5,
    r=0.028,
    s0_c=1212.0,
    s0_f=619.5,
    m_f=28.0,
    m_c=50.0,
)


@dataclass(frozen=True)
class Condition:
    """One standing assumption evaluated at a parameter point.

    ``holds`` is None while the condition cannot be evaluated yet (the
    interior share condition needs the cartel depletion time). ``slack`` is
    signed so that positive means the condition holds with room to spare.
    """

    name: str
    description: str
    holds: bool | None
    slack: float
    lhs: float
    rhs: float

    @property
    def pending(self) -> bool:
        return self.holds is None


@dataclass(frozen=True)
class AssumptionReport:
    capacity: Condition
    a1_double_cap: Condition
    a2_double_kf: Condition
    a3_share_lb_positive: Condition
    a4_resource_order: Condition
    a5_interior_share: Condition

    def conditions(self) -> tuple[Condition, ...]:
        return (
            self.capacity,
            self.a1_double_cap,
            self.a2_double_kf,
            self.a3_share_lb_positive,
            self.a4_resource_order,
            self.a5_interior_share,
        )

    @property
    def all_hold(self) -> bool:
        """True when no evaluated condition fails; pending ones are ignored."""
        return all(c.holds is not False for c in self.conditions())

    def failed(self) -> list[str]:
        return [c.name for c in self.conditions() if c.holds is False]


def _check_fields(params: MarketParams) -> None:
    for name in PARAM_NAMES:
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ModelError(f"{name} must be a finite number, got {value!r}")
    for name in ("alpha", "beta", "b", "r", "m_f", "m_c"):
        if getattr(params, name) <= 0:
            raise ModelError(f"{name} must be strictly positive")
    for name in ("k_c", "s0_c", "s0_f"):
        if getattr(params, name) < 0:
            raise ModelError(f"{name} must be non-negative")
    p = params
    if not (p.k_c < p.k_f < p.b < p.alpha):
        raise ModelError(
            "cost ordering k_c < k_f < b < alpha violated "
            f"(k_c={p.k_c}, k_f={p.k_f}, b={p.b}, alpha={p.alpha})"
        )


def interior_share_condition(params: MarketParams, t_c: float | None) -> Condition:
    desc = "b(2 - e^{-r t_c}) > alpha - beta m_f + k_c (1 - e^{-r t_c})"
    if t_c is None:
        return Condition("a5_interior_share", desc, None, math.nan, math.nan, math.nan)
    p = params
    disc = math.exp(-p.r * t_c)
    lhs = p.b * (2.0 - disc)
    rhs = p.alpha - p.m_f * p.beta + p.k_c * (1.0 - disc)
    return Condition("a5_interior_share", desc, lhs > rhs, lhs - rhs, lhs, rhs)


def validate(params: MarketParams, t_c: float | None = None) -> AssumptionReport:
    """Evaluate every standing assumption for ``params``.

    Non-finite values, non-positive scale parameters (alpha, beta, b, r, m_f,
    m_c), negative stocks or costs and a broken cost ordering
    ``k_c < k_f < b < alpha`` raise :class:`ModelError`. Everything else is
    reported as a :class:`Condition` so callers can decide what is fatal.

    Args:
        params: Parameter point.
        t_c: Cartel depletion time in the share class, if already known.
            Without it the interior share condition stays pending.
    """
    _check_fields(params)
    p = params

    deter_q = (p.alpha - p.k_f) / p.beta
    capacity = Condition(
        "capacity",
        "m_c >= (alpha - k_f)/beta",
        p.m_c >= deter_q,
        p.m_c - deter_q,
        p.m_c,
        deter_q,
    )

    lhs1 = 2.0 * p.b - p.k_c
    a1 = Condition(
        "a1_double_cap", "2b - k_c <= alpha", lhs1 <= p.alpha, p.alpha - lhs1, lhs1, p.alpha
    )

    lhs2 = 2.0 * p.k_f - p.k_c
    a2 = Condition(
        "a2_double_kf", "2k_f - k_c <= alpha", lhs2 <= p.alpha, p.alpha - lhs2, lhs2, p.alpha
    )

    lhs3 = p.alpha - p.beta * p.m_f
    a3 = Condition(
        "a3_share_lb_positive", "alpha - beta m_f - b > 0", lhs3 > p.b, lhs3 - p.b, lhs3, p.b
    )

    t_f = p.s0_f / p.m_f
    denom = p.alpha - p.beta * p.m_f - p.k_f
    # Without a positive fringe margin at full fringe output there is no
    # share phase to order against.
    rhs4 = p.s0_c * p.beta / denom if denom > 0 else -math.inf
    a4 = Condition(
        "a4_resource_order",
        "s0_f/m_f < s0_c beta/(alpha - beta m_f - k_f)",
        t_f < rhs4,
        rhs4 - t_f,
        t_f,
        rhs4,
    )

    return AssumptionReport(capacity, a1, a2, a3, a4, interior_share_condition(p, t_c))


def price(q_c, q_f_total, params: MarketParams):
    """Capped linear inverse demand ``min(alpha - beta (q_c + Q_f), b)``.

    Works elementwise on numpy arrays. The result may be negative for joint
    output beyond ``alpha/beta``; capacity bounds keep equilibrium paths away
    from that region.
    """
    raw = params.alpha - params.beta * (np.asarray(q_c) + np.asarray(q_f_total))
    capped = np.minimum(raw, params.b)
    return float(capped) if capped.ndim == 0 else capped


def parse_config(text: str, defaults: MarketParams = TABLE1) -> MarketParams:
    """Parse ``key = value`` lines into parameters.

    Blank lines and ``#`` comments are ignored. Unknown or repeated keys and
    unparsable values raise :class:`ConfigError` carrying the line number.
    Missing keys fall back to ``defaults``.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in PARAM_NAMES:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigError(f"cannot parse {value!r} as a number", lineno) from None
    return replace(defaults, **values)


def load_config(path: str | Path, defaults: MarketParams = TABLE1) -> MarketParams:
    return parse_config(Path(path).read_text(encoding="utf-8"), defaults)


def format_config(params: MarketParams) -> str:
    return "".join(f"{name} = {getattr(params, name)!r}\n" for name in PARAM_NAMES)
