"""Stackelberg cartel-versus-fringe equilibria for an exhaustible resource with a backstop price."""

from .model import TABLE1, AssumptionReport, ConfigError, MarketParams, ModelError, price, validate
from .phases import CostateConvention, InfeasibleError, PhaseLabel
from .horizon import HorizonError, HorizonSolution, solve_t_c, tau_c
from .strategy import (
    StrategyClass,
    StrategyComparison,
    StrategyOutcome,
    profit_deter,
    profit_share,
    profit_wait,
    select_strategy,
)
from .trajectory import Trajectory, render
from .oracle import OracleReport, run_oracle

__version__ = "0.1.0"

__all__ = [
    "TABLE1",
    "AssumptionReport",
    "ConfigError",
    "CostateConvention",
    "HorizonError",
    "HorizonSolution",
    "InfeasibleError",
    "MarketParams",
    "ModelError",
    "OracleReport",
    "PhaseLabel",
    "StrategyClass",
    "StrategyComparison",
    "StrategyOutcome",
    "Trajectory",
    "price",
    "profit_deter",
    "profit_share",
    "profit_wait",
    "render",
    "run_oracle",
    "select_strategy",
    "solve_t_c",
    "tau_c",
    "validate",
]
