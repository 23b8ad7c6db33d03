"""Exact trading algorithms for market design.

Every mechanism reduces each trading step to one linear system: nodes split
their demand over the nodes they point to, and the largest fixed point within
the trading quotas says how much of each node changes hands. All arithmetic is
exact over the rationals.
"""
from .assignment import Assignment
from .bta import (equal_bta, lambda_equal, lambda_from_table, lambda_proportional, proportional_bta,
                  run_bta, run_time_exchange)
from .eae import check_feasible, efficient_equal_endowment, run_eae
from .errors import (CyclePresent, DegenerateBlock, DimensionMismatch, DocumentError, EqTradeError,
                     IncompatibleMechanism, Infeasible, InvalidLambda, InvalidProblem, InvalidTradeGraph,
                     NonTermination, NotAbsorbing, NotExAnteStable, TiesPresent, TooManyObjects)
from .eta import run_eta
from .fdat import build_envy_graph, run_fdat_trading, trim_to_cyclic_core
from .io import load_fixture, parse_instance, serialize_instance
from .problems import (ConstrainedMatchProblem, FdatInput, FeeProblem, HetProblem, HouseAllocationProblem,
                       HousingMarketProblem, LaminarConstraints, PbaProblem, TimeExchangeProblem)
from .pta import run_pta
from .solver import TradeGraph, absorbing_sets, block_eigenvector, max_solution
from .trace import StepTrace, TraceStep

__version__ = "0.1.0"

__all__ = [
    "Assignment", "ConstrainedMatchProblem", "CyclePresent", "DegenerateBlock", "DimensionMismatch",
    "DocumentError", "EqTradeError", "FdatInput", "FeeProblem", "HetProblem", "HouseAllocationProblem",
    "HousingMarketProblem", "IncompatibleMechanism", "Infeasible", "InvalidLambda", "InvalidProblem",
    "InvalidTradeGraph", "LaminarConstraints", "NonTermination", "NotAbsorbing", "NotExAnteStable",
    "PbaProblem", "StepTrace", "TiesPresent", "TimeExchangeProblem", "TooManyObjects", "TraceStep",
    "TradeGraph", "absorbing_sets", "block_eigenvector", "build_envy_graph", "check_feasible",
    "efficient_equal_endowment", "equal_bta", "lambda_equal", "lambda_from_table", "lambda_proportional",
    "load_fixture", "max_solution", "parse_instance", "proportional_bta", "run_bta", "run_eae", "run_eta",
    "run_fdat_trading", "run_pta", "run_time_exchange", "serialize_instance", "trim_to_cyclic_core",
]
