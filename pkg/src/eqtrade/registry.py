"""Name tables tying instance models to mechanisms and property checks.

Both the command line and the test suites go through here, so a mechanism
accepts exactly the same instance models everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import properties as pr
from .bta import lambda_equal, lambda_from_table, lambda_proportional, run_bta, run_time_exchange
from .eae import check_feasible, run_eae
from .errors import IncompatibleMechanism
from .eta import run_eta
from .fdat import run_fdat_trading
from . import generators as gen
from .io import model_of
from .oracles import run_ps, run_ttc
from .problems import (ConstrainedMatchProblem, FdatInput, FeeProblem, HetProblem,
                       HouseAllocationProblem, HousingMarketProblem, PbaProblem, TimeExchangeProblem)
from .pta import run_pta
from .trace import StepTrace


def _fee(problem):
    if isinstance(problem, FeeProblem):
        return problem
    if isinstance(problem, (HouseAllocationProblem, HousingMarketProblem)):
        return problem.to_fee()
    if isinstance(problem, TimeExchangeProblem):
        return problem.fee
    return None


def _pba(problem):
    if isinstance(problem, PbaProblem):
        return problem
    if isinstance(problem, (HouseAllocationProblem, HetProblem)):
        return problem.to_pba()
    return None


def _het(problem):
    if isinstance(problem, HetProblem):
        return problem
    if isinstance(problem, (HouseAllocationProblem, HousingMarketProblem)):
        return problem.to_het()
    return None


def _time_exchange(problem):
    if isinstance(problem, TimeExchangeProblem):
        return problem
    if isinstance(problem, FeeProblem):
        return TimeExchangeProblem(problem)
    return None


def _plain(problem, types):
    return problem if isinstance(problem, types) else None


@dataclass(frozen=True)
class Mechanism:
    name: str
    convert: Callable  # instance -> accepted problem or None
    run: Callable  # (problem, rule) -> (assignment, trace or None)
    uses_lambda: bool = False
    defaults: tuple = ()


def _oracle(fn):
    def run(problem, rule):
        return fn(problem), None
    return run


MECHANISMS = {
    "equal-bta": Mechanism("equal-bta", _fee, lambda p, r: run_bta(p, lambda_equal, name="equal-bta"),
                           defaults=("ir", "ordinal-efficiency", "bounded-envy")),
    "proportional-bta": Mechanism("proportional-bta", _fee,
                                  lambda p, r: run_bta(p, lambda_proportional, name="proportional-bta"),
                                  defaults=("ir", "ordinal-efficiency", "bounded-envy")),
    "bta": Mechanism("bta", _fee, lambda p, r: run_bta(p, r, name="bta"), uses_lambda=True,
                     defaults=("ir", "ordinal-efficiency")),
    "time-exchange": Mechanism("time-exchange", _time_exchange,
                               lambda p, r: run_time_exchange(p, r), uses_lambda=True,
                               defaults=("demand-bounds",)),
    "eae": Mechanism("eae", lambda p: _plain(p, ConstrainedMatchProblem), lambda p, r: run_eae(p),
                     defaults=("feasibility", "envy-free")),
    "pta": Mechanism("pta", _pba, lambda p, r: run_pta(p),
                     defaults=("ordinal-efficiency", "no-envy-lower-priority")),
    "eta": Mechanism("eta", _het, lambda p, r: run_eta(p),
                     defaults=("ordinal-efficiency", "het-ir", "no-envy-towards-newcomers")),
    "fdat-trading": Mechanism("fdat-trading", lambda p: _plain(p, FdatInput), lambda p, r: run_fdat_trading(p),
                              defaults=("ex-ante-stability", "identical-types")),
    "ps": Mechanism("ps", lambda p: _plain(p, (HouseAllocationProblem, PbaProblem)), _oracle(run_ps),
                    defaults=("ordinal-efficiency", "envy-free")),
    "ttc": Mechanism("ttc", lambda p: _plain(p, (HousingMarketProblem, PbaProblem)), _oracle(run_ttc),
                     defaults=("ordinal-efficiency",)),
}


def lambda_rule(kind: str = "equal", table=None):
    """``equal``, ``proportional`` or ``file`` (needs ``table``)."""
    if kind == "equal":
        return lambda_equal
    if kind == "proportional":
        return lambda_proportional
    if kind == "file":
        if table is None:
            raise ValueError("--lambda file needs a lambda table")
        return lambda_from_table(table)
    raise ValueError(f"unknown lambda kind {kind!r}")


def accepted(mechanism: str, problem):
    """Convert ``problem`` to what ``mechanism`` runs on, or raise IncompatibleMechanism."""
    if mechanism not in MECHANISMS:
        raise IncompatibleMechanism(f"unknown mechanism {mechanism!r}; choose from {sorted(MECHANISMS)}")
    converted = MECHANISMS[mechanism].convert(problem)
    if converted is None:
        raise IncompatibleMechanism(f"mechanism {mechanism} does not accept {model_of(problem)} instances")
    return converted


def run_mechanism(mechanism: str, problem, rule=lambda_equal):
    """Run by name; returns ``(assignment, trace or None)``."""
    converted = accepted(mechanism, problem)
    p, trace = MECHANISMS[mechanism].run(converted, rule)
    if trace is not None and not isinstance(trace, StepTrace):
        raise TypeError("mechanism returned an unexpected trace object")
    return p, trace


# ----------------------------------------------------------------------------
# properties


def _endowments(problem):
    fee = _fee(problem)
    return fee.endowments if fee is not None else None


def _priorities(problem):
    if isinstance(problem, FdatInput):
        return problem.priorities
    pba = _pba(problem)
    return pba.priorities if pba is not None else None


def _tenants(problem):
    if isinstance(problem, HetProblem):
        return problem.tenants
    if isinstance(problem, HousingMarketProblem):
        return {i: o for o, i in problem.owner.items()}
    return None


def _feasibility(p, problem):
    ok, issues = check_feasible(p, problem.constraints)
    return pr.PropertyReport("feasibility", ok, issues)


# name -> (context needed, check taking (p, context, prefs))
PROPERTIES = {
    "ir": (_endowments, pr.check_ir),
    "ete": (_endowments, pr.check_ete),
    "eene": (_endowments, pr.check_eene),
    "bounded-envy": (_endowments, pr.check_bounded_envy),
    "ordinal-efficiency": (None, lambda p, _, prefs: pr.check_ordinal_efficiency(p, prefs)),
    "envy-free": (None, lambda p, _, prefs: pr.check_envy_free(p, prefs)),
    "ex-ante-stability": (_priorities, pr.check_ex_ante_stability),
    "strong-ex-ante-stability": (_priorities,
                                 lambda p, c, prefs: pr.check_ex_ante_stability(p, c, prefs, strong=True)),
    "no-envy-lower-priority": (_priorities, pr.check_no_envy_lower_priority),
    "equal-priority-no-envy": (_priorities, pr.check_equal_priority_no_envy),
    "identical-types": (_priorities, pr.check_identical_types),
    "het-ir": (_tenants, pr.check_het_ir),
    "no-envy-towards-newcomers": (_tenants, pr.check_no_envy_towards_newcomers),
    "demand-bounds": (lambda q: q if isinstance(q, TimeExchangeProblem) else None,
                      lambda p, q, _: pr.check_demand_bounds(p, q.lower, q.upper)),
    "feasibility": (lambda q: q if isinstance(q, ConstrainedMatchProblem) else None, None),
}


def evaluate(names, p, problem) -> dict:
    """Run the named checks of ``p`` against ``problem``; ordered like ``names``."""
    out = {}
    for name in names:
        if name not in PROPERTIES:
            raise IncompatibleMechanism(f"unknown property {name!r}; choose from {sorted(PROPERTIES)}")
        context, check = PROPERTIES[name]
        ctx = context(problem) if context else None
        if context and ctx is None:
            raise IncompatibleMechanism(f"property {name} is not defined for {model_of(problem)} instances")
        if name == "feasibility":
            out[name] = _feasibility(p, ctx)
        else:
            out[name] = check(p, ctx, problem.preferences)
    return out


def _feasible_laminar(rng):
    from .eae import hospital_counts
    from .errors import Infeasible
    while True:
        problem = gen.random_laminar_problem(rng)
        try:
            hospital_counts(problem)
        except Infeasible:
            continue
        return problem


# mechanism -> random instance generator taking a ``random.Random``
SUITE_GENERATORS = {
    "equal-bta": gen.random_fee,
    "proportional-bta": gen.random_fee,
    "bta": gen.random_fee,
    "time-exchange": gen.random_time_exchange,
    "eae": _feasible_laminar,
    "pta": gen.random_pba,
    "eta": gen.random_het,
    "fdat-trading": gen.random_fdat_input,
    "ps": gen.random_house_allocation,
    "ttc": gen.random_housing_market,
}
