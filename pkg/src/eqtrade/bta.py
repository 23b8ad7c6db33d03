"""Balanced trading algorithms for fractional endowment exchange.

At every step each remaining agent points to his favorite remaining object
and every object points to its owners with weights ``lam[i, o]`` chosen by a
lambda rule. The per-pair budget ``lam[i, o] * x_o <= omega[i, o]`` becomes
the node quota ``q_o = min omega[i, o] / lam[i, o]`` because an object's
outflow splits in fixed proportions, so the generic solver applies as is.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .assignment import Assignment
from .errors import InvalidLambda, NonTermination
from .problems import FeeProblem, TimeExchangeProblem
from .rational import ONE, ZERO, as_fraction
from .solver import TradeGraph, max_solution
from .trace import StepTrace, TraceStep


@dataclass(frozen=True)
class BtaState:
    """What a lambda rule gets to see at step ``step``.

    ``omega`` holds the amounts owners may still trade (remaining endowment,
    minus reservations in the time-exchange variant).
    """

    step: int
    agents: tuple
    objects: tuple
    omega: Mapping
    p: Assignment
    favorites: Mapping


LambdaRule = Callable[[BtaState], Mapping]


def lambda_equal(state: BtaState) -> dict:
    """Every current owner of ``o`` supplies the same share of its outflow."""
    lam = {}
    for o in state.objects:
        owners = [i for i in state.agents if state.omega[i][o] > 0]
        for i in owners:
            lam[i, o] = as_fraction(1) / len(owners)
    return lam


def lambda_proportional(state: BtaState) -> dict:
    """Owners supply in proportion to what they still hold."""
    lam = {}
    for o in state.objects:
        total = sum((state.omega[i][o] for i in state.agents), ZERO)
        if total == 0:
            continue
        for i in state.agents:
            if state.omega[i][o] > 0:
                lam[i, o] = state.omega[i][o] / total
    return lam


def lambda_from_table(table: Mapping) -> LambdaRule:
    """Rule replaying a fixed schedule ``{step: {(agent, object): share}}``."""
    fixed = {int(d): {k: as_fraction(v) for k, v in rows.items()} for d, rows in table.items()}

    def rule(state: BtaState) -> dict:
        if state.step not in fixed:
            raise InvalidLambda(f"no lambda given for step {state.step}")
        return dict(fixed[state.step])

    return rule


RULES = {"equal": lambda_equal, "proportional": lambda_proportional}


def check_lambda(state: BtaState, lam: Mapping) -> list:
    """Problems with a rule's output; empty when the matrix is admissible."""
    issues = []
    active_i, active_o = set(state.agents), set(state.objects)
    for (i, o), v in lam.items():
        if v == 0:
            continue
        if i not in active_i or o not in active_o:
            issues.append(f"share for ({i!r}, {o!r}) outside the remaining market")
        elif v < 0 or v > 1:
            issues.append(f"share for ({i!r}, {o!r}) is {v}, outside [0, 1]")
        elif state.omega[i][o] <= 0:
            issues.append(f"({i!r}, {o!r}) has a positive share but nothing to trade")
    for o in state.objects:
        total = sum((lam.get((i, o), ZERO) for i in state.agents), ZERO)
        if total != 1:
            issues.append(f"shares of {o!r} sum to {total}")
    return issues


def _agent(i):
    return ("agent", i)


def _object(o):
    return ("object", o)


def _trade_step(state, rule, agent_quota, trace_kind):
    """Build the step graph, solve it, and return ``(TraceStep, x, lam)``."""
    lam = {k: as_fraction(v) for k, v in rule(state).items()}
    issues = check_lambda(state, lam)
    if issues:
        raise InvalidLambda(f"step {state.step}: " + "; ".join(issues))

    nodes = [_agent(i) for i in state.agents] + [_object(o) for o in state.objects]
    columns = {}
    quotas = {}
    for i in state.agents:
        fav = state.favorites.get(i)
        if fav is not None:
            columns[_agent(i)] = {_object(fav): ONE}
        quotas[_agent(i)] = agent_quota(i)
    for o in state.objects:
        col = {}
        budget = None
        for i in state.agents:
            share = lam.get((i, o), ZERO)
            if share > 0:
                col[_agent(i)] = share
                cap = state.omega[i][o] / share
                budget = cap if budget is None else min(budget, cap)
        columns[_object(o)] = col
        quotas[_object(o)] = budget if budget is not None else ZERO
    g = TradeGraph.from_columns(nodes, quotas, columns)
    sol = max_solution(g)

    step = TraceStep(
        index=state.step,
        kind=trace_kind,
        agents=tuple(state.agents),
        objects=tuple(state.objects),
        favorites=dict(state.favorites),
        lam=dict(g.lam),
        quotas=dict(g.quotas),
        x=dict(sol.x),
        blocks=[list(b) for b in sol.partition.blocks],
        binding=[list(b.binding) for b in sol.blocks],
    )
    capped = [i for i in state.agents
              if sol.x[_agent(i)] > 0 and sol.x[_agent(i)] == quotas[_agent(i)]]
    if capped:
        step.extra["demand_cap_binding"] = capped
    return step, sol.x, lam


def _favorite(pref, allowed):
    for o in pref:
        if o in allowed:
            return o
    return None


def run_bta(problem: FeeProblem, rule: LambdaRule = lambda_equal, *, name: str = "bta"):
    """Run a balanced trading algorithm; returns ``(assignment, trace)``."""
    agents, objects = problem.agents, problem.objects
    omega = {i: dict(problem.endowments[i]) for i in agents}
    p = Assignment.zeros(agents, objects)
    trace = StepTrace(name, agents, objects, p.copy())
    limit = len(agents) * len(objects)

    active_i = [i for i in agents if sum(omega[i].values(), ZERO) > 0]
    active_o = [o for o in objects if any(omega[i][o] > 0 for i in active_i)]
    d = 0
    while active_o:
        d += 1
        if d > limit:
            raise NonTermination(f"{name} did not finish within {limit} steps")
        allowed = set(active_o)
        favorites = {i: _favorite(problem.preferences[i], allowed) for i in active_i}
        state = BtaState(d, tuple(active_i), tuple(active_o), omega, p.copy(), favorites)
        step, x, lam = _trade_step(state, rule, lambda i: ONE - p.row_sum(i), "trade")
        _apply(step, x, lam, state, omega, p)
        trace.steps.append(step)
        active_i = [i for i in agents if sum(omega[i].values(), ZERO) > 0]
        active_o = [o for o in objects if any(omega[i][o] > 0 for i in active_i)]
    return p, trace


def _apply(step, x, lam, state, omega, p):
    for i in state.agents:
        xi = x[_agent(i)]
        if xi:
            fav = state.favorites[i]
            p.add(i, fav, xi)
            step.assignment_delta.append((i, fav, xi))
    for (i, o), share in lam.items():
        moved = share * x[_object(o)]
        if moved:
            omega[i][o] -= moved
            step.endowment_delta.append((i, o, -moved))


def run_time_exchange(problem: TimeExchangeProblem, rule: LambdaRule = lambda_equal,
                      *, name: str = "time-exchange"):
    """BTA with per-service demand ceilings and reservations.

    The reserved amount ``lower[i][o]`` is service ``i`` provides to himself,
    so it is part of his consumption from the start and only the surplus
    above it is traded. The ceiling caps consumption including that
    reservation, which keeps every entry of the result inside
    ``[lower, upper]``. An agent whose admissible services are all filled
    sits the step out, and so does the surplus he owns. Supply nobody can take when trading stops is not
    consumed by anyone; it is listed under ``trace.meta["unsold"]``.
    """
    fee = problem.fee
    agents, objects = fee.agents, fee.objects
    lo, up = problem.lower, problem.upper
    omega = {i: dict(fee.endowments[i]) for i in agents}
    p = Assignment(agents, objects, lo)
    trace = StepTrace(name, agents, objects, p.copy())
    limit = 2 * len(agents) * len(objects)

    def tradable(i, o):
        return omega[i][o] - lo[i][o]

    d = 0
    while True:
        # an owner who cannot take anything sits out and his supply with him,
        # which may leave others without a favorite; shrink until stable
        active_i = [i for i in agents if any(tradable(i, o) > 0 for o in objects)]
        while True:
            active_o = [o for o in objects if any(tradable(i, o) > 0 for i in active_i)]
            favorites = {}
            for i in active_i:
                fav = _favorite(fee.preferences[i], {o for o in active_o if p[i, o] < up[i][o]})
                if fav is not None:
                    favorites[i] = fav
            if len(favorites) == len(active_i):
                break
            active_i = [i for i in active_i if i in favorites]
        if not active_i:
            break
        d += 1
        if d > limit:
            raise NonTermination(f"{name} did not finish within {limit} steps")
        spare = {i: {o: tradable(i, o) for o in objects} for i in active_i}
        state = BtaState(d, tuple(active_i), tuple(active_o), spare, p.copy(), favorites)
        step, x, lam = _trade_step(
            state, rule, lambda i: up[i][favorites[i]] - p[i, favorites[i]], "trade")
        if not any(x.values()):
            break
        _apply(step, x, lam, state, omega, p)
        trace.steps.append(step)

    trace.meta["unsold"] = [(i, o, tradable(i, o)) for i in agents for o in objects if tradable(i, o) > 0]
    return p, trace


def resolve_rule(name_or_rule) -> LambdaRule:
    if callable(name_or_rule):
        return name_or_rule
    try:
        return RULES[name_or_rule]
    except KeyError:
        raise InvalidLambda(f"unknown lambda rule {name_or_rule!r}") from None


def equal_bta(problem: FeeProblem):
    return run_bta(problem, lambda_equal, name="equal-bta")


def proportional_bta(problem: FeeProblem):
    return run_bta(problem, lambda_proportional, name="proportional-bta")
