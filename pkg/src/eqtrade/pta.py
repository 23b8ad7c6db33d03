"""Priority trading algorithm for allocation with weak priorities.

Only the remaining agents in an object's top priority class may trade it,
and they do so in equal amounts.
"""
from __future__ import annotations

from fractions import Fraction

from .assignment import Assignment
from .errors import NonTermination
from .problems import PbaProblem
from .rational import ONE, ZERO
from .solver import TradeGraph, max_solution
from .trace import StepTrace, TraceStep


def top_class(classes, remaining) -> tuple:
    """Highest-priority members of ``remaining`` under the weak order ``classes``."""
    for c in classes:
        present = tuple(a for a in c if a in remaining)
        if present:
            return present
    return ()


def run_pta(problem: PbaProblem, *, name: str = "pta"):
    agents, objects = problem.agents, problem.objects
    p = Assignment.zeros(agents, objects)
    trace = StepTrace(name, agents, objects, p.copy())
    used_i = {i: ZERO for i in agents}
    used_o = {o: ZERO for o in objects}
    limit = len(agents) * len(objects)
    order = {i: k for k, i in enumerate(agents)}

    active_i = list(agents)
    active_o = list(objects)
    d = 0
    while active_i and active_o:
        d += 1
        if d > limit:
            raise NonTermination(f"{name} did not finish within {limit} steps")
        remaining = set(active_i)
        allowed = set(active_o)
        favorites = {i: next(o for o in problem.preferences[i] if o in allowed) for i in active_i}
        holders = {o: tuple(sorted(top_class(problem.priorities[o], remaining), key=order.__getitem__))
                   for o in active_o}

        nodes = [("agent", i) for i in active_i] + [("object", o) for o in active_o]
        columns = {("agent", i): {("object", favorites[i]): ONE} for i in active_i}
        for o in active_o:
            share = Fraction(1, len(holders[o]))
            columns["object", o] = {("agent", i): share for i in holders[o]}
        quotas = {("agent", i): ONE - used_i[i] for i in active_i}
        quotas.update({("object", o): problem.copies[o] - used_o[o] for o in active_o})
        g = TradeGraph.from_columns(nodes, quotas, columns)
        sol = max_solution(g)

        step = TraceStep(d, "trade", tuple(active_i), tuple(active_o), dict(favorites),
                         dict(g.lam), dict(g.quotas), dict(sol.x),
                         [list(b) for b in sol.partition.blocks],
                         [list(b.binding) for b in sol.blocks])
        step.extra["top_priority"] = {o: list(h) for o, h in holders.items()}
        for i in active_i:
            xi = sol.x["agent", i]
            if xi:
                used_i[i] += xi
                p.add(i, favorites[i], xi)
                step.assignment_delta.append((i, favorites[i], xi))
        for o in active_o:
            used_o[o] += sol.x["object", o]
        trace.steps.append(step)

        active_i = [i for i in agents if used_i[i] < 1]
        active_o = [o for o in objects if used_o[o] < problem.copies[o]]
    return p, trace
