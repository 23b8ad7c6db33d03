"""Eating-trading algorithm for house allocation with existing tenants.

Tenants whose requests close a cycle swap shares of their houses at once.
Otherwise everyone eats his favorite remaining house; newcomers eat at rate
one and a tenant eats at one plus the rates of those eating his house
("you request my house, I get your rate").
"""
from __future__ import annotations

from dataclasses import dataclass

from .assignment import Assignment
from .errors import CyclePresent, NonTermination
from .problems import HetProblem
from .rational import ONE, ZERO
from .trace import StepTrace, TraceStep


@dataclass
class EtaState:
    agents: tuple  # remaining agents, declared order
    objects: tuple  # remaining objects
    favorites: dict
    owner: dict  # remaining owned object -> remaining tenant
    house: dict  # remaining tenant -> his house, if it remains
    r_agent: dict
    r_object: dict


def _pointer(state: EtaState, i):
    """The agent that ``i`` points to through his favorite, if it is owned."""
    return state.owner.get(state.favorites[i])


def detect_tenant_cycles(state: EtaState) -> list:
    """Cycles of the request graph as ``[agent, object, agent, object, ...]``.

    Each agent points to his favorite, and each owned house to its tenant,
    so every node has at most one successor and cycles are disjoint.
    """
    cycles = []
    done = set()
    for start in state.agents:
        if start in done:
            continue
        path, seen = [], {}
        i = start
        while i is not None and i not in done and i not in seen:
            seen[i] = len(path)
            path.append(i)
            i = _pointer(state, i)
        if i is not None and i in seen:
            members = path[seen[i]:]
            cyc = []
            for a in members:
                cyc.extend([a, state.favorites[a]])
            cycles.append(cyc)
        done.update(path)
    return cycles


def eating_rates(state: EtaState) -> dict:
    """Rate of every remaining agent; raises :class:`CyclePresent` on a tenant cycle."""
    eaters = {}
    for i in state.agents:
        eaters.setdefault(state.favorites[i], []).append(i)
    rates = {}
    visiting = set()

    def rate(j):
        if j in rates:
            return rates[j]
        if j in visiting:
            raise CyclePresent(f"tenant cycle through {j!r}")
        visiting.add(j)
        s = ONE
        h = state.house.get(j)
        if h is not None:
            for i in eaters.get(h, ()):
                s += rate(i)
        visiting.discard(j)
        rates[j] = s
        return s

    for i in state.agents:
        rate(i)
    return {i: rates[i] for i in state.agents}


def run_eta(problem: HetProblem, *, name: str = "eta"):
    agents, objects = problem.agents, problem.objects
    owner_all = problem.owner
    p = Assignment.zeros(agents, objects)
    trace = StepTrace(name, agents, objects, p.copy())
    r_agent = {i: ONE for i in agents}
    r_object = {o: ONE for o in objects}
    limit = max(len(agents) * len(objects), len(agents) + len(objects))

    d = 0
    while True:
        active_i = tuple(i for i in agents if r_agent[i] > 0)
        active_o = tuple(o for o in objects if r_object[o] > 0)
        if not active_i or not active_o:
            break
        d += 1
        if d > limit:
            raise NonTermination(f"{name} did not finish within {limit} phases")
        allowed = set(active_o)
        remaining = set(active_i)
        favorites = {i: next(o for o in problem.preferences[i] if o in allowed) for i in active_i}
        owner = {o: owner_all[o] for o in active_o if owner_all.get(o) in remaining}
        house = {i: o for o, i in owner.items()}
        state = EtaState(active_i, active_o, favorites, owner, house, r_agent, r_object)

        cycles = detect_tenant_cycles(state)
        step = TraceStep(d, "cycle" if cycles else "eat", active_i, active_o, dict(favorites))
        if cycles:
            step.extra["cycles"] = [list(c) for c in cycles]
            amounts = []
            for cyc in cycles:
                amount = min(r_agent[a] if k % 2 == 0 else r_object[a] for k, a in enumerate(cyc))
                amounts.append(amount)
                for i in cyc[0::2]:
                    o = favorites[i]
                    r_agent[i] -= amount
                    r_object[o] -= amount
                    if amount:
                        p.add(i, o, amount)
                        step.assignment_delta.append((i, o, amount))
            step.extra["amounts"] = amounts
        else:
            rates = eating_rates(state)
            load = {}
            for i in active_i:
                load[favorites[i]] = load.get(favorites[i], ZERO) + rates[i]
            t = min([r_agent[i] / rates[i] for i in active_i]
                    + [r_object[o] / s for o, s in load.items()])
            for i in active_i:
                got = rates[i] * t
                o = favorites[i]
                r_agent[i] -= got
                r_object[o] -= got
                p.add(i, o, got)
                step.assignment_delta.append((i, o, got))
            step.extra["rates"] = rates
            step.extra["duration"] = t
        trace.steps.append(step)
    return p, trace
