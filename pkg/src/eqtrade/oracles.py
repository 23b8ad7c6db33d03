"""Reference implementations used to cross-check the mechanisms.

Nothing here calls the solver or the mechanism modules: probabilistic serial
and top trading cycles are written from their textbook descriptions, and the
maximum-solution verifier recomputes absorbing sets from a boolean
transitive closure.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Callable

from .assignment import Assignment
from .errors import TiesPresent, TooManyObjects
from .problems import FeeProblem, HousingMarketProblem, PbaProblem

MAX_ENUMERATED_OBJECTS = 6


def run_ps(problem, supply=None) -> Assignment:
    """Probabilistic serial: everyone eats his favorite available object at rate one.

    ``supply`` defaults to ``problem.copies`` when present, else one unit each.
    """
    agents, objects = problem.agents, problem.objects
    if supply is None:
        supply = getattr(problem, "copies", None) or {o: 1 for o in objects}
    left = {o: Fraction(supply[o]) for o in objects}
    need = {i: Fraction(1) for i in agents}
    p = Assignment.zeros(agents, objects)
    while True:
        hungry = [i for i in agents if need[i] > 0]
        avail = [o for o in objects if left[o] > 0]
        if not hungry or not avail:
            return p
        target = {i: next(o for o in problem.preferences[i] if left[o] > 0) for i in hungry}
        count = {}
        for o in target.values():
            count[o] = count.get(o, 0) + 1
        t = min([need[i] for i in hungry] + [left[o] / c for o, c in count.items()])
        for i, o in target.items():
            p.add(i, o, t)
            need[i] -= t
            left[o] -= t


def run_ttc(problem) -> Assignment:
    """Top trading cycles for a housing market or strict-priority allocation."""
    agents, objects = problem.agents, problem.objects
    if isinstance(problem, HousingMarketProblem):
        copies = {o: 1 for o in objects}
        ranking = {o: [problem.owner[o]] + [i for i in agents if i != problem.owner[o]]
                   for o in objects}
    elif isinstance(problem, PbaProblem):
        if any(len(c) > 1 for cl in problem.priorities.values() for c in cl):
            raise TiesPresent("top trading cycles needs strict priorities")
        copies = dict(problem.copies)
        ranking = {o: [c[0] for c in problem.priorities[o]] for o in objects}
    else:
        raise TypeError(f"unsupported problem type {type(problem).__name__}")

    p = Assignment.zeros(agents, objects)
    left_i = list(agents)
    while left_i and any(copies[o] > 0 for o in objects):
        avail = [o for o in objects if copies[o] > 0]
        want = {i: next(o for o in problem.preferences[i] if copies[o] > 0) for i in left_i}
        holder = {o: next(i for i in ranking[o] if i in want) for o in avail}
        # every agent points somewhere, so walking from any agent hits a cycle
        seen, i = [], left_i[0]
        while i not in seen:
            seen.append(i)
            i = holder[want[i]]
        cycle = seen[seen.index(i):]
        for a in cycle:
            p[a, want[a]] = 1
            copies[want[a]] -= 1
        left_i = [a for a in left_i if a not in cycle]
    return p


def _closure(nodes, lam):
    reach = {u: set() for u in nodes}
    for (v, u), s in lam.items():
        if s > 0:
            reach[u].add(v)
    for k in nodes:
        for u in nodes:
            if k in reach[u]:
                reach[u] |= reach[k]
    return reach


def brute_force_blocks(g) -> list:
    """Absorbing sets from a transitive closure: ``u`` plus everything it reaches,
    whenever everything it reaches can reach ``u`` back."""
    reach = _closure(g.nodes, g.lam)
    blocks = []
    for u in g.nodes:
        if reach[u] and all(u in reach[v] for v in reach[u]):
            b = frozenset(reach[u] | {u})
            if b not in blocks:
                blocks.append(b)
    return blocks


def verify_max_solution(g, x) -> tuple:
    """Check a claimed maximum solution; returns ``(ok, reasons)``."""
    reasons = []
    x = {v: Fraction(x.get(v, 0)) for v in g.nodes}
    for v in g.nodes:
        inflow = sum((s * x[u] for (w, u), s in g.lam.items() if w == v), Fraction(0))
        if inflow != x[v]:
            reasons.append(f"fixed point fails at {v!r}: {inflow} != {x[v]}")
        if x[v] < 0:
            reasons.append(f"negative value at {v!r}")
        if x[v] > g.quotas[v]:
            reasons.append(f"quota exceeded at {v!r}: {x[v]} > {g.quotas[v]}")
    blocks = brute_force_blocks(g)
    covered = set().union(*blocks) if blocks else set()
    for v in g.nodes:
        if v not in covered and x[v] != 0:
            reasons.append(f"{v!r} is outside every absorbing set but trades {x[v]}")
    for b in blocks:
        if not any(x[v] == g.quotas[v] for v in b):
            reasons.append(f"no binding quota in block {sorted(map(repr, b))}")
    return not reasons, reasons


def replicate_market(problem: FeeProblem, n: int) -> FeeProblem:
    """``n`` disjoint copies of every agent; copy ``k`` of ``i`` is ``f"{i}#{k}"``."""
    if n < 1:
        raise ValueError("replication factor must be positive")
    if n == 1:
        return problem
    agents, omega, prefs = [], {}, {}
    for i in problem.agents:
        for k in range(1, n + 1):
            a = f"{i}#{k}"
            agents.append(a)
            omega[a] = dict(problem.endowments[i])
            prefs[a] = problem.preferences[i]
    return FeeProblem(agents, problem.objects, omega, prefs)


def sd_excess(lottery, reference, pref) -> Fraction:
    """Largest amount by which ``lottery`` beats ``reference`` on some upper contour set."""
    best = Fraction(0)
    a = b = Fraction(0)
    for o in pref:
        a += lottery.get(o, 0)
        b += reference.get(o, 0)
        best = max(best, a - b)
    return best


@dataclass(frozen=True)
class ManipulationResult:
    agent: object
    truthful: dict
    deviation: dict
    report: tuple
    epsilon: Fraction


def manipulation_gain(problem: FeeProblem, mechanism: Callable, agent) -> ManipulationResult:
    """Best gain ``agent`` can get from any strict misreport, others truthful."""
    if len(problem.objects) > MAX_ENUMERATED_OBJECTS:
        raise TooManyObjects(f"{len(problem.objects)} objects; at most {MAX_ENUMERATED_OBJECTS} enumerable")

    def outcome(prefs):
        out = mechanism(problem.with_preferences(prefs))
        p = out[0] if isinstance(out, tuple) else out
        return p.row(agent)

    truth = problem.preferences[agent]
    honest = outcome(problem.preferences)
    best = ManipulationResult(agent, honest, honest, truth, Fraction(0))
    for report in permutations(problem.objects):
        if report == truth:
            continue
        prefs = dict(problem.preferences)
        prefs[agent] = report
        row = outcome(prefs)
        eps = sd_excess(row, honest, truth)
        if eps > best.epsilon:
            best = ManipulationResult(agent, honest, row, report, eps)
    return best


def replication_series(base: FeeProblem, mechanism: Callable, ns=(1, 2, 4, 8)) -> list:
    """Rows ``(n, agent type, epsilon)``; copies of a type are symmetric, so the
    first copy stands in for all of them."""
    rows = []
    for n in ns:
        market = replicate_market(base, n)
        for i in base.agents:
            who = i if n == 1 else f"{i}#1"
            rows.append((n, i, manipulation_gain(market, mechanism, who).epsilon))
    return rows


def series_maxima(rows) -> dict:
    out = {}
    for n, _, eps in rows:
        out[n] = max(out.get(n, Fraction(0)), eps)
    return out


def is_nonincreasing(values) -> bool:
    values = list(values)
    return all(b <= a for a, b in zip(values, values[1:]))


def feasible_count_vectors(problem) -> list:
    """Every integer hospital count vector meeting the constraints.

    With integral bounds the count polytope has integral vertices (laminar
    families give totally unimodular systems), so comparing against integer
    vectors is enough to test whether a count vector is undominated.
    """
    n = len(problem.doctors)
    caps = problem.constraints.capacities
    ranges = [range(0, int(min(caps.get(h, n), n)) + 1) for h in problem.hospitals]
    out = []
    for counts in product(*ranges):
        if sum(counts) > n:
            continue
        c = dict(zip(problem.hospitals, counts))
        if all(lo <= sum(c[h] for h in s) <= hi for s, lo, hi in problem.constraints.constraints):
            out.append(c)
    return out


def dominating_counts(counts, problem):
    """A feasible integer count vector weakly above ``counts`` and strictly above somewhere."""
    for c in feasible_count_vectors(problem):
        if all(c[h] >= counts[h] for h in problem.hospitals) and any(c[h] > counts[h] for h in problem.hospitals):
            return c
    return None
