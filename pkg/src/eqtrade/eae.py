"""Equal access exchange for doctor-hospital matching under laminar
floor/ceiling constraints.

Doctors first receive identical rows whose hospital counts maximize the
total number of placements over the constraint polytope, and then swap
those rights with Equal-BTA. Trading never changes a hospital's count, so
every constraint stays satisfied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .assignment import Assignment
from .bta import lambda_equal, run_bta
from .errors import DimensionMismatch, Infeasible
from .problems import ConstrainedMatchProblem, FeeProblem, LaminarConstraints
from .rational import ZERO


def check_feasible(p: Assignment, c: LaminarConstraints) -> tuple:
    """``(ok, violations)`` for every constraint interval and every row sum."""
    unknown = c.hospitals() - set(p.objects)
    if unknown:
        raise DimensionMismatch(f"constraints mention hospitals {sorted(map(str, unknown))} "
                                "missing from the assignment")
    cols = p.column_sums()
    issues = []
    for s, lo, hi in c.constraints:
        total = sum((cols[o] for o in s), ZERO)
        if not lo <= total <= hi:
            issues.append({"set": sorted(s, key=p.objects.index), "count": total, "floor": lo, "ceiling": hi})
    for o, cap in c.capacities.items():
        if cols[o] > cap:
            issues.append({"set": [o], "count": cols[o], "floor": ZERO, "ceiling": cap})
    for i in p.agents:
        if p.row_sum(i) > 1:
            issues.append({"doctor": i, "row_sum": p.row_sum(i)})
    return not issues, issues


@dataclass
class _Node:
    members: frozenset
    lo: Fraction
    hi: Fraction
    children: list = field(default_factory=list)
    low: Fraction = ZERO  # smallest achievable count given the subtree
    high: Fraction = ZERO  # largest achievable count
    count: Fraction = ZERO


def _tree(problem: ConstrainedMatchProblem) -> _Node:
    """Laminar tree: root over all hospitals, leaves for single hospitals."""
    n = Fraction(len(problem.doctors))
    bounds = {frozenset(problem.hospitals): [ZERO, n]}
    for h in problem.hospitals:
        bounds.setdefault(frozenset([h]), [ZERO, n])
    for h, cap in problem.constraints.capacities.items():
        b = bounds[frozenset([h])]
        b[1] = min(b[1], cap)
    for s, lo, hi in problem.constraints.constraints:
        b = bounds.setdefault(s, [ZERO, n])
        b[0], b[1] = max(b[0], lo), min(b[1], hi)
    order = {h: k for k, h in enumerate(problem.hospitals)}
    sets = sorted(bounds, key=lambda s: (-len(s), min(order[h] for h in s)))
    nodes = {s: _Node(s, *bounds[s]) for s in sets}
    for k, s in enumerate(sets[1:], start=1):
        parent = min((t for t in sets[:k] if s < t), key=len)
        nodes[parent].children.append(nodes[s])
    for node in nodes.values():
        node.children.sort(key=lambda c: min(order[h] for h in c.members))
    return nodes[sets[0]]


def _bottom_up(node: _Node) -> None:
    for c in node.children:
        _bottom_up(c)
    if node.children:
        node.low = max(node.lo, sum((c.low for c in node.children), ZERO))
        node.high = min(node.hi, sum((c.high for c in node.children), ZERO))
    else:
        node.low, node.high = node.lo, node.hi
    if node.low > node.high:
        raise Infeasible(f"no feasible count for hospitals {sorted(map(str, node.members))}: "
                         f"needs at least {node.low} but at most {node.high}")


def _top_down(node: _Node, target: Fraction) -> None:
    node.count = target
    if not node.children:
        return
    spare = target - sum((c.low for c in node.children), ZERO)
    for c in node.children:
        extra = min(spare, c.high - c.low)
        spare -= extra
        _top_down(c, c.low + extra)


def hospital_counts(problem: ConstrainedMatchProblem) -> dict:
    """Feasible hospital counts of largest total: floors first, then fill in declared order."""
    root = _tree(problem)
    _bottom_up(root)
    _top_down(root, root.high)
    counts = {}
    stack = [root]
    while stack:
        node = stack.pop()
        if len(node.members) == 1 and not node.children:
            (h,) = node.members
            counts[h] = node.count
        stack.extend(node.children)
    return {h: counts[h] for h in problem.hospitals}


def efficient_equal_endowment(problem: ConstrainedMatchProblem) -> Assignment:
    counts = hospital_counts(problem)
    n = len(problem.doctors)
    omega = Assignment(problem.doctors, problem.hospitals,
                       {i: {h: counts[h] / n for h in problem.hospitals} for i in problem.doctors})
    ok, issues = check_feasible(omega, problem.constraints)
    if not ok:  # the construction should make this unreachable
        raise Infeasible(f"equal endowment violates constraints: {issues}")
    return omega


def run_eae(problem: ConstrainedMatchProblem, *, name: str = "eae"):
    omega = efficient_equal_endowment(problem)
    fee = FeeProblem(problem.doctors, problem.hospitals, omega.as_dict(), problem.preferences)
    p, trace = run_bta(fee, lambda_equal, name=name)
    trace.meta["endowment"] = omega
    return p, trace
