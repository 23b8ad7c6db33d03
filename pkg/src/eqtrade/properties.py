"""Exact efficiency and fairness checks on random assignments.

Each check returns a :class:`PropertyReport`; a failing report always
carries witnesses that can be re-verified by hand: agent pairs, the cutoff
object where a prefix sum comparison fails, the exact slack, or a cycle of
the relation used for ordinal efficiency.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .rational import ZERO

EQUAL = "equal"
DOMINATES = "dominates"
STRICTLY_DOMINATES = "strictly_dominates"
DOMINATED = "dominated"
INCOMPARABLE = "incomparable"


@dataclass
class PropertyReport:
    name: str
    ok: bool
    witnesses: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _prefix_gaps(l, l2, pref):
    """``(object, prefix of l minus prefix of l2)`` along ``pref``."""
    a = b = ZERO
    for o in pref:
        a += l.get(o, ZERO)
        b += l2.get(o, ZERO)
        yield o, a - b


def sd_compare(l, l2, pref) -> str:
    """Stochastic dominance relation of ``l`` to ``l2`` under the strict order ``pref``.

    Returns one of ``equal``, ``strictly_dominates``, ``dominated`` or
    ``incomparable``. Weak dominance with every prefix equal means the
    lotteries coincide, so plain ``dominates`` never comes back for full
    preference orders; the constant exists for callers that match on it.
    """
    gaps = [g for _, g in _prefix_gaps(l, l2, pref)]
    ge = all(g >= 0 for g in gaps)
    le = all(g <= 0 for g in gaps)
    if ge and le:
        return EQUAL
    if ge:
        return STRICTLY_DOMINATES
    if le:
        return DOMINATED
    return INCOMPARABLE


def sd_shortfall(l, l2, pref):
    """Cutoff where ``l`` trails ``l2`` the most, with the (negative) slack.

    Returns ``None`` when ``l`` weakly sd-dominates ``l2``.
    """
    worst = None
    for o, g in _prefix_gaps(l, l2, pref):
        if g < 0 and (worst is None or g < worst[1]):
            worst = (o, g)
    return worst


def weakly_prefers(l, l2, pref) -> bool:
    return sd_shortfall(l, l2, pref) is None


def max_envy(p_i, p_j, pref) -> Fraction:
    """``max`` over cutoffs of ``prefix(p_j) - prefix(p_i)`` (may be negative)."""
    return max(-g for _, g in _prefix_gaps(p_i, p_j, pref))


# ----------------------------------------------------------------------------
# efficiency


def dominance_relation(p, prefs) -> nx.DiGraph:
    """``o -> o2`` when some agent prefers ``o`` to ``o2`` yet holds some ``o2``."""
    g = nx.DiGraph()
    g.add_nodes_from(p.objects)
    for i in p.agents:
        pref = prefs[i]
        for k, o2 in enumerate(pref):
            if p[i, o2] > 0:
                for o in pref[:k]:
                    if not g.has_edge(o, o2):
                        g.add_edge(o, o2, agent=i)
    return g


def check_ordinal_efficiency(p, prefs, exhaustive_limit=3, max_grid=12) -> PropertyReport:
    g = dominance_relation(p, prefs)
    try:
        cyc = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        cyc = None
    rep = PropertyReport("ordinal_efficiency", cyc is None)
    if cyc is not None:
        rep.witnesses.append({"cycle": [(u, v, g.edges[u, v]["agent"]) for u, v in cyc]})
    short = [i for i in p.agents if p.row_sum(i) < 1]
    if short:
        rep.warnings.append(f"PartialAssignment: rows of {short} sum to less than 1")
        small = len(p.agents) <= exhaustive_limit and len(p.objects) <= exhaustive_limit
        grid = _grid_for(p, p.column_sums())
        if small and grid <= max_grid:
            better = find_sd_improvement(p, prefs, grid=grid)
            if (better is None) != rep.ok:
                rep.warnings.append("exhaustive search disagrees with the cycle test")
            if better is not None:
                rep.ok = False
                rep.witnesses.append({"improvement": better.as_dict()})
    return rep


def _grid_for(p, capacities):
    dens = [v.denominator for i in p.agents for v in p.row(i).values()]
    dens += [Fraction(c).denominator for c in capacities.values()]
    return math.lcm(*dens) if dens else 1


def find_sd_improvement(p, prefs, capacities=None, grid=None):
    """Search a rational grid for a feasible assignment that sd-dominates ``p``.

    Feasible means column sums equal ``capacities`` (the column sums of ``p``
    by default) and row sums at most one. The grid step is ``1/grid`` (by
    default the common denominator of ``p``). Only meant for tiny instances.
    """
    from .assignment import Assignment

    capacities = capacities or p.column_sums()
    grid = grid or _grid_for(p, capacities)
    objects = p.objects
    agents = p.agents
    cap = {o: Fraction(capacities[o]) * grid for o in objects}
    if any(c.denominator != 1 for c in cap.values()):
        return None
    cap = {o: int(c) for o, c in cap.items()}

    def rel(cells, i):
        row = {o: Fraction(c, grid) for o, c in zip(objects, cells)}
        return sd_compare(row, p.row(i), prefs[i])

    options = []
    for i in agents[:-1]:
        rows = []
        for cells in itertools.product(*(range(cap[o] + 1) for o in objects)):
            if sum(cells) <= grid:
                r = rel(cells, i)
                if r in (EQUAL, STRICTLY_DOMINATES):
                    rows.append((cells, r == STRICTLY_DOMINATES))
        options.append(rows)

    last = agents[-1]
    chosen = []

    def search(k, used, strict):
        if k == len(agents) - 1:
            cells = tuple(cap[o] - u for o, u in zip(objects, used))
            if sum(cells) > grid:
                return False
            r = rel(cells, last)
            if r == STRICTLY_DOMINATES or (r == EQUAL and strict):
                chosen.append(cells)
                return True
            return False
        for cells, s in options[k]:
            nxt = tuple(u + c for u, c in zip(used, cells))
            if any(n > cap[o] for n, o in zip(nxt, objects)):
                continue
            chosen.append(cells)
            if search(k + 1, nxt, strict or s):
                return True
            chosen.pop()
        return False

    if not search(0, tuple(0 for _ in objects), False):
        return None
    return Assignment(agents, objects, {i: {o: Fraction(c, grid) for o, c in zip(objects, cells)}
                                        for i, cells in zip(agents, chosen)})


# ----------------------------------------------------------------------------
# individual rationality and fairness in endowment exchange


def check_ir(p, omega, prefs) -> PropertyReport:
    rep = PropertyReport("ir", True)
    for i in p.agents:
        miss = sd_shortfall(p.row(i), omega[i], prefs[i])
        if miss is not None:
            rep.ok = False
            rep.witnesses.append({"agent": i, "cutoff": miss[0], "slack": miss[1]})
    return rep


def check_ete(p, omega, prefs) -> PropertyReport:
    rep = PropertyReport("ete", True)
    for i, j in itertools.combinations(p.agents, 2):
        if omega[i] == omega[j] and tuple(prefs[i]) == tuple(prefs[j]) and p.row(i) != p.row(j):
            rep.ok = False
            rep.witnesses.append({"pair": (i, j)})
    return rep


def _envy_report(name, p, prefs, pairs) -> PropertyReport:
    rep = PropertyReport(name, True)
    for i, j in pairs:
        miss = sd_shortfall(p.row(i), p.row(j), prefs[i])
        if miss is not None:
            rep.ok = False
            rep.witnesses.append({"pair": (i, j), "cutoff": miss[0], "slack": miss[1]})
    return rep


def check_eene(p, omega, prefs) -> PropertyReport:
    """Agents with equal endowments sd-weakly prefer their own rows.

    Witness pairs are ``(envier, envied)``.
    """
    pairs = [(i, j) for i, j in itertools.permutations(p.agents, 2) if omega[i] == omega[j]]
    return _envy_report("eene", p, prefs, pairs)


def envy_bound(omega_i, omega_j) -> Fraction:
    """Total amount by which ``j``'s endowment exceeds ``i``'s, object by object."""
    keys = set(omega_i) | set(omega_j)
    return sum((max(omega_j.get(o, ZERO) - omega_i.get(o, ZERO), ZERO) for o in keys), ZERO)


def check_bounded_envy(p, omega, prefs) -> PropertyReport:
    rep = PropertyReport("bounded_envy", True)
    for i, j in itertools.permutations(p.agents, 2):
        envy = max_envy(p.row(i), p.row(j), prefs[i])
        bound = envy_bound(omega[i], omega[j])
        if envy > bound:
            rep.ok = False
            rep.witnesses.append({"pair": (i, j), "envy": envy, "bound": bound, "slack": bound - envy})
    return rep


def check_fairness(p, omega, prefs) -> dict:
    return {"ete": check_ete(p, omega, prefs),
            "eene": check_eene(p, omega, prefs),
            "bounded_envy": check_bounded_envy(p, omega, prefs)}


def check_envy_free(p, prefs) -> PropertyReport:
    return _envy_report("envy_free", p, prefs, itertools.permutations(p.agents, 2))


# ----------------------------------------------------------------------------
# priority-based notions


def _rank(priorities):
    return {o: {a: k for k, c in enumerate(cl) for a in c} for o, cl in priorities.items()}


def check_ex_ante_stability(p, priorities, prefs, strong=False) -> PropertyReport:
    """No ``i`` with strictly higher priority at ``o`` than a holder ``j`` of ``o``
    while ``i`` holds something worse than ``o``.

    The strong variant also forbids ``i`` tied with ``j`` at ``o`` getting
    less of ``o`` than ``j`` while holding something worse.
    """
    rank = _rank(priorities)
    rep = PropertyReport("strong_ex_ante_stability" if strong else "ex_ante_stability", True)
    for i in p.agents:
        pref = prefs[i]
        for k, o in enumerate(pref):
            worse = [o2 for o2 in pref[k + 1:] if p[i, o2] > 0]
            if not worse:
                continue
            for j in p.agents:
                if j == i or p[j, o] <= 0:
                    continue
                if rank[o][i] < rank[o][j]:
                    rep.ok = False
                    rep.witnesses.append({"triple": (i, j, o), "worse": worse[0], "kind": "justified_envy"})
                elif strong and rank[o][i] == rank[o][j] and p[i, o] < p[j, o]:
                    rep.ok = False
                    rep.witnesses.append({"triple": (i, j, o), "worse": worse[0], "kind": "discrimination"})
    return rep


def check_no_envy_lower_priority(p, priorities, prefs) -> PropertyReport:
    rank = _rank(priorities)
    pairs = [(i, j) for i, j in itertools.permutations(p.agents, 2)
             if all(rank[o][i] <= rank[o][j] for o in p.objects)]
    return _envy_report("no_envy_lower_priority", p, prefs, pairs)


def check_equal_priority_no_envy(p, priorities, prefs) -> PropertyReport:
    rank = _rank(priorities)
    pairs = [(i, j) for i, j in itertools.permutations(p.agents, 2)
             if all(rank[o][i] == rank[o][j] for o in p.objects)]
    return _envy_report("equal_priority_no_envy", p, prefs, pairs)


def check_no_envy_towards_newcomers(p, tenants, prefs) -> PropertyReport:
    newcomers = [i for i in p.agents if i not in tenants]
    pairs = [(j, i) for i in newcomers for j in p.agents if j != i]
    return _envy_report("no_envy_towards_newcomers", p, prefs, pairs)


def check_het_ir(p, tenants, prefs) -> PropertyReport:
    rep = PropertyReport("ir", True)
    for i, home in tenants.items():
        pref = list(prefs[i])
        for o in pref[pref.index(home) + 1:]:
            if p[i, o] > 0:
                rep.ok = False
                rep.witnesses.append({"agent": i, "object": o, "amount": p[i, o], "home": home})
    return rep


def check_identical_types(p, priorities, prefs) -> PropertyReport:
    """Agents with the same preferences and the same priority class at every
    object must receive identical rows."""
    rank = _rank(priorities)
    rep = PropertyReport("identical_types", True)
    for i, j in itertools.combinations(p.agents, 2):
        same = tuple(prefs[i]) == tuple(prefs[j]) and all(rank[o][i] == rank[o][j] for o in p.objects)
        if same and p.row(i) != p.row(j):
            rep.ok = False
            rep.witnesses.append({"pair": (i, j)})
    return rep


def check_demand_bounds(p, lower, upper) -> PropertyReport:
    """Every entry inside its reservation and ceiling, ``lower <= p <= upper``."""
    rep = PropertyReport("demand_bounds", True)
    for i in p.agents:
        for o in p.objects:
            lo, hi = lower[i][o], upper[i][o]
            if not lo <= p[i, o] <= hi:
                rep.ok = False
                rep.witnesses.append({"pair": (i, o), "value": p[i, o], "lower": lo, "upper": hi})
    return rep
