"""Random instances for the property and equivalence suites.

Every generator takes a ``random.Random`` so suites are reproducible from a
seed.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .assignment import Assignment
from .problems import (ConstrainedMatchProblem, FdatInput, FeeProblem, HetProblem,
                       HouseAllocationProblem, HousingMarketProblem, LaminarConstraints,
                       PbaProblem, TimeExchangeProblem)
from .solver import TradeGraph


def _names(prefix, n):
    return [f"{prefix}{k}" for k in range(1, n + 1)]


def _shuffled(rng, items):
    items = list(items)
    rng.shuffle(items)
    return items


def _composition(rng, total, parts):
    """Random nonnegative integers of length ``parts`` summing to ``total``."""
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def random_preferences(rng, agents, objects) -> dict:
    return {i: _shuffled(rng, objects) for i in agents}


def random_fee(rng: random.Random, max_agents=6, max_objects=6, max_den=12,
               n_agents=None, n_objects=None) -> FeeProblem:
    n = n_agents or rng.randint(1, max_agents)
    m = n_objects or rng.randint(1, max_objects)
    agents, objects = _names("i", n), _names("o", m)
    omega = {}
    for i in agents:
        den = rng.randint(1, max_den)
        mass = rng.randint(1, den)
        counts = _composition(rng, mass, m)
        omega[i] = {o: Fraction(c, den) for o, c in zip(objects, counts) if c}
    return FeeProblem(agents, objects, omega, random_preferences(rng, agents, objects))


def random_house_allocation(rng, max_size=6, n=None) -> HouseAllocationProblem:
    n = n or rng.randint(1, max_size)
    agents, objects = _names("i", n), _names("o", n)
    return HouseAllocationProblem(agents, objects, random_preferences(rng, agents, objects))


def random_housing_market(rng, max_size=6, n=None) -> HousingMarketProblem:
    n = n or rng.randint(1, max_size)
    agents, objects = _names("i", n), _names("o", n)
    owner = dict(zip(objects, _shuffled(rng, agents)))
    return HousingMarketProblem(agents, objects, owner, random_preferences(rng, agents, objects))


def random_het(rng, max_agents=6, max_objects=6) -> HetProblem:
    n, m = rng.randint(1, max_agents), rng.randint(1, max_objects)
    agents, objects = _names("i", n), _names("o", m)
    k = rng.randint(0, min(n, m))
    tenants = dict(zip(rng.sample(agents, k), rng.sample(objects, k)))
    return HetProblem(agents, objects, tenants, random_preferences(rng, agents, objects))


def random_weak_order(rng, agents, tie_prob=0.5) -> list:
    order = _shuffled(rng, agents)
    classes = [[order[0]]] if order else []
    for a in order[1:]:
        if rng.random() < tie_prob:
            classes[-1].append(a)
        else:
            classes.append([a])
    return classes


def random_pba(rng, max_agents=6, max_objects=6, max_copies=2, tie_prob=0.5,
               n_agents=None, n_objects=None) -> PbaProblem:
    n = n_agents or rng.randint(1, max_agents)
    m = n_objects or rng.randint(1, max_objects)
    agents, objects = _names("i", n), _names("o", m)
    copies = {o: rng.randint(1, max_copies) for o in objects}
    pri = {o: random_weak_order(rng, agents, tie_prob) for o in objects}
    return PbaProblem(agents, objects, copies, pri, random_preferences(rng, agents, objects))


def random_time_exchange(rng, max_agents=4, max_objects=4, max_den=6) -> TimeExchangeProblem:
    fee = random_fee(rng, max_agents, max_objects, max_den)
    upper, lower = {}, {}
    for i in fee.agents:
        upper[i], lower[i] = {}, {}
        for o in fee.objects:
            w = fee.endowments[i][o]
            upper[i][o] = w + (1 - w) * Fraction(rng.randint(0, 4), 4)
            lower[i][o] = w * Fraction(rng.randint(0, 2), 4)
    return TimeExchangeProblem(fee, upper, lower)


def random_trade_graph(rng, max_nodes=10, max_den=6, zero_quota_prob=0.0,
                       need_block=True, need_residual=False) -> TradeGraph:
    """Random valid graph; retries until the requested structure is present."""
    from .oracles import brute_force_blocks

    while True:
        n = rng.randint(2, max_nodes)
        nodes = list(range(n))
        lam = {}
        for u in nodes:
            k = rng.choice([0, 1, 1, 2, 2, 3])
            targets = rng.sample([v for v in nodes if v != u], min(k, n - 1))
            weights = [rng.randint(1, 4) for _ in targets]
            total = sum(weights)
            for v, w in zip(targets, weights):
                lam[v, u] = Fraction(w, total)
        quotas = {}
        for v in nodes:
            if rng.random() < zero_quota_prob:
                quotas[v] = Fraction(0)
            else:
                quotas[v] = Fraction(rng.randint(1, max_den), rng.randint(1, max_den))
        g = TradeGraph(nodes, quotas, lam)
        blocks = brute_force_blocks(g)
        if need_block and not blocks:
            continue
        if need_residual and len(set().union(*blocks) if blocks else set()) == n:
            continue
        return g


def random_laminar_problem(rng, max_doctors=4, max_hospitals=4, max_bound=3):
    """Small doctor-hospital instance with a random laminar family.

    Sets come from a random hierarchy: a region and possibly nested sub-regions
    or disjoint siblings. Floors are drawn at or below ceilings; instances may
    be infeasible and callers are expected to filter.
    """
    n, m = rng.randint(1, max_doctors), rng.randint(1, max_hospitals)
    doctors, hospitals = _names("d", n), _names("h", m)
    family = []

    def grow(pool, depth):
        if not pool or depth > 2:
            return
        pool = _shuffled(rng, pool)
        while pool:
            size = rng.randint(1, len(pool))
            part, pool = pool[:size], pool[size:]
            if rng.random() < 0.6:
                hi = rng.randint(0, max_bound)
                lo = rng.randint(0, hi)
                family.append((frozenset(part), lo, hi))
            if len(part) > 1 and rng.random() < 0.5:
                grow(part, depth + 1)

    grow(hospitals, 0)
    caps = {h: rng.randint(0, max_bound) for h in hospitals if rng.random() < 0.5}
    cons = LaminarConstraints(tuple(family), caps)
    return ConstrainedMatchProblem(doctors, hospitals, random_preferences(rng, doctors, hospitals), cons)


def tie_broken_deferred_acceptance(rng, agents, objects, copies, priorities, preferences) -> Assignment:
    """Student-proposing deferred acceptance after breaking priority ties at random.

    Test utility only: it produces a deterministic stable matching that is
    ex-ante stable for the original weak priorities.
    """
    rank = {}
    for o in objects:
        order = []
        for c in priorities[o]:
            order.extend(_shuffled(rng, c))
        rank[o] = {a: k for k, a in enumerate(order)}
    nxt = {i: 0 for i in agents}
    held = {o: [] for o in objects}
    free = list(agents)
    while free:
        i = free.pop(0)
        if nxt[i] >= len(objects):
            continue
        o = preferences[i][nxt[i]]
        nxt[i] += 1
        held[o].append(i)
        held[o].sort(key=rank[o].__getitem__)
        if len(held[o]) > copies[o]:
            free.append(held[o].pop())
    p = Assignment.zeros(agents, objects)
    for o, hs in held.items():
        for i in hs:
            p[i, o] = 1
    return p


def random_fdat_input(rng, max_agents=5, max_objects=4, max_copies=2, draws=3, n_types=None,
                      tie_prob=0.4) -> FdatInput:
    """Ex-ante stable input built from tie-broken deferred acceptance.

    Agents come in types (same preferences, tied with each other at every
    object). Several tie-breaking draws are averaged, then rows are averaged
    over agents with identical preferences and priority standing. Averaging
    can break ex-ante stability, so candidates are checked and redrawn.
    """
    from .properties import check_ex_ante_stability

    while True:
        n = rng.randint(2, max_agents)
        m = rng.randint(1, max_objects)
        agents, objects = _names("i", n), _names("o", m)
        k = n_types or rng.randint(1, n)
        type_of = {i: (t if t < k else rng.randrange(k)) for t, i in enumerate(agents)}
        type_pref = {t: _shuffled(rng, objects) for t in range(k)}
        prefs = {i: type_pref[type_of[i]] for i in agents}
        copies = {o: rng.randint(1, max_copies) for o in objects}
        pri = {}
        for o in objects:
            classes = random_weak_order(rng, list(range(k)), tie_prob)
            pri[o] = [[i for i in agents if type_of[i] in c] for c in classes]
        total = Assignment.zeros(agents, objects)
        for _ in range(draws):
            q = tie_broken_deferred_acceptance(rng, agents, objects, copies, pri, prefs)
            for i, o, v in q.support():
                total.add(i, o, Fraction(v, draws))
        rank = {o: {a: c for c, cl in enumerate(pri[o]) for a in cl} for o in objects}
        groups = {}
        for i in agents:
            key = (tuple(prefs[i]), tuple(rank[o][i] for o in objects))
            groups.setdefault(key, []).append(i)
        p = Assignment.zeros(agents, objects)
        for members in groups.values():
            for o in objects:
                avg = sum((total[i, o] for i in members), Fraction(0)) / len(members)
                for i in members:
                    p[i, o] = avg
        fin = FdatInput(p, pri, prefs)
        if check_ex_ante_stability(p, fin.priorities, fin.preferences).ok:
            return fin
