"""Trading stage that improves an ex-ante stable assignment.

Nodes are (agent, object) pairs with positive probability. A node points to
the holdings it envies when its agent has the highest priority among all
enviers of that holding. After trimming nodes that cannot lie on a cycle,
each node splits its demand equally over the nodes it points to and the
generic solver decides how much of every holding changes hands.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .assignment import Assignment
from .errors import NonTermination, NotExAnteStable
from .problems import FdatInput, priority_ranks
from .properties import check_ex_ante_stability
from .rational import ZERO
from .solver import TradeGraph, max_solution
from .trace import StepTrace, TraceStep


@dataclass(frozen=True)
class EnvyGraph:
    nodes: tuple
    edges: frozenset  # (from node, to node)

    def out(self, v) -> tuple:
        return tuple(w for w in self.nodes if (v, w) in self.edges)

    def into(self, v) -> tuple:
        return tuple(u for u in self.nodes if (u, v) in self.edges)

    def __len__(self) -> int:
        return len(self.nodes)


def build_envy_graph(p: Assignment, priorities, preferences) -> EnvyGraph:
    rank = priority_ranks(priorities)
    pos = {i: {o: k for k, o in enumerate(preferences[i])} for i in p.agents}
    nodes = tuple((i, o) for i in p.agents for o in p.objects if p[i, o] > 0)
    edges = set()
    for target in nodes:
        j, o2 = target
        enviers = [(i, o) for (i, o) in nodes if i != j and pos[i][o2] < pos[i][o]]
        if not enviers:
            continue
        best = min(rank[o2][i] for i, _ in enviers)
        for i, o in enviers:
            if rank[o2][i] == best:
                edges.add(((i, o), target))
    return EnvyGraph(nodes, frozenset(edges))


def trim_to_cyclic_core(g: EnvyGraph) -> EnvyGraph:
    """Drop nodes without an outgoing or incoming edge until none are left to drop."""
    alive = set(g.nodes)
    edges = set(g.edges)
    while True:
        has_out = {u for u, _ in edges}
        has_in = {v for _, v in edges}
        dead = {v for v in alive if v not in has_out or v not in has_in}
        if not dead:
            break
        alive -= dead
        edges = {(u, v) for u, v in edges if u in alive and v in alive}
    return EnvyGraph(tuple(v for v in g.nodes if v in alive), frozenset(edges))


def run_fdat_trading(inp: FdatInput, *, name: str = "fdat-trading", validate: bool = True,
                     accelerate: bool = True):
    """Trade until the cyclic core of the envy graph is empty.

    An agent can give up an object through one node while receiving the same
    object through another. The holding that binds is then refilled, no
    holding reaches zero, and the plain iteration only converges
    geometrically. With ``accelerate`` (the default) such a step is scaled up
    along its own direction until the first holding runs out, which is the
    limit of the repeated steps. ``accelerate=False`` keeps the plain
    iteration and raises :class:`NonTermination` when the step bound is hit.
    """
    p = inp.assignment.copy()
    if validate:
        rep = check_ex_ante_stability(p, inp.priorities, inp.preferences)
        if not rep.ok:
            raise NotExAnteStable(rep.witnesses)
    trace = StepTrace(name, p.agents, p.objects, p.copy())
    limit = len(p.agents) * len(p.objects)
    d = 0
    while True:
        core = trim_to_cyclic_core(build_envy_graph(p, inp.priorities, inp.preferences))
        if not core.nodes:
            trace.meta["final_core_size"] = 0
            return p, trace
        d += 1
        if d > limit:
            raise NonTermination(f"{name} did not finish within {limit} steps")
        out = {v: core.out(v) for v in core.nodes}
        lam = {(w, v): Fraction(1, len(out[v])) for v in core.nodes for w in out[v]}
        quotas = {v: p[v] for v in core.nodes}
        g = TradeGraph(core.nodes, quotas, lam)
        sol = max_solution(g)

        step = TraceStep(d, "trade", tuple(sorted({i for i, _ in core.nodes}, key=p.agents.index)),
                         tuple(sorted({o for _, o in core.nodes}, key=p.objects.index)),
                         lam=dict(g.lam), quotas=dict(g.quotas), x=dict(sol.x),
                         blocks=[list(b) for b in sol.partition.blocks],
                         binding=[list(b.binding) for b in sol.blocks])
        step.extra["edges"] = sorted(core.edges, key=lambda e: (core.nodes.index(e[0]), core.nodes.index(e[1])))
        delta = _net_change(sol.x, out)
        if accelerate and not any(p[k] + v == 0 for k, v in delta.items() if v < 0):
            scale = min(p[k] / -v for k, v in delta.items() if v < 0)
            delta = {k: v * scale for k, v in delta.items()}
            step.extra["scale"] = scale
        for i in p.agents:
            for o in p.objects:
                change = delta.get((i, o), ZERO)
                if change:
                    p.add(i, o, change)
                    step.assignment_delta.append((i, o, change))
        trace.steps.append(step)


def _net_change(x, out) -> dict:
    """Per (agent, object) change: each node gives ``x`` and receives it split
    equally over the holdings it points to."""
    delta = {}
    for v, xv in x.items():
        if not xv:
            continue
        j, held = v
        delta[j, held] = delta.get((j, held), ZERO) - xv
        share = xv / len(out[v])
        for _, got in out[v]:
            delta[j, got] = delta.get((j, got), ZERO) + share
    return {k: v for k, v in delta.items() if v}
