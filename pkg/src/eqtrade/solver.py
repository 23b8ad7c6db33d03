"""Maximum solutions of ``Lambda x = x`` subject to ``0 <= x <= q``.

A trade graph carries a column-stochastic parameter matrix: column ``u``
says how node ``u`` splits its demand over the nodes it points to, so
``lam[v, u] > 0`` means an edge ``u -> v``. Trading happens only inside
absorbing sets (sink strongly connected components with at least two
nodes). Each such block has a one-dimensional positive null space of
``I - Lambda_V``; scaling that direction until the first quota binds gives
the block's part of the maximum solution, and every other node trades zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

import networkx as nx

from . import _linalg
from .errors import DegenerateBlock, InvalidTradeGraph, NotAbsorbing
from .rational import ONE, ZERO, as_fraction


@dataclass(frozen=True)
class Violation:
    kind: str
    nodes: tuple
    detail: str = ""

    def __str__(self) -> str:
        where = ", ".join(map(repr, self.nodes))
        return f"{self.kind}({where})" + (f": {self.detail}" if self.detail else "")


class TradeGraph:
    """Nodes, per-node quotas and the sparse parameter matrix.

    ``lam`` maps ``(v, u)`` to the share of ``u``'s demand served by ``v``.
    ``edges``, when given, is the set of declared pointing pairs ``(u, v)``;
    otherwise the positive support of ``lam`` defines the edges.
    """

    __slots__ = ("nodes", "quotas", "lam", "edges", "_index")

    def __init__(self, nodes: Iterable[Hashable], quotas: Mapping, lam: Mapping,
                 edges: Iterable | None = None):
        self.nodes = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node identifiers")
        self._index = {v: k for k, v in enumerate(self.nodes)}
        self.quotas = {v: as_fraction(quotas.get(v, 0)) for v in self.nodes}
        for v in quotas:
            if v not in self._index:
                raise InvalidTradeGraph([Violation("UnknownNode", (v,), "quota for undeclared node")])
        self.lam = {}
        for (v, u), val in lam.items():
            val = as_fraction(val)
            if v not in self._index or u not in self._index:
                raise InvalidTradeGraph([Violation("UnknownNode", (v, u), "lambda entry")])
            if val != 0:
                self.lam[v, u] = val
        self.edges = None if edges is None else frozenset(edges)

    @classmethod
    def from_columns(cls, nodes, quotas, columns: Mapping, edges=None) -> "TradeGraph":
        """Build from ``{u: {v: share}}``, i.e. one dict per pointing node."""
        lam = {(v, u): s for u, col in columns.items() for v, s in col.items()}
        return cls(nodes, quotas, lam, edges)

    def column(self, u) -> dict:
        return {v: s for (v, w), s in self.lam.items() if w == u}

    def successors(self, u) -> list:
        """Nodes ``u`` demands with positive weight, in declared node order."""
        out = [v for (v, w), s in self.lam.items() if w == u and s > 0]
        return sorted(out, key=self._index.__getitem__)

    def order(self, nodes) -> tuple:
        return tuple(sorted(nodes, key=self._index.__getitem__))

    def matrix(self) -> list:
        """Dense ``Lambda`` as a list of rows in node order."""
        idx = self._index
        m = [[ZERO] * len(self.nodes) for _ in self.nodes]
        for (v, u), s in self.lam.items():
            m[idx[v]][idx[u]] = s
        return m

    def __repr__(self) -> str:
        return f"TradeGraph({len(self.nodes)} nodes, {len(self.lam)} entries)"


@dataclass(frozen=True)
class AbsorbingPartition:
    blocks: tuple  # tuple of node tuples
    residual: tuple

    def block_of(self, v):
        for k, b in enumerate(self.blocks):
            if v in b:
                return k
        return None


@dataclass(frozen=True)
class BlockSolution:
    nodes: tuple
    direction: dict  # positive null vector, first node normalized to 1
    scale: Fraction
    binding: tuple


@dataclass(frozen=True)
class MaxSolution:
    x: dict
    partition: AbsorbingPartition
    blocks: tuple = field(default_factory=tuple)

    @property
    def binding(self) -> dict:
        return {k: b.binding for k, b in enumerate(self.blocks)}

    def __getitem__(self, v) -> Fraction:
        return self.x[v]

    def is_zero(self) -> bool:
        return not any(self.x.values())


def validate_parameter_matrix(g: TradeGraph) -> list:
    """Return every violated invariant; an empty list means the graph is valid."""
    out = []
    cols = {}
    for (v, u), s in g.lam.items():
        cols.setdefault(u, []).append((v, s))
        if s < 0:
            out.append(Violation("NegativeEntry", (v, u), f"lambda = {s}"))
        if v == u:
            out.append(Violation("SelfLoop", (u,), f"lambda = {s}"))
        if g.edges is not None and s > 0 and (u, v) not in g.edges:
            out.append(Violation("SupportOutsideEdges", (v, u), "positive share on an undeclared edge"))
    for u in g.nodes:
        entries = cols.get(u, [])
        if any(s > 0 for _, s in entries):
            total = sum((s for _, s in entries), ZERO)
            if total != ONE:
                out.append(Violation("ColumnSumNotOne", (u,), f"column sums to {total}"))
    for v in g.nodes:
        if g.quotas[v] < 0:
            out.append(Violation("NegativeQuota", (v,), f"q = {g.quotas[v]}"))
    return out


def _require_valid(g: TradeGraph) -> None:
    problems = validate_parameter_matrix(g)
    if problems:
        raise InvalidTradeGraph(problems)


def _digraph(g: TradeGraph) -> nx.DiGraph:
    d = nx.DiGraph()
    d.add_nodes_from(g.nodes)
    d.add_edges_from((u, v) for (v, u), s in g.lam.items() if s > 0)
    return d


def absorbing_sets(g: TradeGraph) -> AbsorbingPartition:
    """Sink strongly connected components of size >= 2; the rest is residual."""
    _require_valid(g)
    d = _digraph(g)
    comp_of = {}
    comps = list(nx.strongly_connected_components(d))
    for k, c in enumerate(comps):
        for v in c:
            comp_of[v] = k
    is_sink = [True] * len(comps)
    for u, v in d.edges:
        if comp_of[u] != comp_of[v]:
            is_sink[comp_of[u]] = False
    blocks = [g.order(c) for k, c in enumerate(comps) if is_sink[k] and len(c) >= 2]
    blocks.sort(key=lambda b: g.nodes.index(b[0]))
    in_block = {v for b in blocks for v in b}
    residual = tuple(v for v in g.nodes if v not in in_block)
    return AbsorbingPartition(tuple(blocks), residual)


def _check_absorbing(g: TradeGraph, block) -> None:
    members = set(block)
    for (v, u), s in g.lam.items():
        if u in members and s > 0 and v not in members:
            raise NotAbsorbing(f"node {u!r} points outside the block (to {v!r})")
    sub = _digraph(g).subgraph(members)
    if not nx.is_strongly_connected(sub):
        raise NotAbsorbing("block is not inside connected")


def block_eigenvector(g: TradeGraph, block) -> dict:
    """Positive solution of ``(I - Lambda_V) x = 0`` with the first node fixed to 1.

    Row 0 of the system is dropped and ``x_0 = 1`` substituted; the remaining
    square system is nonsingular exactly when the block is irreducible.
    """
    block = g.order(block)
    if not block:
        raise NotAbsorbing("empty block")
    _check_absorbing(g, block)
    k = len(block)
    pos = {v: n for n, v in enumerate(block)}
    m = [[ONE if r == c else ZERO for c in range(k)] for r in range(k)]
    for (v, u), s in g.lam.items():
        if v in pos and u in pos:
            m[pos[v]][pos[u]] -= s
    a = [row[1:] for row in m[1:]]
    b = [-row[0] for row in m[1:]]
    sol = _linalg.solve(a, b) if k > 1 else []
    if sol is None or k == 1:
        raise DegenerateBlock(f"null space of I - Lambda on {block!r} is not one-dimensional")
    vec = [ONE] + sol
    if any(val <= 0 for val in vec):
        raise DegenerateBlock(f"null vector on {block!r} is not strictly positive")
    return dict(zip(block, vec))


def max_solution(g: TradeGraph) -> MaxSolution:
    partition = absorbing_sets(g)
    x = {v: ZERO for v in g.nodes}
    solved = []
    for block in partition.blocks:
        direction = block_eigenvector(g, block)
        ratios = {v: g.quotas[v] / direction[v] for v in block}
        scale = min(ratios.values())
        binding = tuple(v for v in block if ratios[v] == scale)
        for v in block:
            x[v] = scale * direction[v]
        solved.append(BlockSolution(block, direction, scale, binding))
    return MaxSolution(x, partition, tuple(solved))
