"""Shared hypothesis strategies."""
import random
from fractions import Fraction

from hypothesis import strategies as st

from eqtrade.solver import TradeGraph

# seeded generators: shrinking moves toward small seeds rather than small
# instances, which is acceptable because the generators are tiny already
rngs = st.integers(0, 2**32 - 1).map(random.Random)

quota = st.fractions(min_value=0, max_value=3, max_denominator=8)


@st.composite
def trade_graphs(draw, max_nodes=8):
    n = draw(st.integers(2, max_nodes))
    nodes = list(range(n))
    lam = {}
    for u in nodes:
        others = [v for v in nodes if v != u]
        targets = draw(st.lists(st.sampled_from(others), max_size=3, unique=True))
        weights = [draw(st.integers(1, 5)) for _ in targets]
        for v, w in zip(targets, weights):
            lam[v, u] = Fraction(w, sum(weights))
    quotas = {v: draw(quota) for v in nodes}
    return TradeGraph(nodes, quotas, lam)
