import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from eqtrade.errors import DegenerateBlock, InvalidTradeGraph, NotAbsorbing
from eqtrade.generators import random_trade_graph
from eqtrade.oracles import brute_force_blocks, verify_max_solution
from strategies import trade_graphs
from eqtrade.solver import (TradeGraph, absorbing_sets, block_eigenvector, max_solution,
                            validate_parameter_matrix)


def cycle(n, quotas):
    lam = {((k + 1) % n, k): 1 for k in range(n)}
    return TradeGraph(range(n), dict(enumerate(quotas)), lam)


def test_simple_cycle_binds_at_smallest_quota():
    g = cycle(3, [F(1, 2), F(1, 3), 1])
    sol = max_solution(g)
    assert sol.x == {0: F(1, 3), 1: F(1, 3), 2: F(1, 3)}
    assert sol.blocks[0].binding == (1,)


def test_split_demand_block():
    # 0 splits evenly between 1 and 2, both point back to 0
    g = TradeGraph.from_columns([0, 1, 2], {0: 1, 1: F(1, 4), 2: 1},
                                {0: {1: F(1, 2), 2: F(1, 2)}, 1: {0: 1}, 2: {0: 1}})
    sol = max_solution(g)
    assert sol.x == {0: F(1, 2), 1: F(1, 4), 2: F(1, 4)}
    assert verify_max_solution(g, sol.x)[0]


def test_residual_nodes_trade_zero():
    # 3 points into the cycle {0,1} but nothing points back
    g = TradeGraph(range(4), {v: 1 for v in range(4)}, {(1, 0): 1, (0, 1): 1, (0, 3): 1})
    part = absorbing_sets(g)
    assert part.blocks == ((0, 1),)
    assert part.residual == (2, 3)
    assert max_solution(g).x[3] == 0


def test_zero_quota_kills_the_block():
    g = cycle(2, [0, 1])
    assert max_solution(g).is_zero()


def test_no_edges_means_no_blocks():
    g = TradeGraph(range(3), {v: 1 for v in range(3)}, {})
    assert absorbing_sets(g).blocks == ()
    assert max_solution(g).is_zero()


def test_validation_collects_every_violation():
    g = TradeGraph(range(3), {0: -1, 1: 1, 2: 1}, {(0, 0): F(1, 2), (1, 0): F(1, 4), (2, 1): F(-1, 2)},
                   edges={(0, 1)})
    kinds = {v.kind for v in validate_parameter_matrix(g)}
    assert kinds == {"SelfLoop", "ColumnSumNotOne", "NegativeEntry", "NegativeQuota", "SupportOutsideEdges"}
    with pytest.raises(InvalidTradeGraph) as err:
        max_solution(g)
    assert len(err.value.violations) >= 5


def test_unknown_node_rejected():
    with pytest.raises(InvalidTradeGraph):
        TradeGraph([0, 1], {0: 1}, {(5, 0): 1})


def test_block_eigenvector_errors():
    g = TradeGraph(range(3), {v: 1 for v in range(3)}, {(1, 0): 1, (0, 1): F(1, 2), (2, 1): F(1, 2)})
    with pytest.raises(NotAbsorbing):
        block_eigenvector(g, (0, 1))
    with pytest.raises(NotAbsorbing):
        block_eigenvector(g, ())
    single = TradeGraph([0], {0: 1}, {})
    with pytest.raises(DegenerateBlock):
        block_eigenvector(single, (0,))


def test_eigenvector_normalized_and_fixed():
    g = TradeGraph.from_columns("abc", {"a": 1, "b": 1, "c": 1},
                                {"a": {"b": F(1, 3), "c": F(2, 3)}, "b": {"c": 1}, "c": {"a": 1}})
    vec = block_eigenvector(g, "abc")
    assert vec["a"] == 1
    for v in "abc":
        assert sum(s * vec[u] for (w, u), s in g.lam.items() if w == v) == vec[v]


def test_random_graphs_against_oracle():
    rng = random.Random(3)
    for _ in range(300):
        g = random_trade_graph(rng, zero_quota_prob=0.2, need_block=False)
        sol = max_solution(g)
        ok, reasons = verify_max_solution(g, sol.x)
        assert ok, reasons
        assert {frozenset(b) for b in sol.partition.blocks} == set(brute_force_blocks(g))


@given(trade_graphs())
def test_max_solution_verified(g):
    ok, reasons = verify_max_solution(g, max_solution(g).x)
    assert ok, reasons


@given(trade_graphs())
def test_max_solution_is_componentwise_maximal(g):
    """Any other fixed point inside the quotas is below x*, checked on the
    block direction: scaling x* up by any amount breaks a quota."""
    sol = max_solution(g)
    for b in sol.blocks:
        bumped = dict(sol.x)
        for v in b.nodes:
            bumped[v] = sol.x[v] * F(101, 100)
        if any(sol.x[v] for v in b.nodes):
            assert not verify_max_solution(g, bumped)[0]


@given(trade_graphs(), st.randoms(use_true_random=False))
def test_node_relabeling_does_not_change_solution(g, r):
    perm = list(g.nodes)
    r.shuffle(perm)
    h = TradeGraph(perm, g.quotas, g.lam)
    assert max_solution(h).x == max_solution(g).x


def test_matrix_and_columns():
    g = cycle(2, [1, 1])
    assert g.matrix() == [[0, 1], [1, 0]]
    assert g.column(0) == {1: 1}
    assert g.successors(1) == [0]
