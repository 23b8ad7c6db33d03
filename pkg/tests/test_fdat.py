from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from strategies import rngs
from eqtrade.assignment import Assignment
from eqtrade.errors import NonTermination, NotExAnteStable
from eqtrade.fdat import EnvyGraph, build_envy_graph, run_fdat_trading, trim_to_cyclic_core
from eqtrade.generators import random_fdat_input
from eqtrade.problems import FdatInput
from eqtrade.properties import check_ex_ante_stability, check_identical_types, weakly_prefers


def tied(agents, objects):
    return {o: [list(agents)] for o in objects}


def test_opposite_tastes_swap_fully():
    p = Assignment(["1", "2"], ["a", "b"], {i: {"a": F(1, 2), "b": F(1, 2)} for i in "12"})
    inp = FdatInput(p, tied("12", "ab"), {"1": ["a", "b"], "2": ["b", "a"]})
    g = build_envy_graph(p, inp.priorities, inp.preferences)
    assert g.edges == {(("1", "b"), ("2", "a")), (("2", "a"), ("1", "b"))}
    q, trace = run_fdat_trading(inp)
    assert q.as_dict() == {"1": {"a": 1, "b": 0}, "2": {"a": 0, "b": 1}}
    assert len(trace) == 1


def test_only_highest_priority_envier_points():
    p = Assignment(["1", "2", "3"], ["a", "b", "c"], {"1": {"b": 1}, "2": {"c": 1}, "3": {"a": 1}})
    pri = {"a": [["2"], ["1"], ["3"]], "b": [["1", "2", "3"]], "c": [["1", "2", "3"]]}
    prefs = {"1": ["a", "b", "c"], "2": ["a", "c", "b"], "3": ["a", "b", "c"]}
    g = build_envy_graph(p, pri, prefs)
    # 1 and 2 both envy 3's a; only 2 (higher priority at a) points
    assert (("2", "c"), ("3", "a")) in g.edges
    assert (("1", "b"), ("3", "a")) not in g.edges


def test_trim_keeps_only_cycles():
    g = EnvyGraph((1, 2, 3, 4), frozenset({(1, 2), (2, 1), (3, 1), (2, 4)}))
    core = trim_to_cyclic_core(g)
    assert core.nodes == (1, 2)
    assert core.edges == {(1, 2), (2, 1)}


def test_unstable_input_rejected_with_witnesses():
    p = Assignment(["1", "2"], ["a", "b"], {"1": {"b": 1}, "2": {"a": 1}})
    pri = {"a": [["1"], ["2"]], "b": [["1"], ["2"]]}
    inp = FdatInput(p, pri, {"1": ["a", "b"], "2": ["a", "b"]})
    with pytest.raises(NotExAnteStable) as err:
        run_fdat_trading(inp)
    assert err.value.witnesses[0]["triple"] == ("1", "2", "a")


ZENO = FdatInput(
    Assignment(["i1", "i2", "i3", "i4", "i5"], ["o1", "o2", "o3"],
               {**{i: {"o1": F(1, 3), "o2": F(1, 6), "o3": F(1, 6)} for i in ("i1", "i3")},
                **{i: {"o1": F(1, 9), "o2": F(2, 9), "o3": F(2, 9)} for i in ("i2", "i4", "i5")}}),
    tied(["i1", "i2", "i3", "i4", "i5"], ["o1", "o2", "o3"]),
    {**{i: ["o3", "o2", "o1"] for i in ("i1", "i3")}, **{i: ["o2", "o1", "o3"] for i in ("i2", "i4", "i5")}},
)


def test_literal_iteration_does_not_terminate_here():
    with pytest.raises(NonTermination):
        run_fdat_trading(ZENO, accelerate=False)


def test_accelerated_step_reaches_the_limit():
    p, trace = run_fdat_trading(ZENO)
    core = trim_to_cyclic_core(build_envy_graph(p, ZENO.priorities, ZENO.preferences))
    assert not core.nodes
    assert any("scale" in s.extra for s in trace)
    assert p.column_sums() == ZENO.assignment.column_sums()
    assert check_identical_types(p, ZENO.priorities, ZENO.preferences).ok


@given(rngs, st.sampled_from([{}, {"tie_prob": 0.8, "max_copies": 1}, {"tie_prob": 0.8, "n_types": 2}]))
def test_fdat_suite(r, kw):
    inp = random_fdat_input(r, **kw)
    p, trace = run_fdat_trading(inp)
    assert not trim_to_cyclic_core(build_envy_graph(p, inp.priorities, inp.preferences)).nodes
    assert check_ex_ante_stability(p, inp.priorities, inp.preferences).ok
    assert check_identical_types(p, inp.priorities, inp.preferences).ok
    assert p.column_sums() == inp.assignment.column_sums()
    for i in p.agents:
        assert p.row_sum(i) == inp.assignment.row_sum(i)
        assert all(v >= 0 for v in p.row(i).values())
        assert weakly_prefers(p.row(i), inp.assignment.row(i), inp.preferences[i])
    assert trace.replay() == p
