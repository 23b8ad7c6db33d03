from fractions import Fraction as F

import pytest
from hypothesis import given

from strategies import rngs
from eqtrade.assignment import Assignment
from eqtrade.bta import (BtaState, lambda_equal, lambda_from_table, lambda_proportional, resolve_rule,
                         run_bta, run_time_exchange)
from eqtrade.errors import InvalidLambda
from eqtrade.generators import random_fee, random_housing_market, random_time_exchange
from eqtrade.oracles import run_ttc
from eqtrade.problems import FeeProblem, TimeExchangeProblem
from eqtrade.properties import check_bounded_envy, check_demand_bounds, check_ete, check_ir


def A(i):
    return ("agent", i)


def O(o):
    return ("object", o)


def test_example1_first_step_parameters(example1):
    _, trace = run_bta(example1, lambda_equal)
    s = trace[0]
    assert s.favorites == {"1": "c", "2": "d", "3": "d", "4": "a", "5": "c"}
    # owners of c are 3, 4, 5 with equal shares; the quota is the smallest omega/lambda
    assert s.lam[A("3"), O("c")] == s.lam[A("5"), O("c")] == F(1, 3)
    assert s.quotas[O("c")] == F(3, 4)
    assert s.quotas[O("a")] == 1
    assert s.quotas[A("1")] == 1
    assert [O("d")] in s.binding


def test_example1_conservation_and_replay(example1, tables):
    p, trace = run_bta(example1, lambda_equal)
    assert p == tables[3]
    assert trace.replay() == p
    assert p.column_sums() == example1.quotas
    for i in example1.agents:
        assert p.row_sum(i) == sum(example1.endowments[i].values())


def test_example2_trace(example2):
    p, trace = run_bta(example2, lambda_equal)
    assert [set(b) for b in trace[0].blocks] == [{A("1"), O("a")}]
    assert p["4", "b"] == F(1, 2)
    assert trace.replay() == p


def test_proportional_rule_on_example1(example1):
    p, _ = run_bta(example1, lambda_proportional)
    assert check_ir(p, example1.endowments, example1.preferences).ok
    assert check_bounded_envy(p, example1.endowments, example1.preferences).ok


def test_table_rule_replays_a_recorded_run(example1):
    seen = {}

    def recording(state):
        lam = lambda_equal(state)
        seen[state.step] = dict(lam)
        return lam

    p, _ = run_bta(example1, recording)
    q, _ = run_bta(example1, lambda_from_table(seen))
    assert p == q


def test_table_rule_missing_step(example1):
    with pytest.raises(InvalidLambda):
        run_bta(example1, lambda_from_table({}))


def test_bad_shares_rejected(example1):
    def lopsided(state):
        lam = lambda_equal(state)
        key = next(iter(lam))
        lam[key] += F(1, 10)
        return lam

    with pytest.raises(InvalidLambda, match="sum to"):
        run_bta(example1, lopsided)


def test_share_for_non_owner_rejected(example1):
    def wrong(state):
        lam = lambda_equal(state)
        lam["1", "e"] = F(1, 2)
        return lam

    with pytest.raises(InvalidLambda):
        run_bta(example1, wrong)


def test_resolve_rule():
    assert resolve_rule("equal") is lambda_equal
    with pytest.raises(InvalidLambda):
        resolve_rule("random")


def test_agents_without_endowment_get_nothing():
    problem = FeeProblem(["i", "j"], ["a"], {"i": {"a": 1}}, {"i": ["a"], "j": ["a"]})
    p, trace = run_bta(problem)
    assert p["i", "a"] == 1 and p["j", "a"] == 0
    assert len(trace) == 1


@given(rngs)
def test_bta_is_ir_and_fair(r):
    problem = random_fee(r, max_agents=5, max_objects=5, max_den=8)
    for rule in (lambda_equal, lambda_proportional):
        p, trace = run_bta(problem, rule)
        assert check_ir(p, problem.endowments, problem.preferences).ok
        assert check_ete(p, problem.endowments, problem.preferences).ok
        assert check_bounded_envy(p, problem.endowments, problem.preferences).ok
        assert trace.replay() == p
        assert len(trace) <= len(problem.agents) * len(problem.objects)


@given(rngs)
def test_bta_equals_ttc_on_housing_markets(r):
    market = random_housing_market(r)
    assert run_bta(market.to_fee(), lambda_proportional)[0] == run_ttc(market)


# ----------------------------------------------------------------------------
# time exchange


def test_full_reservation_means_no_trade(example1):
    te = TimeExchangeProblem(example1, lower=example1.endowments)
    p, trace = run_time_exchange(te)
    assert len(trace) == 0
    assert p == example1.endowment_assignment()


def test_demand_ceiling_caps_favorite(example2):
    # agent 3 may consume at most 1/8 of c
    te = TimeExchangeProblem(example2, upper={"3": {"c": F(1, 8)}})
    p, trace = run_time_exchange(te)
    assert p["3", "c"] <= F(1, 8)
    assert trace.replay() == p


@given(rngs)
def test_time_exchange_invariants(r):
    te = random_time_exchange(r)
    p, trace = run_time_exchange(te)
    fee = te.fee
    unsold = {(i, o): v for i, o, v in trace.meta["unsold"]}
    for o in fee.objects:
        left = sum((v for (i, o2), v in unsold.items() if o2 == o), F(0))
        assert p.column_sum(o) + left == fee.quotas[o]
    for i in fee.agents:
        left = sum((v for (j, _), v in unsold.items() if j == i), F(0))
        assert p.row_sum(i) + left == sum(fee.endowments[i].values())
        for o in fee.objects:
            assert te.lower[i][o] <= p[i, o] <= te.upper[i][o]
    assert trace.replay() == p
    assert len(trace) <= 2 * len(fee.agents) * len(fee.objects)


@given(rngs)
def test_inactive_bounds_reduce_to_bta(r):
    fee = random_fee(r, max_agents=5, max_objects=5, max_den=8)
    p, trace = run_time_exchange(TimeExchangeProblem(fee))
    assert p == run_bta(fee, lambda_equal)[0]
    assert trace.meta["unsold"] == []


def test_two_agent_swap():
    fee = FeeProblem(["i", "j"], ["a", "b"], {"i": {"a": 1}, "j": {"b": 1}}, {"i": ["b", "a"], "j": ["a", "b"]})
    p, _ = run_time_exchange(TimeExchangeProblem(fee))
    assert p["i", "b"] == 1 and p["j", "a"] == 1


def test_unsold_supply_is_not_consumed():
    # hand-traced: step 1 trades a block of both agents (x_o2 = 1/4), step 2
    # i1 buys back 1/4 of o2 up to his ceiling, step 3 he takes 5/24 of o1;
    # the last 1/8 of o2 above his reservation finds no taker
    fee = FeeProblem(["i1", "i2"], ["o1", "o2"],
                     {"i1": {"o1": F(1, 3), "o2": F(2, 3)}, "i2": {"o2": F(1, 4)}},
                     {"i1": ["o2", "o1"], "i2": ["o1", "o2"]})
    te = TimeExchangeProblem(fee,
                             upper={"i1": {"o1": F(1, 3), "o2": F(2, 3)}, "i2": {"o1": F(3, 4), "o2": F(13, 16)}},
                             lower={"i1": {"o2": F(1, 6)}, "i2": {"o2": F(1, 8)}})
    p, trace = run_time_exchange(te)
    assert [s.x[("object", "o2")] for s in trace][:1] == [F(1, 4)]
    assert len(trace) == 3
    assert p.as_dict() == {"i1": {"o1": F(5, 24), "o2": F(2, 3)}, "i2": {"o1": F(1, 8), "o2": F(1, 8)}}
    assert trace.meta["unsold"] == [("i1", "o2", F(1, 8))]


def test_ceilings_can_cost_individual_rationality():
    # i2 sells 1/12 of o1 while buying o2, then hits the o2 ceiling with o2
    # surplus left to trade; the only service left for him is o3, his worst
    fee = FeeProblem(["i1", "i2"], ["o1", "o2", "o3"],
                     {"i1": {"o2": F(1, 2), "o3": F(1, 2)}, "i2": {"o1": F(1, 6), "o2": F(2, 3)}},
                     {"i1": ["o1", "o2", "o3"], "i2": ["o2", "o1", "o3"]})
    te = TimeExchangeProblem(fee, upper={"i1": {"o1": F(1, 2), "o2": 1, "o3": F(3, 4)},
                                         "i2": {"o1": 1, "o2": F(2, 3), "o3": F(1, 4)}},
                             lower={"i1": {"o2": F(1, 4)}, "i2": {"o1": F(1, 12), "o2": F(1, 3)}})
    p, trace = run_time_exchange(te)
    assert trace.meta["unsold"] == []
    assert p.row("i2") == {"o1": F(1, 12), "o2": F(2, 3), "o3": F(1, 12)}
    assert check_demand_bounds(p, te.lower, te.upper).ok
    rep = check_ir(p, fee.endowments, fee.preferences)
    assert rep.witnesses == [{"agent": "i2", "cutoff": "o1", "slack": F(-1, 12)}]


def test_demand_bounds_witness():
    fee = FeeProblem(["i"], ["a"], {"i": {"a": F(1, 2)}}, {"i": ["a"]})
    te = TimeExchangeProblem(fee, upper={"i": {"a": F(3, 4)}}, lower={"i": {"a": F(1, 4)}})
    bad = Assignment(["i"], ["a"], {"i": {"a": F(1, 8)}})
    rep = check_demand_bounds(bad, te.lower, te.upper)
    assert not rep.ok and rep.witnesses[0]["pair"] == ("i", "a")


def test_state_is_frozen(example1):
    state = BtaState(1, ("1",), ("a",), {"1": {"a": 1}}, None, {})
    with pytest.raises(AttributeError):
        state.step = 2
