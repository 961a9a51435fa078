import pytest

from sriopt.analysis import ALL_MATCHED, ASTAR, count_blocking, is_stable
from sriopt.criteria import CRITERIA, Criterion, LexState, lex_trace, solve_criterion
from sriopt.engine import BUDGET_EXCEEDED, OPTIMAL, UNSAT, SearchProblem, solve
from sriopt.errors import NoStableMatchingError
from sriopt.model import Instance
from sriopt.oracle import enumerate_stable, min_blocking_over_all_matchings

import expect

TEN_AGENT_OUTCOMES = {
    "egalitarian": ("R3", 38),
    "rank-maximal": ("R3", (2, 1, 1, 2, 2, 1, 1, 0, 0)),
    "generous": ("R5", (1, 1, 2, 1, 3, 2, 0, 0, 0)),
    "fc-max": ("R1", 2),
    "min-regret": ("R4", 6),
}


@pytest.mark.parametrize("criterion", sorted(TEN_AGENT_OUTCOMES))
def test_ten_agent_optima(ten, criterion):
    name, value = TEN_AGENT_OUTCOMES[criterion]
    res = solve_criterion(ten, criterion)
    assert res.status == OPTIMAL
    assert res.matching == expect.named(name)
    assert res.objective == value
    assert res.scope == ASTAR


def test_ten_agent_any_and_almost_stable(ten):
    res = solve_criterion(ten, "any-stable")
    assert res.matching in set(enumerate_stable(ten)) and res.objective is None
    res = solve_criterion(ten, "almost-stable")
    assert res.objective == 0 and is_stable(ten, res.matching)


def test_rank_maximal_trace(ten):
    assert lex_trace(ten, "rank-maximal") == list(enumerate((2, 1, 1, 2, 2, 1, 1, 0, 0), start=1))


def test_generous_trace_runs_from_the_longest_list_down(ten):
    trace = lex_trace(ten, "generous")
    assert [k for k, _ in trace] == list(range(9, 0, -1))
    assert dict(trace) == dict(enumerate((1, 1, 2, 1, 3, 2, 0, 0, 0), start=1))


def test_two_agent_trace():
    inst = Instance.from_lists([[1], [0]])
    assert lex_trace(inst, "rank-maximal") == [(1, 2)]
    assert lex_trace(inst, "generous") == [(1, 2)]


def test_lex_trace_rejects_other_criteria(ten, nostable):
    with pytest.raises(ValueError):
        lex_trace(ten, "egalitarian")
    with pytest.raises(NoStableMatchingError):
        lex_trace(nostable, "generous")


def test_lex_state_refuses_recommit():
    s = LexState()
    s.commit(1, 3)
    with pytest.raises(ValueError):
        s.commit(1, 2)
    assert s.current_level == 1


@pytest.mark.parametrize("criterion", [c for c in CRITERIA if c != "almost-stable"])
def test_unsolvable_instance_is_unsat(nostable, criterion):
    res = solve_criterion(nostable, criterion)
    assert res.status == UNSAT and res.matching is None


def test_almost_stable_on_no_stable4(nostable):
    res = solve_criterion(nostable, "almost-stable")
    assert res.status == OPTIMAL and res.objective == 1
    assert count_blocking(nostable, res.matching) == 1
    assert res.scope == ALL_MATCHED


def test_unknown_criterion(ten):
    with pytest.raises(ValueError):
        solve_criterion(ten, "pareto")
    assert Criterion("fc-max") is Criterion.FC_MAX


def test_empty_and_trivial_instances():
    empty = Instance.from_lists([[]])
    for c in CRITERIA:
        res = solve_criterion(empty, c)
        assert res.status == OPTIMAL and res.matching.pairs() == []


def test_budget_is_reported():
    inst = [i for (n, p, s), i in expect.random_suite((60,), 1) if p == 1.0][0]
    res = solve_criterion(inst, "generous", node_limit=50)
    assert res.status == BUDGET_EXCEEDED


def test_criteria_match_the_oracle():
    for label, inst in expect.random_suite((6, 8, 10), 12):
        stable = enumerate_stable(inst)
        for c in CRITERIA:
            res = solve_criterion(inst, c)
            if c == "almost-stable":
                m, k = min_blocking_over_all_matchings(inst)
                assert res.objective == k, label
                assert count_blocking(inst, res.matching) == k
                continue
            want = expect.oracle_optimum(inst, c, stable)
            if want is None:
                assert res.status == UNSAT, (label, c)
                continue
            value, m = want
            assert res.matching == m, (label, c)
            if c in ("rank-maximal", "generous"):
                assert res.profile.counts == value, (label, c)
            elif c != "any-stable":
                assert res.objective == value, (label, c)


def test_structural_identities():
    for label, inst in expect.random_suite((8, 12), 10):
        if not enumerate_stable(inst):
            continue
        rm = solve_criterion(inst, "rank-maximal")
        fc = solve_criterion(inst, "fc-max")
        eg = solve_criterion(inst, "egalitarian")
        mr = solve_criterion(inst, "min-regret")
        gen = solve_criterion(inst, "generous")
        first = rm.profile.counts[0] if rm.profile.counts else 0
        assert fc.objective == first, label
        assert all(eg.summary.cost <= r.summary.cost for r in (rm, fc, mr, gen)), label
        assert all(mr.objective <= r.summary.regret for r in (rm, fc, eg, gen)), label
        # the optimal regret is tight: one rank lower admits nothing
        if mr.objective >= 1 and rm.profile.total():
            below = solve(SearchProblem(inst, rank_cap=mr.objective - 1))
            assert below.status == UNSAT, label
