"""The numbered acceptance criteria.

Each test carries ``@pytest.mark.acceptance(number, title)``; the conftest
prints one PASS/FAIL line per criterion at the end of the run.  Expected
values come from the enumeration oracle or brute force, never the engine.
"""

import csv
from collections import defaultdict
from statistics import mean

import pytest

from sriopt import cli
from sriopt.analysis import count_blocking, matched_set, profile
from sriopt.approx import check_ratio, fc_xp, solve_lc
from sriopt.criteria import CRITERIA, solve_criterion
from sriopt.engine import OPTIMAL, UNSAT
from sriopt.ipexport import build_ip, feasible_set_equals_stable_set
from sriopt.oracle import enumerate_stable, min_blocking_over_all_matchings
from sriopt.reductions import (
    EGALITARIAN,
    FC,
    GENEROUS,
    INDEPENDENT_SET,
    GadgetSpec,
    complete_graph,
    min_vertex_cover,
    parse_graph,
    predict_and_verify,
)

import expect

SIZES = (6, 8, 10, 12)
PER_CELL = 200  # per (completeness, n), so 800 per completeness level


@pytest.fixture(scope="module")
def suite():
    """(label, instance, stable matchings in canonical order) for the random suite."""
    return [(label, inst, enumerate_stable(inst)) for label, inst in expect.random_suite(SIZES, PER_CELL)]


@pytest.mark.acceptance(1, "ten-agent fixture: matchings, profiles, costs and optima")
def test_ten_agent_fixture(ten):
    stable = enumerate_stable(ten)
    want = {name: expect.named(name) for name in expect.TEN_AGENT_MATCHINGS}
    assert set(stable) == set(want.values()) and len(stable) == 7
    for name, m in want.items():
        assert profile(ten, m).counts == expect.TEN_AGENT_PROFILES[name]
        assert profile(ten, m).cost() == expect.TEN_AGENT_COSTS[name]
    assert [expect.TEN_AGENT_COSTS[f"R{i}"] for i in range(1, 8)] == [41, 43, 38, 41, 40, 40, 39]

    egal = solve_criterion(ten, "egalitarian")
    assert egal.objective == 38 and egal.matching == want["R3"]
    assert solve_criterion(ten, "rank-maximal").matching == want["R3"]
    assert solve_criterion(ten, "generous").matching == want["R5"]
    assert solve_criterion(ten, "fc-max").objective == 2
    assert solve_criterion(ten, "min-regret").objective == 6


@pytest.mark.acceptance(2, "four-agent fixture without a stable matching")
def test_four_agent_fixture(nostable):
    assert solve_criterion(nostable, "any-stable").status == UNSAT
    res = solve_criterion(nostable, "almost-stable")
    _, oracle_k = min_blocking_over_all_matchings(nostable)
    assert oracle_k == 1
    assert res.status == OPTIMAL and res.objective == 1
    assert count_blocking(nostable, res.matching) == 1


@pytest.mark.acceptance(3, "every criterion's optimum equals the oracle's on the random suite")
def test_oracle_equivalence(suite):
    checked = defaultdict(int)
    for label, inst, stable in suite:
        for c in CRITERIA:
            res = solve_criterion(inst, c)
            if c == "almost-stable":
                if inst.n > 10:
                    continue
                _, k = min_blocking_over_all_matchings(inst)
                assert res.objective == k, (label, c)
                assert count_blocking(inst, res.matching) == k, (label, c)
            else:
                want = expect.oracle_optimum(inst, c, stable)
                if want is None:
                    assert res.status == UNSAT, (label, c)
                else:
                    value, m = want
                    assert res.status == OPTIMAL, (label, c)
                    assert res.matching == m, (label, c)
                    if c in ("rank-maximal", "generous"):
                        assert res.profile.counts == value, (label, c)
                    elif value is not None:
                        assert res.objective == value, (label, c)
            checked[label[1]] += 1
    per_level = len(SIZES) * PER_CELL
    assert all(checked[p] >= per_level for p in expect.COMPLETENESS)


@pytest.mark.acceptance(4, "all stable matchings of an instance match the same agents")
def test_matched_set_invariance(suite):
    for label, inst, stable in suite:
        ms = matched_set(inst)
        if not stable:
            assert ms is None, label
            continue
        assert {m.matched_agents() for m in stable} == {ms}, label


@pytest.mark.acceptance(5, "hardness gadgets reach their predicted optima")
def test_gadget_identities():
    k4 = complete_graph(4)
    assert len(min_vertex_cover(k4)) == 3
    expected = {FC: 53, GENEROUS: 15, EGALITARIAN: 107}
    for variant, value in expected.items():
        rep = predict_and_verify(GadgetSpec(variant, k4))
        assert rep.k == 3 and rep.prediction.value == value
        assert rep.ok and rep.actual == value, rep
    for name in ("edge", "triangle"):
        g = parse_graph((expect.DATA / f"{name}.graph").read_text())
        rep = predict_and_verify(GadgetSpec(INDEPENDENT_SET, g))
        assert rep.ok and rep.actual == 1, rep


@pytest.mark.acceptance(6, "integer program: feasible set equals stable set; dropped rows are caught")
def test_ip_feasible_set(nostable):
    count = 0
    for label, inst in expect.random_suite((4, 6, 8), 25):
        assert feasible_set_equals_stable_set(inst), label
        count += 1
    assert count >= 100
    assert feasible_set_equals_stable_set(nostable)
    assert not feasible_set_equals_stable_set(nostable, build_ip(nostable, drop_stability=True))


@pytest.mark.acceptance(7, "fewest R-th choices among min-regret stable matchings")
def test_lc_pipeline(suite):
    for label, inst, stable in suite:
        if not stable:
            continue
        astar = stable[0].matched_agents()
        profs = [profile(inst, m, astar=astar) for m in stable]
        R = min(p.regret() for p in profs)
        want = min(p[R] for p in profs if p.regret() == R) if R else 0
        m, count = solve_lc(inst)
        assert count == want, label
        p = profile(inst, m, astar=astar)
        assert p.regret() == R, label
        assert count_blocking(inst, m) == 0, label
        assert check_ratio(count, inst), label


@pytest.mark.acceptance(8, "forced-first-choice search succeeds exactly up to the fc optimum")
def test_fc_xp(suite):
    for label, inst, stable in suite:
        want = expect.oracle_optimum(inst, "fc-max", stable)
        best = -1 if want is None else want[0]
        for k in range(max(best, 0) + 2):
            got = fc_xp(inst, k)
            assert (got is not None) == (0 <= k <= best), (label, k)


@pytest.mark.acceptance(9, "bench at n=100, completeness 0.5, 5 seeds, every criterion")
def test_scale_sanity(tmp_path, report):
    out, summary = tmp_path / "bench.csv", tmp_path / "summary.csv"
    argv = ["bench", "--sizes", "100", "--completeness", "0.5", "--seeds", "5",
            "--criteria", "all", "--timeout-ms", "3000000", "--out", str(out), "--summary", str(summary)]
    assert cli.main(argv) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == cli.BENCH_HEADER
    body = rows[1:]
    assert len(body) == 5 * len(CRITERIA)
    assert all(len(r) == len(cli.BENCH_HEADER) for r in body)
    assert {r[0] for r in body} == set(CRITERIA)
    assert all(r[7] in ("optimal", "unsat") for r in body), [r for r in body if r[7] not in ("optimal", "unsat")]
    for c in CRITERIA:
        cell_ms = sum(float(r[6]) for r in body if r[0] == c)
        assert cell_ms < 3_000_000, c
    slowest = max(body, key=lambda r: float(r[6]))
    report(f"  scale: slowest run {slowest[0]} seed {slowest[3]} took {float(slowest[6]):.0f} ms")

    # report-only: mean any-stable time should not fall as n grows
    sizes = [20, 40, 60, 80, 100]
    trend = list(cli.bench_rows(sizes, [0.5], 5, ["any-stable"], 3_000_000))
    means = [mean(float(r[6]) for r in trend if r[1] == n) for n in sizes]
    steady = all(a <= b for a, b in zip(means, means[1:]))
    shown = ", ".join(f"n={n}: {m:.1f} ms" for n, m in zip(sizes, means))
    report(f"  scale: any-stable mean time {'non-decreasing' if steady else 'NOT monotone'} in n ({shown})")
