from collections import defaultdict

import pytest

from sriopt.analysis import count_blocking, first_choice_count, profile
from sriopt.criteria import solve_criterion
from sriopt.errors import BudgetExceededError
from sriopt.ipexport import (
    ALMOST_STABLE,
    EGALITARIAN,
    FC,
    LEVEL,
    build_ip,
    export_lp,
    feasible_assignments,
    feasible_set_equals_stable_set,
    induced_matching,
    objective_value,
)
from sriopt.model import Instance, RandomSpec, generate_random
from sriopt.oracle import enumerate_stable

import expect


def test_no_stable4_row_count(nostable):
    m = build_ip(nostable)
    assert m.families() == {"capacity": 4, "stability": 6, "symmetry": 6}
    assert len(m.constraints) == 16
    assert len(m.variables) == 12


def test_pair_variables_have_unit_coefficients(nostable):
    m = build_ip(nostable)
    stab = next(c for c in m.constraints if c.name == "stab_1_2")
    assert ("x_1_2", 1) in stab.terms and stab.sense == ">=" and stab.rhs == 1
    cap = next(c for c in m.constraints if c.name == "cap_2")
    assert dict(cap.terms)["x_1_2"] == 1


def test_stability_row_lists_better_partners(ten):
    m = build_ip(ten)
    for c in m.constraints:
        if c.family != "stability":
            continue
        u, v = (int(t) - 1 for t in c.name.split("_")[1:])
        want = ten.rank(u, v) - 1 + ten.rank(v, u) - 1 + 1
        assert len(c.terms) == want


def test_export_is_deterministic_and_well_formed(ten):
    a = export_lp(build_ip(ten, EGALITARIAN))
    b = export_lp(build_ip(expect.ten_agents(), EGALITARIAN))
    assert a == b
    lines = a.splitlines()
    assert lines[1] == "Minimize" and lines[-1] == "End"
    assert "Subject To" in lines and "Binary" in lines
    assert all(len(line) <= 78 for line in lines)
    assert " cap_1:" in a and " sym_1_3:" in a


def test_export_handles_empty_lists():
    inst = Instance.from_lists([[1], [0], []])
    text = export_lp(build_ip(inst))
    assert "cap_3" not in text
    assert export_lp(build_ip(Instance.from_lists([[]]))).endswith("End\n")


def test_bad_arguments(ten):
    with pytest.raises(ValueError):
        build_ip(ten, "pareto")
    with pytest.raises(ValueError):
        build_ip(ten, LEVEL)
    with pytest.raises(ValueError):
        build_ip(ten, LEVEL, level=2, sense="sideways")


def test_feasible_sets_on_fixtures(ten, nostable):
    points = list(feasible_assignments(build_ip(ten)))
    assert len(points) == 7
    assert {induced_matching(build_ip(ten), p) for p in points} == set(enumerate_stable(ten))
    assert feasible_set_equals_stable_set(ten)
    assert list(feasible_assignments(build_ip(nostable))) == []
    assert feasible_set_equals_stable_set(nostable)


def test_feasible_set_equals_stable_set_on_random_instances():
    count = 0
    for label, inst in expect.random_suite((4, 6, 8, 10), 30):
        assert feasible_set_equals_stable_set(inst), label
        count += 1
    assert count >= 100


def test_dropping_stability_is_detected(nostable):
    broken = build_ip(nostable, drop_stability=True)
    assert not feasible_set_equals_stable_set(nostable, broken)
    caught = sum(
        not feasible_set_equals_stable_set(inst, build_ip(inst, drop_stability=True))
        for _, inst in expect.random_suite((4, 6), 5)
        if inst.edges()
    )
    assert caught > 0


def test_enumeration_budget(ten):
    with pytest.raises(BudgetExceededError):
        list(feasible_assignments(build_ip(ten), node_limit=10))


def test_objectives_agree_with_analysis(ten):
    for obj, f in (
        (EGALITARIAN, lambda mt: profile(ten, mt).cost()),
        (FC, lambda mt: first_choice_count(ten, mt)),
    ):
        model = build_ip(ten, obj)
        for p in feasible_assignments(model):
            assert objective_value(model, p) == f(induced_matching(model, p))
    model = build_ip(ten, LEVEL, level=3, sense="minimize")
    assert model.sense == "minimize"
    for p in feasible_assignments(model):
        assert objective_value(model, p) == profile(ten, induced_matching(model, p))[3]


def test_profile_rows_cut_the_feasible_set(ten):
    model = build_ip(ten, profile_floor={1: 2, 2: 1, 3: 1})
    got = {induced_matching(model, p) for p in feasible_assignments(model)}
    want = {m for m in enumerate_stable(ten) if all(profile(ten, m)[r] >= y for r, y in ((1, 2), (2, 1), (3, 1)))}
    assert got == want and expect.named("R3") in got
    model = build_ip(ten, profile_ceiling={7: 0, 8: 0})
    got = {induced_matching(model, p) for p in feasible_assignments(model)}
    assert got == {expect.named("R4"), expect.named("R5")}


def test_almost_stable_slack_counts_blocking_pairs(nostable):
    instances = [nostable] + [i for _, i in expect.random_suite((4, 5), 4)]
    for inst in instances:
        model = build_ip(inst, ALMOST_STABLE)
        best = defaultdict(lambda: None)
        for p in feasible_assignments(model):
            mt = induced_matching(model, p)
            v = objective_value(model, p)
            best[mt] = v if best[mt] is None else min(best[mt], v)
        for mt, v in best.items():
            assert v == count_blocking(inst, mt)
        assert min(best.values()) == solve_criterion(inst, "almost-stable").objective


def _milp(model):
    """Solve the model with scipy; returns the optimal objective or None if infeasible."""
    np = pytest.importorskip("numpy")
    opt = pytest.importorskip("scipy.optimize")
    index = {v: i for i, v in enumerate(model.variables)}
    if not index:
        return 0 if all((con.sense != ">=" or con.rhs <= 0) for con in model.constraints) else None
    c = np.zeros(len(index))
    for v, coef in model.objective:
        c[index[v]] = coef
    if model.sense == "maximize":
        c = -c
    A = np.zeros((len(model.constraints), len(index)))
    lo = np.full(len(model.constraints), -np.inf)
    hi = np.full(len(model.constraints), np.inf)
    for k, con in enumerate(model.constraints):
        for v, coef in con.terms:
            A[k, index[v]] = coef
        if con.sense in (">=", "="):
            lo[k] = con.rhs
        if con.sense in ("<=", "="):
            hi[k] = con.rhs
    res = opt.milp(
        c,
        constraints=opt.LinearConstraint(A, lo, hi),
        integrality=np.ones(len(index)),
        bounds=opt.Bounds(0, 1),
    )
    if res.status == 2:
        return None
    assert res.status == 0
    value = round(res.fun)
    return -value if model.sense == "maximize" else value


def test_milp_solutions_match_the_oracle():
    for label, inst in expect.random_suite((6, 10, 14), 6):
        stable = enumerate_stable(inst)
        for obj, crit in ((EGALITARIAN, "egalitarian"), (FC, "fc-max")):
            got = _milp(build_ip(inst, obj))
            want = expect.oracle_optimum(inst, crit, stable)
            assert got == (None if want is None else want[0]), (label, obj)


def test_milp_almost_stable_and_ten_agents(ten, nostable):
    assert _milp(build_ip(ten, EGALITARIAN)) == 38
    assert _milp(build_ip(nostable, ALMOST_STABLE)) == 1
    inst = generate_random(RandomSpec(12, 1.0, 3))
    assert _milp(build_ip(inst, ALMOST_STABLE)) == solve_criterion(inst, "almost-stable").objective
