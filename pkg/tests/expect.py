"""Ground truth shared by the test modules.

Expected values for the criteria are computed by scanning the oracle's
enumeration, never by the engine.  Because the enumeration comes out in
canonical order, the first matching attaining the optimum is also the one
the engine must return.
"""

from __future__ import annotations

from pathlib import Path

from sriopt.analysis import profile
from sriopt.model import Instance, Matching, RandomSpec, generate_random, load_instance

DATA = Path(__file__).parent / "data"

COMPLETENESS = (0.25, 0.5, 0.75, 1.0)

# the seven stable matchings of data/ten_agents.sri, 1-based pairs
TEN_AGENT_MATCHINGS = {
    "R1": [(1, 3), (2, 4), (5, 7), (6, 8), (9, 10)],
    "R2": [(1, 7), (2, 8), (3, 5), (4, 9), (6, 10)],
    "R3": [(1, 4), (2, 9), (3, 6), (5, 7), (8, 10)],
    "R4": [(1, 4), (2, 3), (5, 7), (6, 8), (9, 10)],
    "R5": [(1, 4), (2, 8), (3, 6), (5, 7), (9, 10)],
    "R6": [(1, 7), (2, 3), (4, 9), (5, 10), (6, 8)],
    "R7": [(1, 7), (2, 8), (3, 6), (4, 9), (5, 10)],
}
TEN_AGENT_PROFILES = {
    "R1": (2, 1, 0, 1, 4, 1, 1, 0, 0),
    "R2": (1, 1, 4, 0, 0, 1, 2, 1, 0),
    "R3": (2, 1, 1, 2, 2, 1, 1, 0, 0),
    "R4": (1, 2, 0, 1, 4, 2, 0, 0, 0),
    "R5": (1, 1, 2, 1, 3, 2, 0, 0, 0),
    "R6": (0, 3, 2, 2, 1, 0, 1, 1, 0),
    "R7": (0, 2, 4, 2, 0, 0, 1, 1, 0),
}
TEN_AGENT_COSTS = {"R1": 41, "R2": 43, "R3": 38, "R4": 41, "R5": 40, "R6": 40, "R7": 39}


def ten_agents() -> Instance:
    return load_instance(DATA / "ten_agents.sri")


def no_stable4() -> Instance:
    return load_instance(DATA / "no_stable4.sri")


def named(name: str) -> Matching:
    return Matching.from_pairs(10, [(a - 1, b - 1) for a, b in TEN_AGENT_MATCHINGS[name]])


def random_suite(sizes, per_cell: int):
    """(label, instance) over sizes x completeness x seeds 0..per_cell-1."""
    for n in sizes:
        for p in COMPLETENESS:
            for seed in range(per_cell):
                yield (n, p, seed), generate_random(RandomSpec(n, p, seed))


def _key(inst, criterion, profiles):
    if criterion == "any-stable":
        return lambda i: 0
    if criterion == "egalitarian":
        return lambda i: profiles[i].cost()
    if criterion == "fc-max":
        return lambda i: -(profiles[i][1] if profiles[i].length else 0)
    if criterion == "rank-maximal":
        return lambda i: tuple(-c for c in profiles[i].counts)
    if criterion == "generous":
        return lambda i: profiles[i].reverse()
    if criterion == "min-regret":
        return lambda i: profiles[i].regret()
    raise ValueError(criterion)


def oracle_optimum(inst: Instance, criterion: str, stable: list[Matching]):
    """(objective, canonical optimal matching) by scanning the enumeration; None if empty."""
    if not stable:
        return None
    astar = stable[0].matched_agents()
    profiles = [profile(inst, m, astar=astar) for m in stable]
    key = _key(inst, criterion, profiles)
    best = min(range(len(stable)), key=key)  # min() keeps the first, i.e. canonical, minimiser
    p = profiles[best]
    value = {
        "any-stable": None,
        "egalitarian": p.cost(),
        "fc-max": p[1] if p.length else 0,
        "rank-maximal": p.counts,
        "generous": p.counts,
        "min-regret": p.regret(),
    }[criterion]
    return value, stable[best]
