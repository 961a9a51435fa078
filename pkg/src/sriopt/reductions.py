"""Hardness gadgets: graphs in, SRI instances out.

Vertex-cover gadget (cubic graphs).  Vertex u_i owns 18 agents: a ring
v1..v8 and five pendant pairs w_j, x_j.  Within a group, agent ids follow
``vc_agent(i, role, copy)``: v1..v8 are offsets 0..7, w1..w5 are 8..12 and
x1..x5 are 13..17, so vertex i starts at 18*i.  Lists::

    v1: v2 v^s v8        v5: v6 v^s'' v4      w_j: x_j then its v
    v2: v3 w1 v1         v6: v7 w3 v5         x_j: w_j
    v3: v4 v^s' v2       v7: (variant)
    v4: v5 w2 v3         v8: v1 w5 v7

v7 ranks w4 v8 v6 for the fc and egalitarian variants and v8 v6 w4 for the
generous one.  The cross entries v^s, v^s', v^s'' come from a counter per
vertex that starts at -1 and steps by 2 per incident edge, edges taken in
sorted order; each edge links the two current copies as mutual second
choices.  Stable matchings pick, per group, either case 1 ({v1,v2},
{v3,v4}, {v5,v6}, {v7,v8}) or case 2 ({v2,v3}, {v4,v5}, {v6,v7}, {v8,v1}),
and the case-1 vertices form a vertex cover.

Independent-set gadget (any graph).  Vertex u_i owns v, w, x, y, a, b at
ids 6*i + 0..5.  Stable matchings are perfect and choose per vertex either
{v,w},{x,y} or {v,y},{w,x} (plus {a,b}); the second case earns one first
choice and the vertices using it are independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .criteria import Criterion, solve_criterion
from .engine import OPTIMAL
from .errors import GraphError
from .model import Instance, Matching

FC = "fc"
GENEROUS = "generous"
EGALITARIAN = "egalitarian"
INDEPENDENT_SET = "independent-set"
VARIANTS = (FC, GENEROUS, EGALITARIAN, INDEPENDENT_SET)
VC_VARIANTS = (FC, GENEROUS, EGALITARIAN)


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u + 1},{v + 1}) has an endpoint outside 1..{self.n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u + 1}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise GraphError(f"duplicate edge ({e[0] + 1},{e[1] + 1})")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def is_cubic(self) -> bool:
        return all(len(a) == 3 for a in self.adjacency)


def complete_graph(n: int) -> SimpleGraph:
    return SimpleGraph(n, tuple(combinations(range(n), 2)))


def parse_graph(text: str) -> SimpleGraph:
    """First line "n m", then m lines "u v" with 1-based vertices; '#' starts a comment line."""
    rows = []
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            rows.append((no, [int(t) for t in s.split()]))
        except ValueError:
            raise GraphError(f"line {no}: expected integers, got {s!r}") from None
    if not rows or len(rows[0][1]) != 2:
        raise GraphError("first line must be 'n m'")
    n, m = rows[0][1]
    if len(rows) - 1 != m:
        raise GraphError(f"header promises {m} edges, found {len(rows) - 1}")
    edges = []
    for no, vals in rows[1:]:
        if len(vals) != 2:
            raise GraphError(f"line {no}: expected 'u v'")
        edges.append((vals[0] - 1, vals[1] - 1))
    return SimpleGraph(n, tuple(edges))


def serialize_graph(g: SimpleGraph) -> str:
    return f"{g.n} {len(g.edges)}\n" + "".join(f"{u + 1} {v + 1}\n" for u, v in g.edges)


# -- vertex-cover gadget ------------------------------------------------------

VC_GROUP = 18
_VC_OFFSET = {"v": 0, "w": 8, "x": 13}
_VC_COPIES = {"v": 8, "w": 5, "x": 5}


def vc_agent(vertex: int, role: str, copy: int) -> int:
    """Agent id of role ``v``, ``w`` or ``x`` with 1-based copy number in vertex's group."""
    if role not in _VC_OFFSET or not 1 <= copy <= _VC_COPIES[role]:
        raise ValueError(f"no agent {role}{copy} in a vertex-cover group")
    return VC_GROUP * vertex + _VC_OFFSET[role] + copy - 1


def vc_agent_name(agent: int) -> str:
    vertex, off = divmod(agent, VC_GROUP)
    if off < 8:
        role, copy = "v", off + 1
    elif off < 13:
        role, copy = "w", off - 7
    else:
        role, copy = "x", off - 12
    return f"{role}{copy}_{vertex + 1}"


def build_vc_gadget(g: SimpleGraph, variant: str = FC) -> Instance:
    if variant not in VC_VARIANTS:
        raise ValueError(f"unknown vertex-cover variant {variant!r}")
    if not g.is_cubic():
        bad = next(u for u in range(g.n) if g.degree(u) != 3)
        raise GraphError(f"vertex-cover gadgets need a cubic graph; vertex {bad + 1} has degree {g.degree(bad)}")

    # the counter procedure: the k-th edge at a vertex uses ring copy 2k-1
    counter = [-1] * g.n
    cross: dict[int, int] = {}
    for i, j in g.edges:
        counter[i] += 2
        counter[j] += 2
        a, b = vc_agent(i, "v", counter[i]), vc_agent(j, "v", counter[j])
        cross[a], cross[b] = b, a

    prefs: list[list[int]] = []
    for i in range(g.n):
        v = [None] + [vc_agent(i, "v", c) for c in range(1, 9)]
        w = [None] + [vc_agent(i, "w", c) for c in range(1, 6)]
        x = [None] + [vc_agent(i, "x", c) for c in range(1, 6)]
        if variant == GENEROUS:
            v7 = [v[8], v[6], w[4]]
        else:
            v7 = [w[4], v[8], v[6]]
        prefs += [
            [v[2], cross[v[1]], v[8]],
            [v[3], w[1], v[1]],
            [v[4], cross[v[3]], v[2]],
            [v[5], w[2], v[3]],
            [v[6], cross[v[5]], v[4]],
            [v[7], w[3], v[5]],
            v7,
            [v[1], w[5], v[7]],
        ]
        owner = {1: v[2], 2: v[4], 3: v[6], 4: v[7], 5: v[8]}
        prefs += [[x[j], owner[j]] for j in range(1, 6)]
        prefs += [[w[j]] for j in range(1, 6)]
    return Instance.from_lists(prefs)


def vc_case(m: Matching, vertex: int) -> Optional[int]:
    """1 or 2 if vertex's ring is matched as that case, else None."""
    ring = [vc_agent(vertex, "v", c) for c in range(1, 9)]
    if all(m.partner[ring[k]] == ring[k + 1] for k in (0, 2, 4, 6)):
        return 1
    if all(m.partner[ring[k]] == ring[(k + 1) % 8] for k in (1, 3, 5, 7)):
        return 2
    return None


# -- independent-set gadget ---------------------------------------------------

IS_GROUP = 6
_IS_ROLES = ("v", "w", "x", "y", "a", "b")


def is_agent(vertex: int, role: str) -> int:
    if role not in _IS_ROLES:
        raise ValueError(f"no role {role!r} in an independent-set group")
    return IS_GROUP * vertex + _IS_ROLES.index(role)


def is_agent_name(agent: int) -> str:
    vertex, off = divmod(agent, IS_GROUP)
    return f"{_IS_ROLES[off]}_{vertex + 1}"


def build_is_gadget(g: SimpleGraph) -> Instance:
    prefs: list[list[int]] = []
    for i in range(g.n):
        v, w, x, y, a, b = (is_agent(i, r) for r in _IS_ROLES)
        nbrs = [is_agent(j, "v") for j in g.adjacency[i]]
        prefs += [
            [a, w] + nbrs + [y],
            [x, v, a, b],
            [a, y, w],
            [a, v, x],
            [w, b, v, x, y],
            [w, a],
        ]
    return Instance.from_lists(prefs)


def is_case(m: Matching, vertex: int) -> Optional[int]:
    """1 for {v,w},{x,y}; 2 for {v,y},{w,x}; None otherwise."""
    v, w, x, y = (is_agent(vertex, r) for r in "vwxy")
    if m.partner[v] == w and m.partner[x] == y:
        return 1
    if m.partner[v] == y and m.partner[w] == x:
        return 2
    return None


# -- exact graph parameters ---------------------------------------------------


def min_vertex_cover(g: SimpleGraph) -> frozenset:
    """Smallest vertex cover by brute force over subsets (small graphs only)."""
    for k in range(g.n + 1):
        for cover in combinations(range(g.n), k):
            s = set(cover)
            if all(u in s or v in s for u, v in g.edges):
                return frozenset(s)
    raise AssertionError("the full vertex set is always a cover")


def max_independent_set(g: SimpleGraph) -> frozenset:
    for k in range(g.n, -1, -1):
        for group in combinations(range(g.n), k):
            s = set(group)
            if not any(u in s and v in s for u, v in g.edges):
                return frozenset(s)
    raise AssertionError("the empty set is always independent")


# -- predictions ----------------------------------------------------------------


@dataclass(frozen=True)
class GadgetSpec:
    variant: str
    graph: SimpleGraph

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown gadget variant {self.variant!r}")

    def build(self) -> Instance:
        if self.variant == INDEPENDENT_SET:
            return build_is_gadget(self.graph)
        return build_vc_gadget(self.graph, self.variant)


@dataclass(frozen=True)
class GadgetPrediction:
    variant: str
    measure: str
    formula: str
    value: int


def predict(spec: GadgetSpec, k: int) -> GadgetPrediction:
    """Closed-form optimum; k is the min vertex cover (VC variants) or max independent set."""
    n = spec.graph.n
    if spec.variant == FC:
        return GadgetPrediction(FC, "first choices", "14n - k", 14 * n - k)
    if spec.variant == GENEROUS:
        return GadgetPrediction(GENEROUS, "third choices", "3n + k", 3 * n + k)
    if spec.variant == EGALITARIAN:
        return GadgetPrediction(EGALITARIAN, "cost", "26n + k", 26 * n + k)
    return GadgetPrediction(INDEPENDENT_SET, "first choices", "k", k)


def graph_parameter(spec: GadgetSpec) -> int:
    if spec.variant == INDEPENDENT_SET:
        return len(max_independent_set(spec.graph))
    return len(min_vertex_cover(spec.graph))


@dataclass(frozen=True)
class GadgetReport:
    variant: str
    n: int
    k: int
    prediction: GadgetPrediction
    actual: Optional[int]
    status: str

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL and self.actual == self.prediction.value


def predict_and_verify(spec: GadgetSpec, k: Optional[int] = None, time_limit_ms: Optional[float] = None) -> GadgetReport:
    if k is None:
        k = graph_parameter(spec)
    inst = spec.build()
    pred = predict(spec, k)
    if spec.variant in (FC, INDEPENDENT_SET):
        res = solve_criterion(inst, Criterion.FC_MAX, time_limit_ms=time_limit_ms)
        actual = res.objective
    elif spec.variant == EGALITARIAN:
        res = solve_criterion(inst, Criterion.EGALITARIAN, time_limit_ms=time_limit_ms)
        actual = res.objective
    else:
        # with lists of length 3 the generous loop minimises third choices first
        res = solve_criterion(inst, Criterion.GENEROUS, time_limit_ms=time_limit_ms)
        actual = dict(res.trace).get(3) if res.status == OPTIMAL else None
    return GadgetReport(spec.variant, spec.graph.n, k, pred, actual if res.status == OPTIMAL else None, res.status)
