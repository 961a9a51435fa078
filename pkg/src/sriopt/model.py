"""Instances, matchings, the text formats for both, and the random generator.

Agents are 0-based internally and 1-based in files.

Instance file::

    # comments start with '#'
    4
    2 3 4
    3 1 4
    1 2 4
    1 2 3

The first non-comment line is the agent count ``n``; the next ``n``
non-comment lines are the preference lists, most preferred first.  A blank
line is an empty list.

Matching file: one ``i j`` pair per line with ``i < j``, sorted.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ParseError, UnacceptablePairError, ValidationError


@dataclass(frozen=True)
class Instance:
    prefs: tuple[tuple[int, ...], ...]
    _rank: tuple[dict, ...] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        prefs = tuple(tuple(int(b) for b in lst) for lst in self.prefs)
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "_rank", tuple({b: r + 1 for r, b in enumerate(lst)} for lst in prefs))

    @classmethod
    def from_lists(cls, prefs: Iterable[Iterable[int]], symmetrize: bool = False) -> "Instance":
        """Build and validate an instance from 0-based lists."""
        lists = [list(lst) for lst in prefs]
        validate_lists(lists, symmetrize=symmetrize)
        if symmetrize:
            sets = [set(lst) for lst in lists]
            lists = [[b for b in lst if a in sets[b]] for a, lst in enumerate(lists)]
        return cls(tuple(tuple(lst) for lst in lists))

    @property
    def n(self) -> int:
        return len(self.prefs)

    @property
    def max_list_len(self) -> int:
        return max((len(lst) for lst in self.prefs), default=0)

    def rank(self, a: int, b: int) -> int:
        try:
            return self._rank[a][b]
        except (KeyError, IndexError):
            raise UnacceptablePairError(f"agents {a + 1} and {b + 1} are not an acceptable pair") from None

    def acceptable(self, a: int, b: int) -> bool:
        return 0 <= a < self.n and b in self._rank[a]

    def rank_dict(self, a: int) -> dict:
        return self._rank[a]

    def edges(self) -> list[tuple[int, int]]:
        """Acceptable unordered pairs as (a, b) with a < b, sorted."""
        return [(a, b) for a in range(self.n) for b in sorted(self.prefs[a]) if a < b]

    def restrict(self, keep) -> "Instance":
        """Sub-instance keeping the ordered pairs for which ``keep(a, b)`` is true.

        Deletion is symmetric: a pair survives only if ``keep`` holds both ways.
        """
        return Instance(tuple(
            tuple(b for b in lst if keep(a, b) and keep(b, a)) for a, lst in enumerate(self.prefs)
        ))


def rank(inst: Instance, a: int, b: int) -> int:
    return inst.rank(a, b)


def validate_lists(lists: Sequence[Sequence[int]], symmetrize: bool = False) -> None:
    n = len(lists)
    sets = []
    for a, lst in enumerate(lists):
        seen = set()
        for b in lst:
            if not 0 <= b < n:
                raise ValidationError(f"agent {a + 1} lists unknown agent {b + 1}")
            if b == a:
                raise ValidationError(f"self-reference: agent {a + 1} lists itself")
            if b in seen:
                raise ValidationError(f"duplicate entry: agent {a + 1} lists {b + 1} twice")
            seen.add(b)
        sets.append(seen)
    if symmetrize:
        return
    for a, s in enumerate(sets):
        for b in sorted(s):
            if a not in sets[b]:
                i, j = sorted((a, b))
                raise ValidationError(f"asymmetric pair ({i + 1},{j + 1})")


@dataclass(frozen=True)
class Matching:
    """Symmetric partial pairing; ``partner[a]`` is None when a is unmatched."""

    partner: tuple[Optional[int], ...]

    def __post_init__(self):
        p = tuple(None if b is None else int(b) for b in self.partner)
        object.__setattr__(self, "partner", p)
        for a, b in enumerate(p):
            if b is None:
                continue
            if b == a or not 0 <= b < len(p) or p[b] != a:
                raise ValidationError(f"partner map is not an involution at agent {a + 1}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Matching":
        partner: list[Optional[int]] = [None] * n
        for a, b in pairs:
            for x in (a, b):
                if not 0 <= x < n:
                    raise ValidationError(f"agent {x + 1} out of range 1..{n}")
            if a == b:
                raise ValidationError(f"agent {a + 1} paired with itself")
            if partner[a] is not None or partner[b] is not None:
                raise ValidationError(f"agent matched twice in pair ({a + 1},{b + 1})")
            partner[a], partner[b] = b, a
        return cls(tuple(partner))

    @classmethod
    def empty(cls, n: int) -> "Matching":
        return cls((None,) * n)

    @property
    def n(self) -> int:
        return len(self.partner)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in enumerate(self.partner) if b is not None and a < b]

    def matched_agents(self) -> frozenset:
        return frozenset(a for a, b in enumerate(self.partner) if b is not None)

    def key(self) -> tuple[int, ...]:
        """Canonical ordering key: the partner vector with 'unmatched' sorting last."""
        n = self.n
        return tuple(n if b is None else b for b in self.partner)

    def __len__(self):
        return sum(1 for a, b in enumerate(self.partner) if b is not None and a < b)


def check_matching(inst: Instance, m: Matching) -> None:
    if m.n != inst.n:
        raise ValidationError(f"matching has {m.n} agents, instance has {inst.n}")
    for a, b in m.pairs():
        if not inst.acceptable(a, b):
            raise ValidationError(f"pair ({a + 1},{b + 1}) is not acceptable")


# -- text formats -----------------------------------------------------------


def _content_lines(text: str):
    for no, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        yield no, line


_TOKEN = re.compile(r"\S+")


def _tokens(no: int, line: str) -> list[tuple[int, int]]:
    """Integer tokens of a line with their 1-based columns."""
    out = []
    for mt in _TOKEN.finditer(line):
        try:
            out.append((int(mt.group()), mt.start() + 1))
        except ValueError:
            raise ParseError(f"expected an integer, got {mt.group()!r}", no, mt.start() + 1) from None
    return out


def parse_instance(text: str, symmetrize: bool = False) -> Instance:
    lines = list(_content_lines(text))
    head = next(((no, ln) for no, ln in lines if ln.strip()), None)
    if head is None:
        raise ParseError("missing agent count", 1, 1)
    no, ln = head
    vals = _tokens(no, ln)
    if len(vals) != 1 or vals[0][0] < 0:
        raise ParseError("first line must be a single non-negative agent count", no, 1)
    n = vals[0][0]
    body = lines[lines.index(head) + 1:]
    if len(body) > n and any(ln.strip() for _, ln in body[n:]):
        extra = next(no for no, ln in body[n:] if ln.strip())
        raise ParseError(f"more than {n} preference lines", extra, 1)
    lists = []
    for i in range(n):
        if i < len(body):
            no, ln = body[i]
            raw = _tokens(no, ln)
            for v, col in raw:
                if not 1 <= v <= n:
                    raise ParseError(f"agent index {v} out of range 1..{n}", no, col)
            lists.append([v - 1 for v, _ in raw])
        else:
            # trailing empty lists may have been stripped by an editor
            lists.append([])
    return Instance.from_lists(lists, symmetrize=symmetrize)


def serialize_instance(inst: Instance) -> str:
    out = [str(inst.n)]
    out.extend(" ".join(str(b + 1) for b in lst) for lst in inst.prefs)
    return "\n".join(out) + "\n"


def parse_matching(text: str, n: int) -> Matching:
    pairs = []
    for no, ln in _content_lines(text):
        if not ln.strip():
            continue
        vals = _tokens(no, ln)
        if len(vals) != 2:
            raise ParseError("expected a pair 'i j'", no, 1)
        pairs.append((vals[0][0] - 1, vals[1][0] - 1))
    return Matching.from_pairs(n, pairs)


def serialize_matching(m: Matching) -> str:
    return "".join(f"{a + 1} {b + 1}\n" for a, b in m.pairs())


def load_instance(path, symmetrize: bool = False) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), symmetrize=symmetrize)


def load_matching(path, n: int) -> Matching:
    with open(path, encoding="utf-8") as fh:
        return parse_matching(fh.read(), n)


# -- random instances -------------------------------------------------------


@dataclass(frozen=True)
class RandomSpec:
    n: int
    completeness: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.completeness <= 1.0:
            raise ValueError(f"completeness must lie in [0, 1], got {self.completeness}")
        if self.n < 0:
            raise ValueError("n must be non-negative")


def generate_random(spec: RandomSpec) -> Instance:
    """One acceptance coin per unordered pair, then a uniform shuffle of each list."""
    rng = random.Random(spec.seed)
    n, p = spec.n, spec.completeness
    acc: list[list[int]] = [[] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                acc[a].append(b)
                acc[b].append(a)
    for lst in acc:
        rng.shuffle(lst)
    return Instance(tuple(tuple(lst) for lst in acc))
