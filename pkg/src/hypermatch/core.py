"""Uniform hypergraphs, degrees, exact densities, matchings, and the `.hg` format.

Edges are stored as strictly increasing tuples of 0-based vertex ids.  All
density values are exact :class:`fractions.Fraction` so that threshold
comparisons (``>= 2 * eta`` and friends) never suffer float rounding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import (
    EmptyInput,
    InvalidDegreeOrder,
    InvalidPartition,
    InvalidVertex,
    TooSmall,
)

Edge = tuple[int, ...]


class Hypergraph:
    """An r-uniform hypergraph on vertex set [0, n).

    Immutable after construction; all operations are pure.  A per-vertex
    bitset over edge indices accelerates degree queries.
    """

    __slots__ = ("n", "r", "edges", "edge_set", "_vertex_bits")

    def __init__(self, n: int, r: int, edges: Iterable[Iterable[int]]):
        if r < 2:
            raise ValueError("uniformity r must be at least 2")
        if n < r:
            raise ValueError("need n >= r")
        norm: list[Edge] = []
        seen: set[Edge] = set()
        for raw in edges:
            e = tuple(sorted(raw))
            if len(e) != r or len(set(e)) != r:
                raise ValueError(f"edge {raw!r} is not a set of {r} distinct vertices")
            if e[0] < 0 or e[-1] >= n:
                raise InvalidVertex(f"edge {e!r} uses a vertex outside [0, {n})")
            if e in seen:
                raise ValueError(f"duplicate edge {e!r}")
            seen.add(e)
            norm.append(e)
        norm.sort()
        self.n = n
        self.r = r
        self.edges: tuple[Edge, ...] = tuple(norm)
        self.edge_set: frozenset[Edge] = frozenset(norm)
        bits = [0] * n
        for idx, e in enumerate(norm):
            bit = 1 << idx
            for v in e:
                bits[v] |= bit
        self._vertex_bits = bits

    # -- basic queries ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.r, self.edges) == (other.n, other.r, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, r={self.r}, m={len(self.edges)})"

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self.edge_set

    def degree(self, vertices: Iterable[int]) -> int:
        """Number of edges containing every vertex of the given set."""
        d = tuple(vertices)
        if not 1 <= len(d) <= self.r - 1:
            raise InvalidDegreeOrder(f"set size {len(d)} outside [1, {self.r - 1}]")
        if len(set(d)) != len(d):
            raise InvalidVertex("degree set has repeated vertices")
        acc = -1
        for v in d:
            if not 0 <= v < self.n:
                raise InvalidVertex(f"vertex {v} outside [0, {self.n})")
            acc &= self._vertex_bits[v]
        return acc.bit_count()

    def min_degree(self, d: int) -> int:
        """Minimum degree over all d-sets of vertices."""
        if not 1 <= d <= self.r - 1:
            raise InvalidDegreeOrder(f"order {d} outside [1, {self.r - 1}]")
        best = None
        for ds in combinations(range(self.n), d):
            acc = -1
            for v in ds:
                acc &= self._vertex_bits[v]
            cnt = acc.bit_count()
            if best is None or cnt < best:
                best = cnt
                if best == 0:
                    break
        return 0 if best is None else best

    def density(self, vertices: Iterable[int]) -> Fraction:
        """Edge density of the restriction to the given vertex set, exact."""
        u = set(vertices)
        if len(u) < self.r:
            raise TooSmall(f"need at least {self.r} vertices, got {len(u)}")
        count = sum(1 for e in self.edges if u.issuperset(e))
        return Fraction(count, comb(len(u), self.r))

    def partite_density(self, kind: "DensityKind", parts: "PartiteSpec") -> Fraction:
        """Exact density of the cross edges prescribed by ``kind``.

        The denominator is the number of vertex tuples of the kind's shape,
        e.g. ``|A| * C(|B|, r-1)`` for the 1+(r-1) split.
        """
        shape = kind.shape(self.r)
        if len(parts.classes) != len(shape):
            raise InvalidPartition(
                f"kind {kind.value} needs {len(shape)} classes, got {len(parts.classes)}"
            )
        sets = [set(c) for c in parts.classes]
        for c in sets:
            for v in c:
                if not 0 <= v < self.n:
                    raise InvalidVertex(f"vertex {v} outside [0, {self.n})")
        denom = 1
        for c, k in zip(sets, shape):
            denom *= comb(len(c), k)
        if denom == 0:
            return Fraction(0)
        count = 0
        for e in self.edges:
            if all(sum(1 for v in e if v in c) == k for c, k in zip(sets, shape)):
                count += 1
        return Fraction(count, denom)

    def induce(self, vertices: Iterable[int]) -> "Hypergraph":
        """Restriction to a vertex subset, relabeled to [0, |U|) in order."""
        u = sorted(set(vertices))
        for v in u:
            if not 0 <= v < self.n:
                raise InvalidVertex(f"vertex {v} outside [0, {self.n})")
        relabel = {v: i for i, v in enumerate(u)}
        uset = set(u)
        edges = [
            tuple(relabel[v] for v in e) for e in self.edges if uset.issuperset(e)
        ]
        if len(u) < self.r:
            # Degenerate restriction: no edges can fit; keep a legal n.
            return Hypergraph(max(len(u), self.r), self.r, [])
        return Hypergraph(len(u), self.r, edges)


class DensityKind(enum.Enum):
    """The partite density shapes used throughout: how many vertices of an
    edge fall in each class."""

    SPLIT_1_3 = "1+3"  # d(A, (B choose r-1))
    SPLIT_1_1_2 = "1+1+2"  # d(A, B, (C choose r-2))
    SPLIT_1_1_1_1 = "1+1+1+1"  # d(A1, (A2 x ... x Ar))

    def shape(self, r: int) -> tuple[int, ...]:
        if self is DensityKind.SPLIT_1_3:
            return (1, r - 1)
        if self is DensityKind.SPLIT_1_1_2:
            return (1, 1, r - 2)
        return tuple([1] * r)


@dataclass(frozen=True)
class PartiteSpec:
    """An ordered list of pairwise disjoint, nonempty vertex classes."""

    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for c in self.classes:
            if not c:
                raise InvalidPartition("empty class")
            cs = set(c)
            if len(cs) != len(c):
                raise InvalidPartition("repeated vertex within a class")
            if seen & cs:
                raise InvalidPartition("classes overlap")
            seen |= cs

    @staticmethod
    def of(*classes: Iterable[int]) -> "PartiteSpec":
        return PartiteSpec(tuple(tuple(sorted(c)) for c in classes))


@dataclass(frozen=True)
class MatchingCheck:
    valid: bool
    perfect: bool


def validate_matching(h: Hypergraph, matching: Sequence[Iterable[int]]) -> MatchingCheck:
    """Check disjointness and edge membership; perfect iff r*|M| = n."""
    seen: set[int] = set()
    for raw in matching:
        e = tuple(sorted(raw))
        if e not in h.edge_set:
            return MatchingCheck(False, False)
        es = set(e)
        if seen & es:
            return MatchingCheck(False, False)
        seen |= es
    return MatchingCheck(True, len(seen) == h.n)


# -- `.hg` interchange format ---------------------------------------------
#
# line 1: "r n m"; then m lines of r strictly increasing vertex ids;
# '#' starts a comment line; trailing newline required.


def format_hg(h: Hypergraph) -> str:
    lines = [f"{h.r} {h.n} {len(h.edges)}"]
    lines.extend(" ".join(str(v) for v in e) for e in h.edges)
    return "\n".join(lines) + "\n"


def parse_hg(text: str) -> Hypergraph:
    if not text.endswith("\n"):
        raise ValueError("missing trailing newline")
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise EmptyInput("no header line")
    head = rows[0].split()
    if len(head) != 3:
        raise ValueError(f"bad header {rows[0]!r}")
    r, n, m = (int(x) for x in head)
    if len(rows) - 1 != m:
        raise ValueError(f"expected {m} edge lines, found {len(rows) - 1}")
    edges = []
    for ln in rows[1:]:
        vs = tuple(int(x) for x in ln.split())
        if len(vs) != r:
            raise ValueError(f"edge line {ln!r} has {len(vs)} ids, expected {r}")
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise ValueError(f"edge line {ln!r} is not strictly increasing")
        edges.append(vs)
    return Hypergraph(n, r, edges)


def save_hg(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(format_hg(h))


def load_hg(path) -> Hypergraph:
    with open(path, "r", encoding="ascii") as f:
        return parse_hg(f.read())
