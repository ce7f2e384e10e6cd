"""Exact matching oracles and the small matchers the pipeline leans on.

The branch-and-bound solver branches on the uncovered vertex with the
fewest available edges (ties by lowest id) and prunes with two upper
bounds: remaining capacity ``|M| + free // r`` and a greedy vertex-cover
bound (any set of vertices hitting every available edge caps the number of
further matching edges).  The cover bound is what makes "no perfect
matching" proofs on near-extremal instances instant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import Edge, Hypergraph
from .errors import EmptyInput, Indivisible


@dataclass(frozen=True)
class MatchingResult:
    matching: tuple[Edge, ...]
    optimal: bool
    nodes_explored: int
    timed_out: bool


@dataclass(frozen=True)
class HallOutcome:
    """Either a saturating assignment of the right side, or a violating
    right-subset whose neighborhood is smaller than itself."""

    matching: Optional[dict[int, int]]
    violator: Optional[frozenset[int]]


def _edge_masks(h: Hypergraph) -> list[int]:
    return [sum(1 << v for v in e) for e in h.edges]


def _cover_bound(edge_masks: Sequence[int], avail: list[int]) -> int:
    """Size of a greedy vertex cover of the available edges.

    Any matching uses at most one edge per cover vertex, so this bounds the
    number of disjoint edges still addable.
    """
    remaining = list(avail)
    bound = 0
    while remaining:
        counts: dict[int, int] = {}
        for idx in remaining:
            m = edge_masks[idx]
            while m:
                v = (m & -m).bit_length() - 1
                counts[v] = counts.get(v, 0) + 1
                m &= m - 1
        best_v = min(counts, key=lambda v: (-counts[v], v))
        bound += 1
        bit = 1 << best_v
        remaining = [idx for idx in remaining if not edge_masks[idx] & bit]
    return bound


def _pick_branch_vertex(
    h: Hypergraph, covered: int, avail: list[int], edge_masks: Sequence[int]
) -> tuple[int, list[int]]:
    """Uncovered vertex with fewest available incident edges (ties: lowest id)."""
    counts = [0] * h.n
    incident: list[list[int]] = [[] for _ in range(h.n)]
    for idx in avail:
        for v in h.edges[idx]:
            counts[v] += 1
            incident[v].append(idx)
    best = -1
    for v in range(h.n):
        if covered >> v & 1:
            continue
        if best == -1 or counts[v] < counts[best]:
            best = v
    return best, incident[best] if best >= 0 else []


def max_matching_exact(h: Hypergraph, node_budget: int = 2_000_000) -> MatchingResult:
    """Maximum matching by pruned branch and bound.

    Branch choices at the selected vertex are its available edges plus
    "leave uncovered".  Deterministic; exceeds of the node budget return the
    best matching found with ``timed_out=True``.
    """
    edge_masks = _edge_masks(h)
    best: list[Edge] = []
    nodes = 0
    timed_out = False

    def search(covered: int, matching: list[Edge], avail: list[int]) -> None:
        nonlocal best, nodes, timed_out
        if timed_out:
            return
        nodes += 1
        if nodes > node_budget:
            timed_out = True
            return
        if len(matching) > len(best):
            best = list(matching)
        if not avail:
            return
        free = h.n - covered.bit_count()
        ub = len(matching) + min(free // h.r, _cover_bound(edge_masks, avail))
        if ub <= len(best):
            return
        v, v_edges = _pick_branch_vertex(h, covered, avail, edge_masks)
        for idx in v_edges:
            em = edge_masks[idx]
            nxt = [j for j in avail if not edge_masks[j] & em]
            matching.append(h.edges[idx])
            search(covered | em, matching, nxt)
            matching.pop()
            if timed_out or len(best) >= ub:
                return
        # leave v uncovered
        bit = 1 << v
        nxt = [j for j in avail if not edge_masks[j] & bit]
        search(covered | bit, matching, nxt)

    search(0, [], list(range(len(h.edges))))
    return MatchingResult(tuple(best), not timed_out, nodes, timed_out)


def has_perfect_matching(h: Hypergraph) -> Optional[tuple[Edge, ...]]:
    """A perfect matching, or None proven by exhausted search (no budget)."""
    if h.n % h.r != 0:
        raise Indivisible(f"n = {h.n} is not a multiple of r = {h.r}")
    edge_masks = _edge_masks(h)
    need = h.n // h.r

    def search(covered: int, matching: list[Edge], avail: list[int]) -> Optional[list[Edge]]:
        if len(matching) == need:
            return list(matching)
        remaining = need - len(matching)
        if len(avail) < remaining:
            return None
        if _cover_bound(edge_masks, avail) < remaining:
            return None
        v, v_edges = _pick_branch_vertex(h, covered, avail, edge_masks)
        if not v_edges:
            return None
        for idx in v_edges:
            em = edge_masks[idx]
            nxt = [j for j in avail if not edge_masks[j] & em]
            matching.append(h.edges[idx])
            found = search(covered | em, matching, nxt)
            if found is not None:
                return found
            matching.pop()
        return None

    found = search(0, [], list(range(len(h.edges))))
    return tuple(found) if found is not None else None


def max_matching_bruteforce(h: Hypergraph) -> int:
    """Independent oracle: exhaustive depth-first over all matchings, no
    pruning beyond disjointness."""
    edge_masks = _edge_masks(h)
    m = len(edge_masks)
    best = 0

    def extend(start: int, used: int, size: int) -> None:
        nonlocal best
        if size > best:
            best = size
        for idx in range(start, m):
            if not edge_masks[idx] & used:
                extend(idx + 1, used | edge_masks[idx], size + 1)

    extend(0, 0, 0)
    return best


def greedy_matching(h: Hypergraph) -> tuple[Edge, ...]:
    """Maximal matching built by repeatedly taking the lexicographically
    least edge disjoint from the current matching."""
    used = 0
    out: list[Edge] = []
    for e, em in zip(h.edges, _edge_masks(h)):
        if not em & used:
            out.append(e)
            used |= em
    return tuple(out)


def min_degree_peel_vertices(h: Hypergraph) -> list[int]:
    """Surviving vertices after peeling all vertices of degree < |E|/|V|.

    The ratio is fixed on the input; peeling removes the lowest-id vertex
    whose current degree falls below it, until none remains.
    """
    if not h.edges:
        raise EmptyInput("min_degree_peel needs at least one edge")
    theta = Fraction(len(h.edges), h.n)
    alive = set(range(h.n))
    edges = [set(e) for e in h.edges]
    live_edge = [True] * len(edges)
    deg = [0] * h.n
    for idx, e in enumerate(edges):
        for v in e:
            deg[v] += 1
    while True:
        victim = -1
        for v in sorted(alive):
            if deg[v] < theta:
                victim = v
                break
        if victim < 0:
            break
        alive.discard(victim)
        for idx, e in enumerate(edges):
            if live_edge[idx] and victim in e:
                live_edge[idx] = False
                for u in e:
                    deg[u] -= 1
    return sorted(alive)


def min_degree_peel(h: Hypergraph) -> Hypergraph:
    """Nonempty subgraph with minimum vertex degree >= |E(H)|/|V(H)|."""
    return h.induce(min_degree_peel_vertices(h))


def hall_matching(adjacency: Sequence[Sequence[int]], n_left: int) -> HallOutcome:
    """Match every right item to a distinct left item, or certify failure.

    ``adjacency[r]`` lists the left ids adjacent to right item ``r``.
    On failure the violator is the set of right items reachable by
    alternating paths from an unsaturated right item; its neighborhood is
    strictly smaller than itself.
    """
    match_left: dict[int, int] = {}  # left -> right
    match_right: dict[int, int] = {}  # right -> left

    def augment(r: int, seen_left: set[int], seen_right: set[int]) -> bool:
        seen_right.add(r)
        for l in adjacency[r]:
            if l in seen_left:
                continue
            seen_left.add(l)
            if l not in match_left or augment(match_left[l], seen_left, seen_right):
                match_left[l] = r
                match_right[r] = l
                return True
        return False

    for r in range(len(adjacency)):
        seen_left: set[int] = set()
        seen_right: set[int] = set()
        if not augment(r, seen_left, seen_right):
            return HallOutcome(None, frozenset(seen_right))
    return HallOutcome(dict(match_right), None)


def tripartite_pm_444(mask: int):
    """Re-export of the 4x4x4 perfect-matching scan (see link module)."""
    from .link import tripartite_perfect_matching

    return tripartite_perfect_matching(mask)
