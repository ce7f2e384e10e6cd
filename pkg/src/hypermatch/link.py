"""4x4x4 tripartite link graphs as 64-bit masks.

Bit ``16*i + 4*j + k`` encodes the triple ``(i, j, k)`` with ``i`` in the
first class, ``j`` in the second, ``k`` in the third.  Pair degrees, the
degree-profile pattern detectors, the 37-edge classification, and the
canonical form under the full relabeling group live here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from .core import DensityKind, Hypergraph, PartiteSpec
from .errors import InvalidPartition, LemmaViolation, NotApplicable, NotDisjoint

FULL_MASK = (1 << 64) - 1

Side = tuple[int, int]
SIDES: tuple[Side, ...] = ((0, 1), (0, 2), (1, 2))

_PERMS4 = tuple(permutations(range(4)))


def bit_index(i: int, j: int, k: int) -> int:
    return 16 * i + 4 * j + k


def triple_of_bit(b: int) -> tuple[int, int, int]:
    return b >> 4, (b >> 2) & 3, b & 3


def format_mask(mask: int) -> str:
    """16 hex digits, most-significant bit = index 63."""
    return f"{mask & FULL_MASK:016x}"


def parse_mask(text: str) -> int:
    s = text.strip()
    if len(s) != 16 or any(c not in "0123456789abcdefABCDEF" for c in s):
        raise ValueError(f"expected 16 hex digits, got {text!r}")
    return int(s, 16)


def _pair_mask(side: Side, x: int, y: int) -> int:
    """Mask of the 4 triples through the cross-class pair (x, y) of side."""
    m = 0
    for t in range(4):
        if side == (0, 1):
            m |= 1 << bit_index(x, y, t)
        elif side == (0, 2):
            m |= 1 << bit_index(x, t, y)
        else:
            m |= 1 << bit_index(t, x, y)
    return m


PAIR_MASKS: dict[Side, list[list[int]]] = {
    s: [[_pair_mask(s, x, y) for y in range(4)] for x in range(4)] for s in SIDES
}

# All 576 candidate tripartite perfect matchings: pairs of permutations
# (sigma, tau) with triples (i, sigma[i], tau[i]).
_PM_CANDIDATES: list[tuple[int, tuple[tuple[int, int, int], ...]]] = []
for _sigma in _PERMS4:
    for _tau in _PERMS4:
        _triples = tuple((i, _sigma[i], _tau[i]) for i in range(4))
        _m = 0
        for _t in _triples:
            _m |= 1 << bit_index(*_t)
        _PM_CANDIDATES.append((_m, _triples))

# The 64 masks whose edges are exactly the triples meeting a fixed
# transversal (a, b, c); each has 64 - 27 = 37 bits.
COVER_MASKS: list[tuple[tuple[int, int, int], int]] = []
for _a in range(4):
    for _b in range(4):
        for _c in range(4):
            _m = 0
            for _bit in range(64):
                _i, _j, _k = triple_of_bit(_bit)
                if _i == _a or _j == _b or _k == _c:
                    _m |= 1 << _bit
            COVER_MASKS.append(((_a, _b, _c), _m))


class Pattern(enum.Enum):
    """Degree-profile patterns of disjoint cross-class pairs."""

    H432 = "H432"
    H4221 = "H4221"
    H3321 = "H3321"

    @property
    def required_degrees(self) -> tuple[int, ...]:
        return {"H432": (4, 3, 2), "H4221": (4, 2, 2, 1), "H3321": (3, 3, 2, 1)}[
            self.value
        ]


class Verdict(enum.Enum):
    PERFECT_MATCHING = "PerfectMatching"
    H432 = "H432"
    H4221 = "H4221"
    H3321 = "H3321"
    EXT = "Ext"


@dataclass(frozen=True)
class PairSystem:
    """Vertex-disjoint cross-class pairs with their third-class degrees."""

    side: Side
    pairs: tuple[tuple[int, int], ...]
    degrees: tuple[int, ...]


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    witness: object  # matching triples, PairSystem, or cover triple


def pair_degree(mask: int, side: Side, x: int, y: int) -> int:
    """Size of the third-class neighborhood of the pair (x, y)."""
    return (mask & PAIR_MASKS[side][x][y]).bit_count()


def crossing_degree_sum(
    mask: int, side: Side, pair1: tuple[int, int], pair2: tuple[int, int]
) -> int:
    """deg(x1, y2) + deg(x2, y1) for two disjoint pairs of one side."""
    (x1, y1), (x2, y2) = pair1, pair2
    if x1 == x2 or y1 == y2:
        raise NotDisjoint(f"pairs {pair1} and {pair2} share a vertex")
    return pair_degree(mask, side, x1, y2) + pair_degree(mask, side, x2, y1)


def tripartite_perfect_matching(mask: int) -> Optional[tuple[tuple[int, int, int], ...]]:
    """Four disjoint triples, one vertex per class each, or None.

    Scans all 576 permutation pairs.
    """
    for pm_mask, triples in _PM_CANDIDATES:
        if mask & pm_mask == pm_mask:
            return triples
    return None


def _degree_matrix(mask: int, side: Side) -> list[list[int]]:
    masks = PAIR_MASKS[side]
    return [[(mask & masks[x][y]).bit_count() for y in range(4)] for x in range(4)]


def _detect_from_matrix(
    degs: Sequence[Sequence[int]], side: Side, kind: Pattern
) -> Optional[PairSystem]:
    req = kind.required_degrees
    need = len(req)
    for perm in _PERMS4:
        sys_pairs = [(x, perm[x]) for x in range(4)]
        ranked = sorted(sys_pairs, key=lambda p: (-degs[p[0]][p[1]], p))
        chosen = ranked[:need]
        vals = tuple(degs[x][y] for x, y in chosen)
        if all(v >= r for v, r in zip(vals, req)):
            return PairSystem(side, tuple(chosen), vals)
    return None


def detect_pattern(mask: int, kind: Pattern) -> Optional[PairSystem]:
    """First pair system (deterministic scan order) matching the profile."""
    for side in SIDES:
        found = _detect_from_matrix(_degree_matrix(mask, side), side, kind)
        if found is not None:
            return found
    return None


def is_ext(mask: int) -> Optional[tuple[int, int, int]]:
    """Cover triple (a, b, c) if the graph has 37 edges all meeting it."""
    if mask.bit_count() != 37:
        return None
    for cover, cm in COVER_MASKS:
        if mask & ~cm == 0:
            return cover
    return None


def classify(mask: int) -> Classification:
    """Classify a link graph with >= 37 edges into the five cases.

    Precedence: perfect matching, then the 432 / 4221 / 3321 degree
    profiles, then the covered-37-edge terminal case.
    """
    if mask.bit_count() < 37:
        raise NotApplicable(f"classification needs >= 37 edges, got {mask.bit_count()}")
    pm = tripartite_perfect_matching(mask)
    if pm is not None:
        return Classification(Verdict.PERFECT_MATCHING, pm)
    matrices = [(side, _degree_matrix(mask, side)) for side in SIDES]
    for kind, verdict in (
        (Pattern.H432, Verdict.H432),
        (Pattern.H4221, Verdict.H4221),
        (Pattern.H3321, Verdict.H3321),
    ):
        for side, degs in matrices:
            found = _detect_from_matrix(degs, side, kind)
            if found is not None:
                return Classification(verdict, found)
    cover = is_ext(mask)
    if cover is not None:
        return Classification(Verdict.EXT, cover)
    raise LemmaViolation(mask)


def verify_witness(mask: int, result: Classification) -> bool:
    """Independently recheck a classification witness."""
    if result.verdict is Verdict.PERFECT_MATCHING:
        triples = result.witness
        used = [set(), set(), set()]
        for i, j, k in triples:
            if mask >> bit_index(i, j, k) & 1 == 0:
                return False
            for axis, v in enumerate((i, j, k)):
                if v in used[axis]:
                    return False
                used[axis].add(v)
        return len(triples) == 4
    if result.verdict is Verdict.EXT:
        a, b, c = result.witness
        cm = dict(COVER_MASKS)[(a, b, c)]
        return mask.bit_count() == 37 and mask & ~cm == 0
    ps: PairSystem = result.witness
    req = Pattern[result.verdict.value].required_degrees
    xs = [p[0] for p in ps.pairs]
    ys = [p[1] for p in ps.pairs]
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        return False
    degs = [pair_degree(mask, ps.side, x, y) for x, y in ps.pairs]
    return all(d >= r for d, r in zip(degs, req))


# -- canonical form ---------------------------------------------------------

_CANON_TABLE = None
_CANON_WEIGHTS = None


def _build_canon_table():
    """Bit permutation table for (S4 x S4 x S4) semidirect S3, 82944 rows."""
    global _CANON_TABLE, _CANON_WEIGHTS
    import numpy as np

    perms = np.array(_PERMS4, dtype=np.int64)  # (24, 4)
    i_idx, j_idx, k_idx = np.indices((4, 4, 4))
    rows = []
    for axes in permutations(range(3)):
        for p1 in perms:
            src1 = 16 * p1
            for p2 in perms:
                src12 = src1[:, None] + 4 * p2[None, :]
                for p3 in perms:
                    cube = src12[:, :, None] + p3[None, None, :]
                    rows.append(cube.transpose(axes).reshape(64))
    _CANON_TABLE = np.array(rows, dtype=np.uint8)
    _CANON_WEIGHTS = (np.uint64(1) << np.arange(64, dtype=np.uint64))


def canonical_form(mask: int) -> int:
    """Minimum mask over all within-class relabelings and class swaps."""
    import numpy as np

    if _CANON_TABLE is None:
        _build_canon_table()
    bits = np.zeros(64, dtype=np.uint64)
    for b in range(64):
        if mask >> b & 1:
            bits[b] = 1
    images = bits[_CANON_TABLE]  # (82944, 64) of 0/1
    values = images @ _CANON_WEIGHTS
    return int(values.min())


def apply_relabeling(
    mask: int,
    class_order: tuple[int, int, int],
    p1: Sequence[int],
    p2: Sequence[int],
    p3: Sequence[int],
) -> int:
    """Relabel within classes then permute the classes; used for orbit tests."""
    out = 0
    ps = (p1, p2, p3)
    for b in range(64):
        if mask >> b & 1:
            t = triple_of_bit(b)
            relabeled = tuple(ps[axis][t[axis]] for axis in range(3))
            reordered = tuple(relabeled[class_order[axis]] for axis in range(3))
            out |= 1 << bit_index(*reordered)
    return out


def build_link_graph(
    h: Hypergraph,
    blocks: tuple[PartiteSpec, PartiteSpec, PartiteSpec],
    leftover: Sequence[int],
    eta: Fraction,
) -> int:
    """Mask with bit (i, j, k) set iff the leftover set is dense (>= 2*eta)
    toward the class triple (block0[i], block1[j], block2[k]).

    Single pass over the edges; densities compared exactly.
    """
    z = set(leftover)
    label: dict[int, tuple[int, int]] = {}
    sizes = [[0] * 4 for _ in range(3)]
    for b_idx, spec in enumerate(blocks):
        if len(spec.classes) != 4:
            raise InvalidPartition("each block needs exactly 4 classes")
        for c_idx, cls in enumerate(spec.classes):
            sizes[b_idx][c_idx] = len(cls)
            for v in cls:
                if v in label or v in z:
                    raise InvalidPartition("blocks and leftover must be disjoint")
                label[v] = (b_idx, c_idx)
    counts = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    for e in h.edges:
        z_cnt = 0
        cls_hits = []
        ok = True
        for v in e:
            if v in z:
                z_cnt += 1
            elif v in label:
                cls_hits.append(label[v])
            else:
                ok = False
                break
        if not ok or z_cnt != 1 or len(cls_hits) != 3:
            continue
        by_block = sorted(cls_hits)
        if [b for b, _ in by_block] != [0, 1, 2]:
            continue
        i, j, k = (c for _, c in by_block)
        counts[i][j][k] += 1
    nz = len(z)
    mask = 0
    for i in range(4):
        for j in range(4):
            for k in range(4):
                denom = nz * sizes[0][i] * sizes[1][j] * sizes[2][k]
                if denom and Fraction(counts[i][j][k], denom) >= 2 * eta:
                    mask |= 1 << bit_index(i, j, k)
    return mask
