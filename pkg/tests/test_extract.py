"""Dense-incidence tools and complete-multipartite extraction."""

import random
from fractions import Fraction
from itertools import combinations, product

import pytest

from hypermatch.core import Hypergraph
from hypermatch.errors import EmptyInput, InsufficientDensity, InvalidPartition
from hypermatch.extract import (
    Incidence,
    MultipartiteWitness,
    common_neighborhood_bucket,
    dense_side,
    extract_one_three,
    extract_partite_volume,
    extract_two_two,
    find_complete_r_partite,
)


def plant_one_three(seed: int, n: int = 16, size: int = 2, noise: float = 0.5):
    """Instance with a planted complete (A-class, 3 B-classes) block."""
    rng = random.Random(seed)
    a = list(range(4))
    b = list(range(4, n))
    xs = rng.sample(a, size)
    rest = rng.sample(b, 3 * size)
    classes = [sorted(xs)] + [sorted(rest[i::3]) for i in range(3)]
    edges = {tuple(sorted(t)) for t in product(*classes)}
    for e in combinations(range(n), 4):
        if sum(1 for v in e if v in a) == 1 and rng.random() < noise:
            edges.add(e)
    return Hypergraph(n, 4, sorted(edges)), a, b, classes


class TestIncidence:
    def test_density(self):
        inc = Incidence((0, 1), ("x", "y"), (0b11, 0b01))
        assert inc.density() == Fraction(3, 4)

    def test_empty_density(self):
        assert Incidence((), (), ()).density() == 0


class TestDenseSide:
    def test_keeps_high_degree_rows(self):
        inc = Incidence((0, 1, 2, 3), ("a", "b"), (0b1111, 0b0001))
        assert dense_side(inc, Fraction(5, 16)) == ["a"]

    def test_raises_below_threshold(self):
        inc = Incidence((0, 1, 2, 3), ("a",), (0b0001,))
        with pytest.raises(InsufficientDensity):
            dense_side(inc, Fraction(1, 4))


class TestBucket:
    def test_most_populous_bucket(self):
        inc = Incidence((0, 1), ("a", "b", "c"), (0b11, 0b11, 0b01))
        shared, items = common_neighborhood_bucket(inc)
        assert shared == [0, 1] and items == ["a", "b"]

    def test_tie_breaks_to_smallest_mask(self):
        inc = Incidence((0, 1), ("a", "b"), (0b10, 0b01))
        shared, items = common_neighborhood_bucket(inc)
        assert shared == [0] and items == ["b"]

    def test_empty(self):
        with pytest.raises(EmptyInput):
            common_neighborhood_bucket(Incidence((0,), (), ()))


class TestCompleteBlockSearch:
    def test_planted_block_recovered(self):
        rng = random.Random(1)
        classes = [[0, 1], [2, 3], [4, 5], [6, 7]]
        edges = {tuple(sorted(t)) for t in product(*classes)}
        for e in combinations(range(12), 4):
            if rng.random() < 0.1:
                edges.add(e)
        h = Hypergraph(12, 4, sorted(edges))
        w = find_complete_r_partite(h, 2)
        assert w is not None and w.verify_complete(h)

    def test_none_without_block(self):
        h = Hypergraph(8, 4, [(0, 1, 2, 3)])
        assert find_complete_r_partite(h, 2) is None

    def test_allowed_restriction(self):
        h = Hypergraph(8, 4, [(0, 1, 2, 3), (4, 5, 6, 7)])
        w = find_complete_r_partite(h, 1, allowed=[4, 5, 6, 7])
        assert w is not None and w.vertices() == frozenset([4, 5, 6, 7])

    def test_size_validation(self):
        h = Hypergraph(8, 4, [(0, 1, 2, 3)])
        with pytest.raises(ValueError):
            find_complete_r_partite(h, 0)


class TestWitness:
    def test_verify_rejects_incomplete(self):
        h = Hypergraph(8, 4, [(0, 1, 2, 3)])
        w = MultipartiteWitness(((0,), (1,), (2,), (4,)), ("V",) * 4)
        assert not w.verify_complete(h)

    def test_verify_rejects_overlap(self):
        h = Hypergraph(8, 4, [(0, 1, 2, 3)])
        w = MultipartiteWitness(((0,), (0,), (2,), (3,)), ("V",) * 4)
        assert not w.verify_complete(h)


class TestOneThree:
    def test_planted_recovered(self):
        for seed in range(20):
            h, a, b, _ = plant_one_three(seed)
            w = extract_one_three(h, a, b, Fraction(1, 16), 2)
            assert w is not None and w.verify_complete(h)
            assert set(w.classes[0]) <= set(a)
            assert all(set(c) <= set(b) for c in w.classes[1:])

    def test_density_gate(self):
        h = Hypergraph(16, 4, [(0, 4, 5, 6)])
        with pytest.raises(InsufficientDensity):
            extract_one_three(h, range(4), range(4, 16), Fraction(1, 4), 1)

    def test_overlap_rejected(self):
        h = Hypergraph(16, 4, [(0, 4, 5, 6)])
        with pytest.raises(InvalidPartition):
            extract_one_three(h, [0, 1], [1, 2, 3], Fraction(1, 4), 1)


class TestTwoTwo:
    def test_planted_recovered(self):
        rng = random.Random(3)
        a, b, z = [0, 1, 2], [3, 4, 5], list(range(6, 16))
        classes = [[0, 1], [3, 4], [6, 7], [8, 9]]
        edges = {tuple(sorted(t)) for t in product(*classes)}
        for e in combinations(range(16), 4):
            hits = (
                sum(1 for v in e if v in a),
                sum(1 for v in e if v in b),
                sum(1 for v in e if v in z),
            )
            if hits == (1, 1, 2) and rng.random() < 0.5:
                edges.add(e)
        h = Hypergraph(16, 4, sorted(edges))
        w = extract_two_two(h, a, b, z, Fraction(1, 16), 2)
        assert w is not None and w.verify_complete(h)
        assert set(w.classes[0]) <= set(a) and set(w.classes[1]) <= set(b)
        assert set(w.classes[2]) <= set(z) and set(w.classes[3]) <= set(z)

    def test_density_gate(self):
        h = Hypergraph(16, 4, [(0, 3, 6, 7)])
        with pytest.raises(InsufficientDensity):
            extract_two_two(h, [0, 1, 2], [3, 4, 5], range(6, 16), Fraction(1, 4), 1)


class TestPartiteVolume:
    def test_planted_recovered(self):
        rng = random.Random(4)
        a, b, c, z = [0, 1, 2], [3, 4, 5], [6, 7, 8], list(range(9, 16))
        classes = [[0, 1], [3, 4], [6, 7], [9, 10]]
        edges = {tuple(sorted(t)) for t in product(*classes)}
        for e in combinations(range(16), 4):
            hits = tuple(
                sum(1 for v in e if v in s) for s in (a, b, c, z)
            )
            if hits == (1, 1, 1, 1) and rng.random() < 0.5:
                edges.add(e)
        h = Hypergraph(16, 4, sorted(edges))
        w = extract_partite_volume(h, a, b, c, z, Fraction(1, 16), 2)
        assert w is not None and w.verify_complete(h)

    def test_density_gate(self):
        h = Hypergraph(16, 4, [(0, 3, 6, 9)])
        with pytest.raises(InsufficientDensity):
            extract_partite_volume(
                h, [0, 1, 2], [3, 4, 5], [6, 7, 8], range(9, 16), Fraction(1, 2), 1
            )
