"""Blossom matcher vs brute force and networkx.

The brute-force oracle enumerates all (n-1)!! pairings, so any structural
bug in the blossom bookkeeping shows up as a wrong total on some random
instance; small complete graphs with tiny weight ranges force ties and
blossom churn.
"""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from qrepnet.matching import matching_total, min_weight_perfect_matching


def brute_force_total(w: np.ndarray) -> int:
    n = len(w)

    def rec(todo: tuple[int, ...]) -> int:
        if not todo:
            return 0
        first, rest = todo[0], todo[1:]
        best = None
        for idx, partner in enumerate(rest):
            sub = rec(rest[:idx] + rest[idx + 1 :])
            cost = int(w[first, partner]) + sub
            if best is None or cost < best:
                best = cost
        return best

    return rec(tuple(range(n)))


def random_symmetric(rng: np.random.Generator, n: int, high: int) -> np.ndarray:
    a = rng.integers(0, high, size=(n, n))
    w = np.triu(a, 1)
    w = w + w.T
    return w


def assert_valid_pairing(pairs, n):
    seen = sorted(itertools.chain.from_iterable(pairs))
    assert seen == list(range(n))
    assert all(i < j for i, j in pairs)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
@pytest.mark.parametrize("high", [3, 8, 1000])
def test_matches_brute_force(n, high):
    rng = np.random.default_rng(1000 * n + high)
    for _ in range(40 if n <= 8 else 15):
        w = random_symmetric(rng, n, high)
        pairs = min_weight_perfect_matching(w)
        assert_valid_pairing(pairs, n)
        assert matching_total(w, pairs) == brute_force_total(w)


def test_equal_weights_everywhere():
    w = np.ones((8, 8), dtype=int) - np.eye(8, dtype=int)
    pairs = min_weight_perfect_matching(w)
    assert_valid_pairing(pairs, 8)
    assert matching_total(w, pairs) == 4


def test_zero_weights_allowed():
    w = np.zeros((6, 6), dtype=int)
    pairs = min_weight_perfect_matching(w)
    assert_valid_pairing(pairs, 6)


def test_structured_instance_with_forced_blossom():
    # a 5-cycle of cheap edges plus one far vertex: classic blossom shape
    n = 6
    big = 100
    w = np.full((n, n), big, dtype=int)
    np.fill_diagonal(w, 0)
    cycle = [0, 1, 2, 3, 4]
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        w[a, b] = w[b, a] = 1
    w[4, 5] = w[5, 4] = 2
    pairs = min_weight_perfect_matching(w)
    assert matching_total(w, pairs) == brute_force_total(w)


def test_matches_networkx_on_medium_instances():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(7)
    for n in (20, 34, 50):
        w = random_symmetric(rng, n, 60)
        pairs = min_weight_perfect_matching(w)
        assert_valid_pairing(pairs, n)
        g = nx.Graph()
        ceiling = int(w.max()) + 1
        for i in range(n):
            for j in range(i + 1, n):
                g.add_edge(i, j, weight=ceiling - int(w[i, j]))
        ref = nx.max_weight_matching(g, maxcardinality=True)
        ref_total = sum(int(w[i, j]) for i, j in ref)
        assert matching_total(w, pairs) == ref_total


def test_metric_taxicab_instances():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(11)
    period = 14
    for n in (12, 24, 40):
        pts = rng.integers(0, period, size=(n, 3))
        diff = np.abs(pts[:, None, :] - pts[None, :, :])
        diff = np.minimum(diff, period - diff)
        w = diff.sum(axis=2)
        pairs = min_weight_perfect_matching(w)
        assert_valid_pairing(pairs, n)
        g = nx.Graph()
        ceiling = int(w.max()) + 1
        for i in range(n):
            for j in range(i + 1, n):
                g.add_edge(i, j, weight=ceiling - int(w[i, j]))
        ref = nx.max_weight_matching(g, maxcardinality=True)
        ref_total = sum(int(w[i, j]) for i, j in ref)
        assert matching_total(w, pairs) == ref_total


def test_deterministic():
    rng = np.random.default_rng(3)
    w = random_symmetric(rng, 30, 9)
    first = min_weight_perfect_matching(w)
    for _ in range(3):
        assert min_weight_perfect_matching(w) == first


def test_input_validation():
    with pytest.raises(ValueError):
        min_weight_perfect_matching(np.zeros((3, 3), dtype=int))
    with pytest.raises(ValueError):
        min_weight_perfect_matching(np.zeros((2, 3), dtype=int))
    with pytest.raises(ValueError):
        min_weight_perfect_matching(np.array([[0, -1], [-1, 0]]))
    with pytest.raises(ValueError):
        min_weight_perfect_matching(np.array([[0.0, 0.5], [0.5, 0.0]]))
    assert min_weight_perfect_matching(np.zeros((0, 0), dtype=int)) == []
