import itertools
import math
from collections import Counter

import numpy as np
import pytest

from begcluster.errors import DomainError, ResourceError
from begcluster.lattice import ModelParams, SiteSet, SpinConfiguration
from begcluster.polycubes import naive_fixed_polycube_counts, rooted_animals
from begcluster.trees import (
    LabeledTree,
    c_n,
    degree_sequence_tree_count,
    embedding_weight,
    embedding_weight_bound,
    enumerate_bounded_trees,
    prufer_decode,
    py_inequality_check,
    random_py_instances,
    simplified_weight_bound,
)

PATH5 = LabeledTree.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
STAR5 = LabeledTree.from_edges(5, [(1, 2), (1, 3), (1, 4), (1, 5)])
EDGE = LabeledTree.from_edges(2, [(1, 2)])


def _brute_trees(n):
    """All (n-1)-edge subsets of K_n that are acyclic."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    out = set()
    for combo in itertools.combinations(pairs, n - 1):
        try:
            out.add(LabeledTree.from_edges(n, combo))
        except DomainError:
            pass
    return out


def test_tree_validation():
    with pytest.raises(DomainError):
        LabeledTree.from_edges(3, [(1, 2), (2, 1)])
    with pytest.raises(DomainError):
        LabeledTree.from_edges(4, [(1, 2), (3, 4), (4, 3)])
    assert sum(PATH5.degrees) == 8


def test_prufer_decode_known():
    assert prufer_decode((4, 4, 4), 5) == LabeledTree.from_edges(5, [(1, 4), (2, 4), (3, 4), (4, 5)])


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_is_all_trees(n):
    trees = enumerate_bounded_trees(n, n)
    assert len(trees) == len(set(trees)) == max(1, n ** (n - 2))
    if n >= 2:
        assert set(trees) == _brute_trees(n)


def test_enumerate_bounded_examples():
    assert len(enumerate_bounded_trees(3, 4)) == 3
    assert len(enumerate_bounded_trees(5, 4)) == 125
    paths = enumerate_bounded_trees(4, 2)
    assert len(paths) == 12
    assert all(max(t.degrees) <= 2 for t in paths)
    with pytest.raises(ResourceError):
        enumerate_bounded_trees(10, 4)


def test_enumeration_order_deterministic():
    assert enumerate_bounded_trees(6, 3) == enumerate_bounded_trees(6, 3)


def test_degree_sequence_count_examples():
    assert degree_sequence_tree_count((3, 1, 1, 1)) == 1
    assert degree_sequence_tree_count((1, 2, 2, 1)) == 2
    assert degree_sequence_tree_count((1, 1)) == 1
    listed = [t for t in _brute_trees(4) if t.degrees == (1, 2, 2, 1)]
    assert len(listed) == 2
    for bad in [(2, 2, 2, 2), (0, 2, 2, 2), (3,), (1, 1, 1)]:
        with pytest.raises(DomainError):
            degree_sequence_tree_count(bad)


def _degree_sequences(n, maxdeg):
    for ds in itertools.product(range(1, maxdeg + 1), repeat=n):
        if sum(ds) == 2 * n - 2:
            yield ds


@pytest.mark.parametrize("n", range(2, 9))
def test_cayley_partition(n):
    assert sum(degree_sequence_tree_count(ds) for ds in _degree_sequences(n, n - 1)) == n ** (n - 2)


@pytest.mark.parametrize("n,d", [(5, 2), (6, 2), (7, 2), (6, 1), (7, 3)])
def test_enumeration_by_degree_sequence(n, d):
    got = Counter(t.degrees for t in enumerate_bounded_trees(n, 2 * d))
    expected = {ds: degree_sequence_tree_count(ds) for ds in _degree_sequences(n, min(2 * d, n - 1))}
    assert got == expected


def _saw_count(steps, d=2):
    units = [tuple(s if i == k else 0 for i in range(d)) for k in range(d) for s in (1, -1)]

    def walk(pos, visited, left):
        if left == 0:
            return 1
        total = 0
        for u in units:
            q = tuple(a + b for a, b in zip(pos, u))
            if q not in visited:
                total += walk(q, visited | {q}, left - 1)
        return total

    origin = (0,) * d
    return walk(origin, {origin}, steps)


def test_embedding_weight_examples():
    assert embedding_weight(EDGE, 2) == 4
    assert embedding_weight(PATH5, 2) == 100 == _saw_count(4)
    assert embedding_weight(STAR5, 2) == 24
    assert embedding_weight(LabeledTree(1, ()), 2) == 1


def test_path_embeddings_are_self_avoiding_walks():
    for n in range(2, 8):
        path = LabeledTree.from_edges(n, [(i, i + 1) for i in range(1, n)])
        assert embedding_weight(path, 2) == _saw_count(n - 1)
    path = LabeledTree.from_edges(5, [(i, i + 1) for i in range(1, 5)])
    assert embedding_weight(path, 3) == _saw_count(4, d=3)


def test_embedding_weight_root_in_middle():
    # path 2-1-3 rooted at its centre: 4 * 3 ordered neighbour pairs
    assert embedding_weight(LabeledTree.from_edges(3, [(1, 2), (1, 3)]), 2) == 12


def test_embedding_weight_relabelling_invariant():
    perm = {1: 1, 2: 4, 3: 2, 4: 5, 5: 3}
    t = LabeledTree.from_edges(5, [(1, 2), (2, 3), (2, 4), (4, 5)])
    relabelled = LabeledTree.from_edges(5, [(perm[u], perm[v]) for u, v in t.edges])
    assert embedding_weight(t, 2) == embedding_weight(relabelled, 2)


def test_embedding_cap():
    with pytest.raises(ResourceError):
        embedding_weight(LabeledTree.from_edges(9, [(i, i + 1) for i in range(1, 9)]), 2)


def test_weight_bound_examples():
    assert embedding_weight_bound(EDGE.degrees, 0, 2) == 4
    assert embedding_weight_bound(PATH5.degrees, 0, 2) == 108
    assert embedding_weight_bound(STAR5.degrees, 0, 2) == 24
    with pytest.raises(DomainError):
        embedding_weight_bound((5, 1, 1, 1, 1, 1), 0, 2)


def test_simplified_bound_examples():
    assert simplified_weight_bound(2, 2) == 4
    assert simplified_weight_bound(5, 2) == 108
    assert simplified_weight_bound(3, 3) == 30
    assert all(embedding_weight_bound(t.degrees, 0, 3) <= 30 for t in enumerate_bounded_trees(3, 6))
    with pytest.raises(DomainError):
        simplified_weight_bound(1, 2)


@pytest.mark.parametrize("d", [2, 3])
def test_weight_chain(d):
    for n in range(2, 7):
        cap = simplified_weight_bound(n, d)
        for t in enumerate_bounded_trees(n, 2 * d):
            w = embedding_weight(t, d)
            b = embedding_weight_bound(t.degrees, 0, d)
            assert w <= b <= cap


def _spanning_tree_count(cells):
    cells = sorted(cells)
    n = len(cells)
    if n == 1:
        return 1
    idx = {c: i for i, c in enumerate(cells)}
    lap = np.zeros((n, n))
    for c in cells:
        for k in range(len(c)):
            for s in (1, -1):
                q = c[:k] + (c[k] + s,) + c[k + 1 :]
                if q in idx:
                    lap[idx[c], idx[q]] -= 1
                    lap[idx[c], idx[c]] += 1
    return round(np.linalg.det(lap[1:, 1:]))


@pytest.mark.parametrize("d,nmax", [(2, 6), (3, 5)])
def test_c_n_equals_rooted_spanning_tree_count(d, nmax):
    for n in range(1, nmax + 1):
        expected = sum(_spanning_tree_count(a) for a in rooted_animals(d, n))
        assert c_n(n, d).exact == expected


def test_c_n_examples():
    assert c_n(1, 2).exact == 1 and c_n(1, 2).bound == 1
    assert c_n(2, 2).exact == 4 and c_n(2, 2).bound == 4
    r = c_n(3, 2)
    assert r.exact == 18 and r.bound == 24
    # every tromino has exactly one spanning tree
    assert r.exact == 3 * naive_fixed_polycube_counts(2, 3)[-1]


@pytest.mark.parametrize("d", [2, 3])
def test_c_n_below_bound(d):
    for n in range(1, 8):
        r = c_n(n, d)
        assert isinstance(r.exact, int)
        assert r.exact <= r.bound
        if n >= 2:
            assert r.bound == pytest.approx(n ** (n - 2) / math.factorial(n - 1) * (2 * d) ** (n - 1))


def test_py_examples():
    pair = SiteSet([(0, 0), (1, 0)])
    res = py_inequality_check(pair, {(0, 0): 1, (1, 0): 1}, ModelParams(2, -1, 0, 0.0))
    assert res.lhs == 0 and res.rhs == 0 and res.ok
    res = py_inequality_check(pair, {(0, 0): 1, (1, 0): 1}, ModelParams(2, -1, 0, 1.0))
    assert res.lhs == pytest.approx(math.e - 1)
    assert res.rhs == pytest.approx(math.exp(4) * (1 - math.exp(-1)))
    assert res.ok
    with pytest.raises(DomainError):
        py_inequality_check(SiteSet.box(3, 2), {s: 1 for s in SiteSet.box(3, 2)}, ModelParams(2, -1, 0, 1))


def test_py_random_instances():
    for R, cfg, p in random_py_instances(200, seed=2024):
        assert R.is_connected() and 2 <= len(R) <= 5
        res = py_inequality_check(R, cfg, p)
        assert res.ok, (R, cfg, p, res)
        assert res.lhs == pytest.approx(res.lhs_recursive, rel=1e-10, abs=1e-10)


def test_py_random_instances_reproducible():
    a = [(R.sites, tuple(cfg.values_for(R)), p) for R, cfg, p in random_py_instances(20, seed=5)]
    b = [(R.sites, tuple(cfg.values_for(R)), p) for R, cfg, p in random_py_instances(20, seed=5)]
    assert a == b


def test_py_with_zero_spins_still_holds():
    # stability holds for zero spins as well; the bound is checked on all of them
    R = SiteSet([(0, 0), (1, 0), (1, 1)])
    for values in itertools.product((-1, 0, 1), repeat=3):
        for y in (-2.0, -0.5, 0.7):
            res = py_inequality_check(R, SpinConfiguration.from_values(R, values), ModelParams(2, -1, y, 1.3))
            assert res.ok
