"""Labelled trees, lattice embedding weights and the tree-graph inequality check."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .lattice import ModelParams, SiteSet, SpinConfiguration, pair_potential
from .polymers import connected_graph_sum, connected_graph_sum_recursive
from .region import stability_constant

TREE_CAP = 9
EMBEDDING_CAP = 8
PY_CAP = 5


@dataclass(frozen=True)
class LabeledTree:
    """Tree on vertices 1..n given by its edge list (pairs sorted, list sorted)."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError("a tree needs at least one vertex")
        if len(self.edges) != self.n - 1:
            raise DomainError(f"a tree on {self.n} vertices has {self.n - 1} edges, got {len(self.edges)}")
        parent = list(range(self.n + 1))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n) or u == v:
                raise DomainError(f"bad edge {(u, v)}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise DomainError("edge list contains a cycle")
            parent[ru] = rv

    @classmethod
    def from_edges(cls, n: int, edges) -> LabeledTree:
        return cls(n, tuple(sorted(tuple(sorted(e)) for e in edges)))

    @property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return tuple(deg)

    def neighbours(self) -> dict[int, list[int]]:
        nb: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return nb


def prufer_decode(seq: Sequence[int], n: int) -> LabeledTree:
    """Tree on 1..n whose Prufer sequence is ``seq`` (length n - 2)."""
    if n == 1:
        return LabeledTree(1, ())
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return LabeledTree.from_edges(n, edges)


def _bounded_sequences(n: int, maxdeg: int) -> Iterator[tuple[int, ...]]:
    """Prufer sequences in lexicographic order with each vertex used at most maxdeg - 1 times."""
    length = n - 2
    budget = [maxdeg - 1] * (n + 1)
    seq: list[int] = []

    def rec():
        if len(seq) == length:
            yield tuple(seq)
            return
        for v in range(1, n + 1):
            if budget[v] > 0:
                budget[v] -= 1
                seq.append(v)
                yield from rec()
                seq.pop()
                budget[v] += 1

    yield from rec()


def enumerate_bounded_trees(n: int, maxdeg: int, cap: int = TREE_CAP) -> list[LabeledTree]:
    """All labelled trees on 1..n with every degree <= maxdeg, in Prufer-lexicographic order."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > cap:
        raise ResourceError(f"n = {n} exceeds the tree enumeration cap {cap}")
    if n == 1:
        return [LabeledTree(1, ())]
    if maxdeg < 1:
        return []
    return [prufer_decode(seq, n) for seq in _bounded_sequences(n, maxdeg)]


def degree_sequence_tree_count(degrees: Sequence[int]) -> int:
    """Number of labelled trees with vertex i of degree degrees[i]: (n-2)!/prod (d_i - 1)!."""
    n = len(degrees)
    if n < 2 or any(int(k) != k or k < 1 for k in degrees) or sum(degrees) != 2 * n - 2:
        raise DomainError(f"{tuple(degrees)} is not the degree sequence of a tree")
    count = math.factorial(n - 2)
    for k in degrees:
        count //= math.factorial(k - 1)
    return count


def _rooted_form(nb: Mapping[int, list[int]], v: int, parent: int) -> tuple:
    return tuple(sorted(_rooted_form(nb, c, v) for c in nb[v] if c != parent))


def _unit_vectors(d: int) -> list[tuple[int, ...]]:
    out = []
    for i in range(d):
        for s in (1, -1):
            e = [0] * d
            e[i] = s
            out.append(tuple(e))
    return out


@lru_cache(maxsize=None)
def _count_embeddings(form: tuple, d: int) -> int:
    # parent-pointer list in preorder from the nested rooted form
    parents: list[int] = []

    def flatten(node: tuple, parent: int) -> None:
        me = len(parents)
        parents.append(parent)
        for child in node:
            flatten(child, me)

    flatten(form, -1)
    steps = _unit_vectors(d)
    origin = (0,) * d
    pos: list[tuple[int, ...]] = [origin] * len(parents)
    used = {origin}
    n = len(parents)

    def place(i: int) -> int:
        if i == n:
            return 1
        base = pos[parents[i]]
        total = 0
        for e in steps:
            q = tuple(a + b for a, b in zip(base, e))
            if q not in used:
                used.add(q)
                pos[i] = q
                total += place(i + 1)
                used.remove(q)
        return total

    return place(1)


def embedding_weight(tree: LabeledTree, d: int, cap: int = EMBEDDING_CAP) -> int:
    """Number of injective maps of the tree into Z^d with vertex 1 at the origin and edges on lattice bonds."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if tree.n > cap:
        raise ResourceError(f"tree with {tree.n} vertices exceeds the embedding cap {cap}")
    return _count_embeddings(_rooted_form(tree.neighbours(), 1, 0), d)


def embedding_weight_bound(degrees: Sequence[int], root_index: int = 0, d: int = 2) -> int:
    """(2d)!/(2d - d_root)! * prod over the other vertices of (2d - 1)!/(2d - d_i)!."""
    two_d = 2 * d
    if any(k > two_d for k in degrees):
        raise DomainError(f"degree above 2d = {two_d} in {tuple(degrees)}")
    if any(k < 0 for k in degrees):
        raise DomainError("negative degree")
    bound = math.perm(two_d, degrees[root_index])
    for i, k in enumerate(degrees):
        if i != root_index:
            bound *= math.perm(two_d - 1, k - 1) if k >= 1 else 1
    return bound


def simplified_weight_bound(n: int, d: int) -> int:
    """2d (2d - 1)^(n - 2), valid for every bounded-degree tree on n >= 2 vertices."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return 2 * d * (2 * d - 1) ** (n - 2)


@dataclass(frozen=True)
class CnResult:
    exact: int
    bound: Fraction


def c_n(n: int, d: int) -> CnResult:
    """Origin-rooted (set, bounded-degree spanning tree) count and its Cayley bound."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    bound = Fraction(n ** (n - 2) if n >= 2 else 1) / math.factorial(n - 1) * (2 * d) ** (n - 1)
    if n == 1:
        return CnResult(exact=1, bound=bound)
    total = sum(embedding_weight(t, d) for t in enumerate_bounded_trees(n, 2 * d))
    exact, rem = divmod(total, math.factorial(n - 1))
    if rem:
        raise ArithmeticError(f"sum of embedding weights {total} not divisible by {n - 1}!")
    return CnResult(exact=exact, bound=bound)


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    ok: bool
    lhs_recursive: float


def py_inequality_check(R: SiteSet, cfg: SpinConfiguration | Mapping, p: ModelParams, cap: int = PY_CAP) -> InequalityCheck:
    """Both sides of the tree-graph bound on the connected-graph sum of R.

    rhs = e^{beta |R| h(y)} * sum over all trees on R of prod_{edges} (1 - e^{-beta |V|}).
    """
    n = len(R)
    if not 2 <= n <= cap:
        raise DomainError(f"need 2 <= |R| <= {cap}, got {n}")
    cfg = cfg if isinstance(cfg, SpinConfiguration) else SpinConfiguration(cfg)
    s = cfg.values_for(R)
    lhs = abs(connected_graph_sum(R, cfg, p, cap=n))
    lhs_rec = abs(connected_graph_sum_recursive(R, cfg, p))
    one_minus = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = pair_potential(s[i], s[j], R.adjacent(i, j), p.y)
            one_minus[(i + 1, j + 1)] = -math.expm1(-p.beta * abs(v))
    tree_sum = 0.0
    for tree in enumerate_bounded_trees(n, n - 1):
        w = 1.0
        for e in tree.edges:
            w *= one_minus[e]
        tree_sum += w
    rhs = math.exp(p.beta * n * stability_constant(p.y, p.d)) * tree_sum
    return InequalityCheck(lhs=lhs, rhs=rhs, ok=lhs <= rhs + 1e-9, lhs_recursive=lhs_rec)


def random_animal(size: int, rng: np.random.Generator, d: int = 2) -> SiteSet:
    """Connected set grown from the origin by attaching uniformly chosen boundary cells."""
    cells = [(0,) * d]
    occupied = set(cells)
    steps = _unit_vectors(d)
    while len(cells) < size:
        frontier = sorted(
            {tuple(a + b for a, b in zip(c, e)) for c in cells for e in steps} - occupied
        )
        pick = frontier[int(rng.integers(len(frontier)))]
        cells.append(pick)
        occupied.add(pick)
    return SiteSet(cells)


def random_py_instances(count: int, seed: int, d: int = 2):
    """Seeded (R, cfg, params) triples: connected R with 2..5 cells, +-1 spins, beta in (0, 2], y in [-2, 1]."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        size = int(rng.integers(2, PY_CAP + 1))
        R = random_animal(size, rng, d)
        spins = [int(v) for v in rng.choice((-1, 1), size=size)]
        beta = float(2.0 * (1.0 - rng.random()))
        y = float(rng.uniform(-2.0, 1.0))
        x = float(-rng.uniform(0.1, 5.0))
        yield R, SpinConfiguration.from_values(R, spins), ModelParams(d=d, x=x, y=y, beta=beta)
