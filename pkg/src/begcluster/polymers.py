"""Polymer activities and the abstract polymer-gas partition function.

A polymer is a set of at least two sites. Its activity is

    xi(R) = alpha^|R| * sum over sigma in {+-1}^R of
            sum over connected graphs g on R of prod_{e in g} F_e(sigma)

with F_e = exp(beta*(s_u s_v + y)) - 1 on nearest-neighbour edges and 0
elsewhere. Because F depends on sigma only through whether the two spins
agree, the double sum collapses to a parameter-free table counting
(agreeing edges, disagreeing edges) pairs, computed once per polymer shape.
"""

from __future__ import annotations

import itertools
import math
import threading
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import DomainError, ResourceError
from .lattice import ModelParams, SiteSet, SpinConfiguration, brute_force_log_partition
from .region import alpha

GRAPH_SUM_CAP = 6
ACTIVITY_CAP = 6
GRAND_PARTITION_CAP = 9
# bound on 2^(#edges) subsets enumerated for one shape
_MAX_SHAPE_EDGES = 16


class Polymer:
    """A finite set of at least two sites of Z^d."""

    __slots__ = ("cells",)

    def __init__(self, cells: SiteSet | list):
        cells = cells if isinstance(cells, SiteSet) else SiteSet(cells)
        if len(cells) < 2:
            raise DomainError(f"a polymer needs at least 2 cells, got {len(cells)}")
        self.cells = cells

    def __len__(self) -> int:
        return len(self.cells)

    def __repr__(self) -> str:
        return f"Polymer({list(self.cells.sites)!r})"


def _cells(R: Polymer | SiteSet) -> SiteSet:
    if isinstance(R, Polymer):
        return R.cells
    if len(R) < 2:
        raise DomainError(f"a polymer needs at least 2 cells, got {len(R)}")
    return R


def canonical_shape(sites) -> tuple[tuple[int, ...], ...]:
    """Sorted cells translated so that the lexicographically least one is the origin."""
    pts = sorted(tuple(s) for s in sites)
    base = pts[0]
    return tuple(tuple(a - b for a, b in zip(p, base)) for p in pts)


def _spans_connected(n: int, edges: list[tuple[int, int]]) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    components = n
    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            components -= 1
    return components == 1


def _connected_subgraphs(n: int, edges: list[tuple[int, int]]):
    """Bitmasks over ``edges`` whose subgraph is connected and spans all n vertices."""
    m = len(edges)
    out = []
    for mask in range(1 << m):
        if bin(mask).count("1") < n - 1:
            continue
        chosen = [edges[k] for k in range(m) if mask >> k & 1]
        if _spans_connected(n, chosen):
            out.append(mask)
    return out


def connected_graph_sum(
    R: Polymer | SiteSet, cfg: SpinConfiguration | Mapping, p: ModelParams, cap: int = GRAPH_SUM_CAP
) -> float:
    """Sum over connected graphs g on R of prod_{edges} (exp(beta*(s s' + y s^2 s'^2)*adj) - 1).

    Every pair of non-adjacent cells contributes a zero edge factor, so only
    subsets of the nearest-neighbour edges are visited.
    """
    cells = _cells(R)
    if len(cells) > cap:
        raise ResourceError(f"|R| = {len(cells)} exceeds the graph-sum cap {cap}")
    cfg = cfg if isinstance(cfg, SpinConfiguration) else SpinConfiguration(cfg)
    s = cfg.values_for(cells)
    edges = cells.edges()
    factor = [math.expm1(p.beta * (s[i] * s[j] + p.y * s[i] ** 2 * s[j] ** 2)) for i, j in edges]
    total = 0.0
    for mask in _connected_subgraphs(len(cells), edges):
        w = 1.0
        for k in range(len(edges)):
            if mask >> k & 1:
                w *= factor[k]
        total += w
    return total


def connected_graph_sum_recursive(R: Polymer | SiteSet, cfg: SpinConfiguration | Mapping, p: ModelParams) -> float:
    """Same quantity as :func:`connected_graph_sum`, by inclusion-exclusion over vertex subsets.

    With W(S) = prod over pairs in S of (1 + F) (the sum over all graphs on S),
    the connected part satisfies C(S) = W(S) - sum_{v0 in T < S} C(T) W(S \\ T)
    where v0 is the first vertex of S.
    """
    cells = _cells(R)
    cfg = cfg if isinstance(cfg, SpinConfiguration) else SpinConfiguration(cfg)
    s = cfg.values_for(cells)
    n = len(cells)
    log_w = {}
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        log_w[mask] = sum(
            p.beta * (s[i] * s[j] + p.y * s[i] ** 2 * s[j] ** 2)
            for i, j in itertools.combinations(members, 2)
            if cells.adjacent(i, j)
        )
    conn: dict[int, float] = {}
    for mask in sorted(log_w, key=lambda m: bin(m).count("1")):
        low = mask & -mask
        value = math.exp(log_w[mask])
        rest = mask ^ low
        sub = rest
        # proper subsets T of mask that contain the lowest vertex: T = low | sub, sub < rest
        while True:
            sub = (sub - 1) & rest
            if sub == rest:
                break
            t = low | sub
            value -= conn[t] * math.exp(log_w[mask ^ t])
            if sub == 0:
                break
        conn[mask] = value
    return conn[(1 << n) - 1]


_shape_lock = threading.Lock()


@lru_cache(maxsize=None)
def _shape_table(shape: tuple[tuple[int, ...], ...]) -> np.ndarray:
    """H[a, b] = number of (sigma in {+-1}^R, connected spanning g) with a agreeing, b disagreeing edges."""
    cells = SiteSet(shape)
    n = len(cells)
    edges = cells.edges()
    m = len(edges)
    if m > _MAX_SHAPE_EDGES:
        raise ResourceError(f"shape with {m} nearest-neighbour edges is too large to tabulate")
    table = np.zeros((m + 1, m + 1), dtype=np.int64)
    masks = _connected_subgraphs(n, edges)
    if not masks:
        return table
    incidence = np.array([[mask >> k & 1 for k in range(m)] for mask in masks], dtype=np.int64)
    spins = 1 - 2 * ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1)
    agree = np.stack([(spins[:, i] == spins[:, j]) for i, j in edges], axis=1).astype(np.int64)
    n_agree = incidence @ agree.T
    n_edges = incidence.sum(axis=1)[:, None]
    np.add.at(table, (n_agree, n_edges - n_agree), 1)
    return table


def _spin_graph_sum(cells: SiteSet, p: ModelParams) -> float:
    shape = canonical_shape(cells)
    with _shape_lock:
        table = _shape_table(shape)
    f_agree = math.expm1(p.beta * (1 + p.y))
    f_disagree = math.expm1(p.beta * (p.y - 1))
    total = 0.0
    a_idx, b_idx = np.nonzero(table)
    for a, b in zip(a_idx, b_idx):
        total += float(table[a, b]) * f_agree ** int(a) * f_disagree ** int(b)
    return total


def activity(R: Polymer | SiteSet, p: ModelParams, cap: int = ACTIVITY_CAP) -> float:
    """Polymer activity xi(R); zero-spin configurations contribute nothing and are skipped."""
    cells = _cells(R)
    if len(cells) > cap:
        raise ResourceError(f"|R| = {len(cells)} exceeds the activity cap {cap}")
    if p.beta == 0:
        return 0.0
    return alpha(p.x, p.beta, p.d) ** len(cells) * _spin_graph_sum(cells, p)


def activity_direct(R: Polymer | SiteSet, p: ModelParams, *, flip_symmetry: bool = False) -> float:
    """xi(R) by summing :func:`connected_graph_sum` over every +-1 configuration.

    With ``flip_symmetry`` only configurations whose first spin is +1 are
    visited and the result doubled.
    """
    cells = _cells(R)
    n = len(cells)
    firsts = (1,) if flip_symmetry else (1, -1)
    total = 0.0
    for first in firsts:
        for rest in itertools.product((1, -1), repeat=n - 1):
            cfg = SpinConfiguration.from_values(cells, (first, *rest))
            total += connected_graph_sum(cells, cfg, p, cap=n)
    if flip_symmetry:
        total *= 2
    return alpha(p.x, p.beta, p.d) ** n * total


def grand_partition(sites: SiteSet, p: ModelParams, cap: int = GRAND_PARTITION_CAP) -> float:
    """Xi = 1 + sum over nonempty families of disjoint polymers in ``sites`` of prod xi.

    Families are generated by deciding the fate of the lowest-indexed
    uncovered site: it stays a singleton or it is the first site of a polymer
    drawn from the uncovered sites. Each family is reached exactly once; the
    recursion is memoised on the set of uncovered sites.
    """
    n = len(sites)
    if n > cap:
        raise ResourceError(f"{n} sites exceed the grand-partition cap {cap}")
    xi: dict[int, float] = {}
    for mask in range(1, 1 << n):
        if bin(mask).count("1") >= 2:
            members = SiteSet(sites.sites[i] for i in range(n) if mask >> i & 1)
            xi[mask] = activity(members, p, cap=n)

    memo = {0: 1.0}

    def families(uncovered: int) -> float:
        if uncovered in memo:
            return memo[uncovered]
        low = uncovered & -uncovered
        rest = uncovered ^ low
        total = families(rest)
        sub = rest
        while sub:
            w = xi[low | sub]
            if w != 0.0:
                total += w * families(rest ^ sub)
            sub = (sub - 1) & rest
        memo[uncovered] = total
        return total

    return families((1 << n) - 1)


def factorization_residual(sites: SiteSet, p: ModelParams) -> float:
    """|log Z - (|sites| log(1 + 2 e^{2 d beta x}) + log Xi)|, both sides computed independently."""
    log_z = brute_force_log_partition(sites, p)
    t = 2 * p.d * p.beta * p.x
    # log(1 + 2 e^t), stable for large |t|
    single = math.log1p(2 * math.exp(t)) if t < 0 else t + math.log(math.exp(-t) + 2)
    xi = grand_partition(sites, p)
    if xi <= 0:
        return math.inf
    return abs(log_z - (len(sites) * single + math.log(xi)))
