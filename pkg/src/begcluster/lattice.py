"""Finite-volume BEG model: Hamiltonian, brute-force partition function, pair potential.

Spins take values in {-1, 0, +1}. Configurations of a site list are enumerated
as a base-3 odometer: the first site is the fastest digit and each digit runs
through the spin values in the order (-1, 0, +1).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DomainError, ResourceError

SPIN_VALUES = (-1, 0, 1)
DEFAULT_ENUMERATION_CAP = 16
# rows per numpy block during enumeration (3**10)
_CHUNK_DIGITS = 10

Site = tuple[int, ...]


@dataclass(frozen=True)
class ModelParams:
    """Dimension, couplings and inverse temperature of the model."""

    d: int
    x: float
    y: float
    beta: float

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.d!r}")
        if not self.beta >= 0:
            raise DomainError(f"beta must be >= 0, got {self.beta!r}")

    @property
    def in_disordered_region(self) -> bool:
        return in_disordered_region(self.x, self.y)


def in_disordered_region(x: float, y: float) -> bool:
    """True iff x < 0 and 1 + 2x + y < 0 (all-zero ground state)."""
    return x < 0 and 1 + 2 * x + y < 0


def is_adjacent(u: Sequence[int], v: Sequence[int]) -> bool:
    return sum(abs(a - b) for a, b in zip(u, v)) == 1


@dataclass(frozen=True)
class SiteSet:
    """Ordered collection of distinct points of Z^d."""

    sites: tuple[Site, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, sites: Iterable[Sequence[int]]):
        pts = tuple(tuple(int(c) for c in s) for s in sites)
        if pts:
            dim = len(pts[0])
            if dim == 0 or any(len(p) != dim for p in pts):
                raise DomainError("all sites must be integer vectors of one positive dimension")
        if len(set(pts)) != len(pts):
            raise DomainError("duplicate sites")
        object.__setattr__(self, "sites", pts)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(pts)})

    @classmethod
    def box(cls, *shape: int) -> SiteSet:
        """All sites of a box ``shape[0] x shape[1] x ...`` anchored at the origin."""
        if not shape or any(L < 1 for L in shape):
            raise DomainError(f"invalid box shape {shape!r}")
        # last coordinate slowest so that the listing is row-major in 2d
        return cls(tuple(reversed(p)) for p in itertools.product(*(range(L) for L in reversed(shape))))

    @classmethod
    def from_json(cls, text: str) -> SiteSet:
        return cls(json.loads(text))

    def to_json(self) -> str:
        return json.dumps([list(s) for s in self.sites])

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self) -> Iterator[Site]:
        return iter(self.sites)

    def __contains__(self, site: object) -> bool:
        return site in self._index

    @property
    def dim(self) -> int:
        return len(self.sites[0]) if self.sites else 0

    def index(self, site: Site) -> int:
        return self._index[site]

    def adjacent(self, i: int, j: int) -> bool:
        return is_adjacent(self.sites[i], self.sites[j])

    def edges(self) -> list[tuple[int, int]]:
        """Adjacent unordered index pairs (i < j)."""
        n = len(self.sites)
        return [(i, j) for i in range(n) for j in range(i + 1, n) if self.adjacent(i, j)]

    def translate(self, shift: Sequence[int]) -> SiteSet:
        return SiteSet(tuple(a + b for a, b in zip(s, shift)) for s in self.sites)

    def is_connected(self) -> bool:
        n = len(self.sites)
        if n == 0:
            return False
        nbrs: dict[int, list[int]] = {i: [] for i in range(n)}
        for i, j in self.edges():
            nbrs[i].append(j)
            nbrs[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            for j in nbrs[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n


class SpinConfiguration(Mapping):
    """Immutable assignment of spins in {-1, 0, +1} to sites."""

    __slots__ = ("_spins",)

    def __init__(self, spins: Mapping[Sequence[int], int]):
        clean = {}
        for site, s in spins.items():
            if s not in SPIN_VALUES:
                raise DomainError(f"spin {s!r} at {site!r} is not in {{-1, 0, 1}}")
            clean[tuple(site)] = int(s)
        self._spins = clean

    @classmethod
    def from_values(cls, sites: SiteSet, values: Sequence[int]) -> SpinConfiguration:
        if len(values) != len(sites):
            raise DomainError(f"{len(values)} spins for {len(sites)} sites")
        return cls(dict(zip(sites, values)))

    def __getitem__(self, site):
        return self._spins[tuple(site)]

    def __iter__(self):
        return iter(self._spins)

    def __len__(self) -> int:
        return len(self._spins)

    def __repr__(self) -> str:
        return f"SpinConfiguration({self._spins!r})"

    def values_for(self, sites: SiteSet) -> tuple[int, ...]:
        """Spins in the order of ``sites``; the domains must coincide exactly."""
        if len(self._spins) != len(sites) or any(s not in self._spins for s in sites):
            raise DomainError("configuration domain does not match the site set")
        return tuple(self._spins[s] for s in sites)


def pair_potential(sx: int, sy: int, adjacent: bool, y: float) -> float:
    """V = -(sx*sy + y) for nearest neighbours, 0 otherwise."""
    if sx not in SPIN_VALUES or sy not in SPIN_VALUES:
        raise DomainError("spins must be in {-1, 0, 1}")
    if not adjacent:
        return 0.0
    return -(sx * sy + y)


def hamiltonian(cfg: SpinConfiguration | Mapping, sites: SiteSet, p: ModelParams) -> float:
    cfg = cfg if isinstance(cfg, SpinConfiguration) else SpinConfiguration(cfg)
    s = cfg.values_for(sites)
    pair = sum(s[i] * s[j] + p.y * s[i] ** 2 * s[j] ** 2 for i, j in sites.edges())
    return -pair - 2 * p.d * p.x * sum(v * v for v in s)


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise ResourceError(f"{n} sites exceed the enumeration cap of {cap} (3^{n} configurations)")


def _config_blocks(n: int) -> Iterator[np.ndarray]:
    """Yield all 3^n configurations in odometer order as int8 blocks of shape (rows, n)."""
    if n == 0:
        yield np.zeros((1, 0), dtype=np.int8)
        return
    low = min(n, _CHUNK_DIGITS)
    codes = np.arange(3**low)
    digits = (codes[:, None] // 3 ** np.arange(low)) % 3
    low_block = (digits - 1).astype(np.int8)
    for high in itertools.product(SPIN_VALUES, repeat=n - low):
        # itertools varies the last element fastest; reverse so site `low` is fastest
        tail = np.broadcast_to(np.array(high[::-1], dtype=np.int8), (len(low_block), n - low))
        yield np.concatenate([low_block, tail], axis=1)


def _energies(block: np.ndarray, edges: list[tuple[int, int]], p: ModelParams) -> np.ndarray:
    s = block.astype(np.float64)
    sq = s * s
    e = -2.0 * p.d * p.x * sq.sum(axis=1)
    for i, j in edges:
        e -= s[:, i] * s[:, j] + p.y * sq[:, i] * sq[:, j]
    return e


def brute_force_log_partition(sites: SiteSet, p: ModelParams, cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """log Z by exhaustive enumeration of all 3^|sites| configurations."""
    _check_cap(len(sites), cap)
    if p.beta == 0:
        return len(sites) * math.log(3)
    edges = sites.edges()
    partial_max = []
    partial_sum = []
    for block in _config_blocks(len(sites)):
        w = -p.beta * _energies(block, edges, p)
        m = w.max()
        partial_max.append(m)
        partial_sum.append(np.exp(w - m).sum())
    m = max(partial_max)
    total = math.fsum(s * math.exp(pm - m) for pm, s in zip(partial_max, partial_sum))
    return m + math.log(total)


def stability_minimum(
    sites: SiteSet, y: float, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[float, SpinConfiguration]:
    """Minimum over all configurations of the pair-potential sum, and the first minimiser."""
    _check_cap(len(sites), cap)
    edges = sites.edges()
    best = math.inf
    best_row = None
    for block in _config_blocks(len(sites)):
        s = block.astype(np.float64)
        total = np.zeros(len(block))
        for i, j in edges:
            total -= s[:, i] * s[:, j] + y
        k = int(np.argmin(total))
        if total[k] < best:
            best = float(total[k])
            best_row = block[k]
    return best, SpinConfiguration.from_values(sites, [int(v) for v in best_row])


def pair_potential_sum(cfg: SpinConfiguration, sites: SiteSet, y: float) -> float:
    s = cfg.values_for(sites)
    return sum(pair_potential(s[i], s[j], True, y) for i, j in sites.edges())
