"""Fixed polycube (lattice animal) enumeration and the binomial upper bounds."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ResourceError

DEFAULT_BUDGET = {1: 500, 2: 12, 3: 8}
DEFAULT_BUDGET_HIGH_D = 6
NAIVE_BUDGET = {1: 50, 2: 9, 3: 6}


def enumeration_budget(d: int) -> int:
    return DEFAULT_BUDGET.get(d, DEFAULT_BUDGET_HIGH_D)


def _check(d: int, n: int, budget: int | None) -> None:
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if n < 1:
        raise DomainError(f"size must be >= 1, got {n}")
    limit = enumeration_budget(d) if budget is None else budget
    if n > limit:
        raise ResourceError(f"n = {n} exceeds the enumeration budget {limit} for d = {d}")


class Polycube:
    """Fixed polycube: a connected cell set up to translation, stored in canonical form."""

    __slots__ = ("cells",)

    def __init__(self, cells: Iterable[Sequence[int]]):
        pts = {tuple(c) for c in cells}
        if not pts:
            raise DomainError("empty polycube")
        if not is_animal(pts):
            raise DomainError("cells are not connected through faces")
        self.cells = canonical_form(pts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Polycube) and self.cells == other.cells

    def __hash__(self) -> int:
        return hash(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __repr__(self) -> str:
        return f"Polycube({list(self.cells)!r})"


def canonical_form(cells: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Sorted cells translated so that the lexicographically least cell sits at the origin."""
    pts = sorted(tuple(c) for c in cells)
    base = pts[0]
    return tuple(tuple(a - b for a, b in zip(p, base)) for p in pts)


def _neighbours(c: tuple[int, ...]):
    for i in range(len(c)):
        for s in (1, -1):
            yield c[:i] + (c[i] + s,) + c[i + 1 :]


def is_animal(cells) -> bool:
    cells = set(cells)
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        for q in _neighbours(stack.pop()):
            if q in cells and q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(cells)


# --- Redelmeier enumeration -------------------------------------------------
#
# Cells are encoded as integers sum (c_i + n) * W^i with W = 2n + 1, so integer
# order is the order by (last coordinate, ..., first coordinate). Cells of an
# animal containing the root lie within L1 distance n of it, so no digit
# overflows. A cell may join only if its code is >= the root's code.


def _lattice(d: int, n: int) -> tuple[int, tuple[int, ...]]:
    w = 2 * n + 1
    origin = sum(n * w**i for i in range(d))
    steps = tuple(s * w**i for i in range(d) for s in (1, -1))
    return origin, steps


def _redelmeier(counts: list[int], untried: list[int], size: int, seen: set, n: int, origin: int, steps) -> None:
    while untried:
        c = untried.pop()
        counts[size] += 1
        if size < n:
            new = []
            for e in steps:
                q = c + e
                if q >= origin and q not in seen:
                    new.append(q)
            seen.update(new)
            _redelmeier(counts, untried + new, size + 1, seen, n, origin, steps)
            seen.difference_update(new)


def _first_level(d: int, n: int) -> list[int]:
    origin, steps = _lattice(d, n)
    return [origin + e for e in steps if origin + e > origin]


def _branch_counts(args: tuple[int, int, int]) -> list[int]:
    """Counts (sizes 2..n) of animals whose second cell is branch ``j`` of the first level."""
    d, n, j = args
    origin, steps = _lattice(d, n)
    level = _first_level(d, n)
    counts = [0] * (n + 1)
    seen = {origin, *level}
    # popping from the end of `level` visits index len-1, len-2, ...; branch j keeps level[:j]
    untried = level[: j + 1]
    c = untried.pop()
    counts[2] += 1
    if n > 2:
        new = [c + e for e in steps if c + e >= origin and c + e not in seen]
        seen.update(new)
        _redelmeier(counts, untried + new, 3, seen, n, origin, steps)
    return counts


def fixed_polycube_counts(d: int, n: int, workers: int = 1, budget: int | None = None) -> list[int]:
    """[A_1, ..., A_n] for fixed d-dimensional polycubes by Redelmeier's method.

    The work is split over the cells adjacent to the root; ``workers > 1``
    runs those branches in separate processes. The result does not depend on
    the worker count.
    """
    _check(d, n, budget)
    if n == 1:
        return [1]
    branches = range(len(_first_level(d, n)))
    jobs = [(d, n, j) for j in branches]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_branch_counts, jobs))
    else:
        parts = [_branch_counts(job) for job in jobs]
    totals = [sum(col) for col in zip(*parts)]
    totals[1] = 1
    return totals[1:]


def count_fixed_polycubes(d: int, n: int, workers: int = 1, budget: int | None = None) -> int:
    return fixed_polycube_counts(d, n, workers=workers, budget=budget)[-1]


def naive_fixed_polycube_counts(d: int, n: int, budget: int | None = None) -> list[int]:
    """[A_1, ..., A_n] by growing every animal one cell at a time and deduplicating canonical forms."""
    limit = NAIVE_BUDGET.get(d, 4) if budget is None else budget
    _check(d, n, limit)
    level = {((0,) * d,)}
    counts = [1]
    for _ in range(n - 1):
        nxt = set()
        for shape in level:
            occupied = set(shape)
            for c in shape:
                for q in _neighbours(c):
                    if q not in occupied:
                        nxt.add(canonical_form(occupied | {q}))
        level = nxt
        counts.append(len(level))
    return counts


def rooted_animals(d: int, n: int, budget: int | None = None) -> set[frozenset]:
    """All n-cell animals containing the origin, as cell sets."""
    limit = NAIVE_BUDGET.get(d, 4) if budget is None else budget
    _check(d, n, limit)
    level = {frozenset({(0,) * d})}
    for _ in range(n - 1):
        nxt = set()
        for animal in level:
            for c in animal:
                for q in _neighbours(c):
                    if q not in animal:
                        nxt.add(animal | {q})
        level = nxt
    return level


def rooted_animal_count(d: int, n: int, budget: int | None = None) -> int:
    """A*_n: number of n-cell animals that contain the origin (equals n * A_n)."""
    return len(rooted_animals(d, n, budget))


def llp_bound(d: int, n: int) -> Fraction:
    """2d/(n(n-1)) * C((2d-1)n, n-2)."""
    if n < 2:
        raise DomainError(f"the bound needs n >= 2, got {n}")
    return Fraction(2 * d * math.comb((2 * d - 1) * n, n - 2), n * (n - 1))


def bs_bound(d: int, n: int) -> int:
    """C((2d-1)n - 1, n - 1)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return math.comb((2 * d - 1) * n - 1, n - 1)


def ratio_closed_form(d: int, n: int) -> Fraction:
    """2d(2d-1) / (((2d-2)n + 1)((2d-2)n + 2))."""
    m = (2 * d - 2) * n
    return Fraction(2 * d * (2 * d - 1), (m + 1) * (m + 2))


def bound_ratio(d: int, n: int) -> tuple[Fraction, Fraction]:
    """(llp_bound / bs_bound, closed form); the two must coincide."""
    if n < 2:
        raise DomainError(f"the ratio needs n >= 2, got {n}")
    return llp_bound(d, n) / bs_bound(d, n), ratio_closed_form(d, n)


def ratio_matches(d: int, n: int) -> bool:
    """Exact check of llp/bs == closed form by cross-multiplication (no gcd reduction)."""
    m = (2 * d - 2) * n
    lhs = 2 * d * math.comb((2 * d - 1) * n, n - 2) * (m + 1) * (m + 2)
    rhs = 2 * d * (2 * d - 1) * n * (n - 1) * math.comb((2 * d - 1) * n - 1, n - 1)
    return lhs == rhs


def _step_top(c: int, top: int, k: int) -> tuple[int, int]:
    """C(top, k) -> C(top + 1, k)."""
    return c * (top + 1) // (top + 1 - k), top + 1


def _step_bottom(c: int, top: int, k: int) -> tuple[int, int]:
    """C(top, k) -> C(top, k + 1)."""
    return c * (top - k) // (k + 1), k + 1


def binomial_pairs(d: int, nmax: int):
    """Yield (n, C((2d-1)n, n-2), C((2d-1)n-1, n-1)) for n = 2..nmax by exact one-step recurrences."""
    if d < 1 or nmax < 2:
        raise DomainError(f"need d >= 1 and nmax >= 2, got d={d}, nmax={nmax}")
    a = 2 * d - 1
    top_l, k_l, c_l = 2 * a, 0, 1
    top_b, k_b, c_b = 2 * a - 1, 1, 2 * a - 1
    for n in range(2, nmax + 1):
        yield n, c_l, c_b
        for _ in range(a):
            c_l, top_l = _step_top(c_l, top_l, k_l)
            c_b, top_b = _step_top(c_b, top_b, k_b)
        c_l, k_l = _step_bottom(c_l, top_l, k_l)
        c_b, k_b = _step_bottom(c_b, top_b, k_b)


def ratio_identity_scan(d: int, nmax: int) -> list[int]:
    """Every n in 2..nmax where llp/bs differs from the closed form (empty list means none).

    Cross-multiplied exact comparison; each step costs linear big-integer work.
    """
    a = 2 * d - 1
    bad = []
    for n, c_l, c_b in binomial_pairs(d, nmax):
        m = (2 * d - 2) * n
        if c_l * (m + 1) * (m + 2) != a * n * (n - 1) * c_b:
            bad.append(n)
    return bad


def multinomial_identity_check(d: int, n: int, max_n: int = 8, max_d: int = 3) -> bool:
    """sum over s_1+...+s_n = n-2, 0 <= s_i <= 2d-1 of prod C(2d-1, s_i) == C((2d-1)n, n-2)."""
    if n > max_n or d > max_d:
        raise ResourceError(f"(d, n) = ({d}, {n}) exceeds the exhaustive caps ({max_d}, {max_n})")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    top = 2 * d - 1
    lhs = 0
    for s in itertools.product(range(min(top, n - 2) + 1), repeat=n):
        if sum(s) == n - 2:
            lhs += math.prod(math.comb(top, k) for k in s)
    return lhs == math.comb(top * n, n - 2)


@dataclass(frozen=True)
class BoundRow:
    n: int
    a_n: int | None
    a_star: int | None
    llp: Fraction
    bs: int
    ratio: Fraction
    source: str


def bound_table(
    d: int,
    nmax: int,
    known: Mapping[int, int] | None = None,
    workers: int = 1,
    budget: int | None = None,
) -> list[BoundRow]:
    """Rows n = 2..nmax comparing A_n with both bounds.

    A_n is enumerated up to the budget; beyond it values from ``known`` are
    used and marked as unverified input, otherwise left absent.
    """
    limit = enumeration_budget(d) if budget is None else budget
    enum_n = min(nmax, limit)
    counts = fixed_polycube_counts(d, enum_n, workers=workers, budget=limit) if enum_n >= 1 else []
    known = dict(known or {})
    rows = []
    for n in range(2, nmax + 1):
        if n <= enum_n:
            a_n, source = counts[n - 1], "enumerated"
        elif n in known:
            a_n, source = int(known[n]), "unverified input"
        else:
            a_n, source = None, "absent"
        ratio, closed = bound_ratio(d, n)
        if ratio != closed:
            raise ArithmeticError(f"bound ratio mismatch at d={d}, n={n}")
        rows.append(
            BoundRow(
                n=n,
                a_n=a_n,
                a_star=None if a_n is None else n * a_n,
                llp=llp_bound(d, n),
                bs=bs_bound(d, n),
                ratio=ratio,
                source=source,
            )
        )
    return rows
