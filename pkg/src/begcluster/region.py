"""Scalar functions of the convergence analysis and the all-temperature analyticity region."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NoRootError

LOG2 = math.log(2.0)

# published constants; 59.56 is the alternative k numerator that appears alongside 59.57
PUBLISHED_C_PLUS = 58.57
PUBLISHED_C_MINUS = 30.52
PUBLISHED_K_NUMERATOR = 59.57
ALT_K_NUMERATOR = 59.56
PUBLISHED_KBAR_NUMERATOR = 30.52
PUBLISHED_ROOT_54 = 0.37137
PUBLISHED_ROOT_74 = 0.7127

_SERIES_SWITCH = 1e-4
_SERIES_TAIL = 1e-18


def alpha(x: float, beta: float, d: int) -> float:
    """e^{2d beta x} / (1 + 2 e^{2d beta x}), stable for large |2d beta x|."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    t = 2 * d * beta * x
    if t <= 0:
        e = math.exp(t)
        return e / (1 + 2 * e)
    return 1 / (math.exp(-t) + 2)


def log_alpha(x: float, beta: float, d: int) -> float:
    t = 2 * d * beta * x
    if t <= 0:
        return t - math.log1p(2 * math.exp(t))
    return -math.log(math.exp(-t) + 2)


def stability_constant(y: float, d: int) -> float:
    """h(y) = d(1 + y) for y > -1, else 0."""
    return d * (1 + y) if y > -1 else 0.0


def condition_f(x: float) -> float:
    """f(x) = -ln(1 - x)/x on (0, 1), increasing from 1 to +inf."""
    return -math.log1p(-x) / x


def tail_series(r: float) -> float:
    """sum_{n>=2} r^{n-1}/n = (-r - ln(1 - r))/r for 0 <= r < 1."""
    if r < 0 or r >= 1:
        raise DomainError(f"series needs 0 <= r < 1, got {r!r}")
    if r == 0:
        return 0.0
    if r > _SERIES_SWITCH:
        return (-r - math.log1p(-r)) / r
    total = 0.0
    power = 1.0
    n = 2
    while True:
        power *= r
        term = power / n
        total += term
        if term < _SERIES_TAIL:
            return total
        n += 1


@dataclass(frozen=True)
class CriterionTerms:
    delta: float
    epsilon: float
    r: float
    value: float

    @property
    def satisfied(self) -> bool:
        return self.value <= 1


def condition_value(delta: float, epsilon: float, d: int, a: float = LOG2) -> float:
    """2 e^a delta S(r) / (e^a - 1), r = 4 d e^{1+a} delta epsilon; +inf once r >= 1.

    At a = log 2 this is 4 delta S(r) with r = 8 d e delta epsilon, where
    S(r) = sum_{n>=2} r^{n-1}/n.
    """
    if a <= 0:
        raise DomainError(f"a must be positive, got {a!r}")
    r = 4 * d * math.exp(1 + a) * delta * epsilon
    if r >= 1:
        return math.inf
    return 2 * math.exp(a) * delta * tail_series(r) / math.expm1(a)


def criterion_terms(d: int, x: float, y: float, beta: float, a: float = LOG2) -> CriterionTerms:
    """delta = alpha e^{beta h(y)}, epsilon = 1 - e^{-beta(1+|y|)} and the condition value."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    if a <= 0:
        raise DomainError(f"a must be positive, got {a!r}")
    if beta == 0:
        return CriterionTerms(delta=1 / 3, epsilon=0.0, r=0.0, value=0.0)
    log_delta = log_alpha(x, beta, d) + beta * stability_constant(y, d)
    epsilon = -math.expm1(-beta * (1 + abs(y)))
    log_r = math.log(4 * d) + 1 + a + log_delta + math.log(epsilon)
    if log_r >= 0:
        # delta may overflow here; the condition is violated regardless
        delta = math.exp(min(log_delta, 700.0))
        return CriterionTerms(delta, epsilon, math.exp(min(log_r, 700.0)), math.inf)
    delta = math.exp(log_delta)
    return CriterionTerms(delta, epsilon, math.exp(log_r), condition_value(delta, epsilon, d, a))


def fp_condition_value(p, a: float = LOG2) -> float:
    """Left-hand side of the all-temperature condition for ``p`` (<= 1 means satisfied)."""
    return criterion_terms(p.d, p.x, p.y, p.beta, a).value


def condition_root(target: float, tol: float = 1e-12) -> float:
    """Unique x in (0, 1) with -ln(1 - x)/x = target, by bisection."""
    if not target > 1:
        raise NoRootError(f"f(x) = -ln(1-x)/x exceeds 1 on (0, 1); no root for target {target!r}")
    lo, hi = 1e-9, 1 - 1e-9
    if condition_f(hi) < target:
        raise NoRootError(f"target {target!r} beyond the bisection bracket")
    while True:
        mid = 0.5 * (lo + hi)
        fm = condition_f(mid)
        if abs(fm - target) <= tol or hi - lo <= 1e-16:
            return mid
        if fm < target:
            lo = mid
        else:
            hi = mid


@dataclass(frozen=True)
class GMax:
    beta_c: float
    value: float
    bound: float


def g_function(beta: float, k1: float, k2: float) -> float:
    return math.exp(-k1 * beta) * -math.expm1(-k2 * beta)


def g_max(k1: float, k2: float) -> GMax:
    """Maximiser and maximum of g(beta) = e^{-k1 beta}(1 - e^{-k2 beta}) over beta > 0."""
    if not (k1 > 0 and k2 > 0):
        raise DomainError(f"k1 and k2 must be positive, got {k1!r}, {k2!r}")
    q = k1 / (k1 + k2)
    beta_c = -math.log(q) / k2
    bound = k2 / (k1 + k2)
    return GMax(beta_c=beta_c, value=q ** (k1 / k2) * bound, bound=bound)


@dataclass(frozen=True)
class ConditionConstants:
    """Roots of f(x) = 5/4 and 7/4 and the per-dimension constants derived from them."""

    root54: float
    root74: float
    c_plus: float
    c_minus: float
    published_c_plus: float = PUBLISHED_C_PLUS
    published_c_minus: float = PUBLISHED_C_MINUS

    @property
    def c_plus_two_decimal_ceiling(self) -> float:
        """Smallest two-decimal constant that is still >= 8e/root54."""
        return math.ceil(self.c_plus * 100) / 100

    @property
    def c_minus_two_decimal_ceiling(self) -> float:
        return math.ceil(self.c_minus * 100) / 100


def condition_constants() -> ConditionConstants:
    r54 = condition_root(5 / 4)
    r74 = condition_root(7 / 4)
    return ConditionConstants(root54=r54, root74=r74, c_plus=8 * math.e / r54, c_minus=8 * math.e / r74)


@dataclass(frozen=True)
class RegionBoundary:
    """Polygonal boundary x_max(y) of the all-temperature analyticity region."""

    d: int
    k: float
    kbar: float

    def __post_init__(self) -> None:
        if self.d < 2:
            raise DomainError(f"region formulas need d >= 2, got {self.d}")

    def branch(self, y: float) -> str:
        if y >= 0:
            return "upper"
        if y > -1:
            return "middle"
        return "lower"

    def x_max(self, y: float) -> float:
        branch = self.branch(y)
        if branch == "upper":
            return -self.k * (y + 1)
        if branch == "middle":
            return (self.k - 1) * y - self.k
        return self.kbar * (y - 1)

    @property
    def jump(self) -> tuple[float, float]:
        """Endpoints at y = -1: middle branch limit and lower branch value."""
        return (-2 * self.k + 1, -2 * self.kbar)

    def polyline(self, y_min: float = -8.0, y_max: float = 4.0, step: float = 0.01) -> list[tuple[float, float, str]]:
        if step <= 0 or y_max < y_min:
            raise DomainError("polyline needs step > 0 and y_max >= y_min")
        count = int(round((y_max - y_min) / step))
        pts = []
        for i in range(count + 1):
            y = round(y_min + i * step, 12)
            pts.append((y, self.x_max(y), self.branch(y)))
        return pts


def region_boundary(d: int, k_numerator: float = PUBLISHED_K_NUMERATOR, kbar_numerator: float = PUBLISHED_KBAR_NUMERATOR) -> RegionBoundary:
    """Boundary with k = (k_numerator d - 1)/(2d), kbar = (kbar_numerator d - 1)/(2d)."""
    if int(d) != d or d < 2:
        raise DomainError(f"region formulas need an integer d >= 2, got {d!r}")
    return RegionBoundary(d=d, k=(k_numerator * d - 1) / (2 * d), kbar=(kbar_numerator * d - 1) / (2 * d))


def derived_region_boundary(d: int) -> RegionBoundary:
    """Boundary built from the bisection roots instead of the printed decimals."""
    c = condition_constants()
    return region_boundary(d, k_numerator=c.c_plus + 1, kbar_numerator=c.c_minus)


def in_analytic_region(x: float, y: float, d: int, boundary: RegionBoundary | None = None) -> bool:
    from .lattice import in_disordered_region

    b = boundary or region_boundary(d)
    return x <= b.x_max(y) and in_disordered_region(x, y)


@dataclass(frozen=True)
class AllTemperatureReport:
    x: float
    y: float
    d: int
    in_region: bool
    betas: tuple[float, ...]
    values: tuple[float, ...]

    @property
    def max_value(self) -> float:
        return max(self.values)

    @property
    def argmax_beta(self) -> float:
        return self.betas[self.values.index(self.max_value)]

    @property
    def all_satisfied(self) -> bool:
        return self.max_value <= 1


def log_beta_grid(lo: float = 1e-3, hi: float = 50.0, count: int = 200) -> list[float]:
    if count == 1:
        return [lo]
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got {lo!r}, {hi!r}")
    return [float(v) for v in np.geomspace(lo, hi, count)]


def all_temperature_check(x: float, y: float, d: int, beta_grid: Sequence[float]) -> AllTemperatureReport:
    if not beta_grid:
        raise DomainError("empty beta grid")
    if any(b < 0 for b in beta_grid):
        raise DomainError("beta grid values must be >= 0")
    values = tuple(criterion_terms(d, x, y, b).value for b in beta_grid)
    return AllTemperatureReport(
        x=x, y=y, d=d, in_region=in_analytic_region(x, y, d), betas=tuple(beta_grid), values=values
    )


def constants_report(d: int = 2) -> dict:
    """Printed versus first-principles constants, including the 59.56/59.57 discrepancy."""
    c = condition_constants()
    lit = region_boundary(d)
    alt = region_boundary(d, k_numerator=ALT_K_NUMERATOR)
    der = derived_region_boundary(d)
    return {
        "d": d,
        "root54": c.root54,
        "root74": c.root74,
        "published_root54": PUBLISHED_ROOT_54,
        "published_root74": PUBLISHED_ROOT_74,
        "c_plus_derived": c.c_plus,
        "c_minus_derived": c.c_minus,
        "c_plus_published": PUBLISHED_C_PLUS,
        "c_minus_published": PUBLISHED_C_MINUS,
        "c_plus_two_decimal_ceiling": c.c_plus_two_decimal_ceiling,
        "c_minus_two_decimal_ceiling": c.c_minus_two_decimal_ceiling,
        "k": lit.k,
        "k_alt_59_56": alt.k,
        "k_discrepancy": lit.k - alt.k,
        "k_derived": der.k,
        "kbar": lit.kbar,
        "kbar_derived": der.kbar,
    }
