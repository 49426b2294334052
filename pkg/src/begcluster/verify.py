"""Sweeps that run the inequality and identity oracles over whole test families."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import ModelParams, SiteSet, stability_minimum
from .polycubes import rooted_animals
from .polymers import factorization_residual
from .region import stability_constant
from .trees import (
    embedding_weight,
    embedding_weight_bound,
    enumerate_bounded_trees,
    py_inequality_check,
    random_py_instances,
    simplified_weight_bound,
)


@dataclass(frozen=True)
class SweepResult:
    name: str
    instances: int
    failures: int
    worst_margin: float

    @property
    def ok(self) -> bool:
        return self.failures == 0


def stability_y_grid(count: int = 13, lo: float = -2.0, hi: float = 1.0) -> list[float]:
    return [float(v) for v in np.linspace(lo, hi, count)]


def stability_sweep(max_size: int = 4, y_grid=None, d: int = 2, slack: float = 1e-12) -> SweepResult:
    """min over configurations of sum V >= -h(y)|R| for every connected R containing the origin."""
    y_grid = stability_y_grid() if y_grid is None else list(y_grid)
    instances = failures = 0
    worst = math.inf
    for size in range(1, max_size + 1):
        for animal in sorted(sorted(a) for a in rooted_animals(d, size)):
            sites = SiteSet(animal)
            for y in y_grid:
                minimum, _ = stability_minimum(sites, y)
                margin = minimum + stability_constant(y, d) * size
                instances += 1
                worst = min(worst, margin)
                if margin < -slack:
                    failures += 1
    return SweepResult("stability", instances, failures, worst)


def py_sweep(count: int = 200, seed: int = 0, d: int = 2) -> SweepResult:
    instances = failures = 0
    worst = math.inf
    for R, cfg, p in random_py_instances(count, seed, d):
        res = py_inequality_check(R, cfg, p)
        instances += 1
        worst = min(worst, res.rhs - res.lhs)
        if not res.ok:
            failures += 1
    return SweepResult("tree-graph", instances, failures, worst)


def weight_bound_sweep(nmax: int = 6, d: int = 2) -> SweepResult:
    """w_tau <= degree-product bound <= 2d(2d-1)^(n-2) for every bounded-degree tree, n = 2..nmax."""
    instances = failures = 0
    worst = math.inf
    for n in range(2, nmax + 1):
        cap = simplified_weight_bound(n, d)
        for tree in enumerate_bounded_trees(n, 2 * d):
            w = embedding_weight(tree, d)
            b = embedding_weight_bound(tree.degrees, 0, d)
            instances += 1
            worst = min(worst, b - w, cap - b)
            if not w <= b <= cap:
                failures += 1
    return SweepResult("weight-bound", instances, failures, float(worst))


def random_identity_params(count: int, seed: int, d: int = 2) -> list[ModelParams]:
    """Seeded parameter triples with x in [-3, 0), y in [-3, 1], beta in [0, 3]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        x = -3.0 * (1.0 - rng.random())
        y = float(rng.uniform(-3.0, 1.0))
        beta = float(rng.uniform(0.0, 3.0))
        out.append(ModelParams(d=d, x=x, y=y, beta=beta))
    return out


def identity_sweep(shapes, params) -> SweepResult:
    instances = failures = 0
    worst = 0.0
    for shape in shapes:
        sites = SiteSet.box(*shape)
        for p in params:
            r = factorization_residual(sites, p)
            instances += 1
            worst = max(worst, r)
            if not r <= 1e-9:
                failures += 1
    return SweepResult("factorization", instances, failures, worst)
