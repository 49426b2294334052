"""Command-line front end.

Every subcommand writes a table as CSV or JSON. Exit status: 0 success,
2 bad command line (unknown subcommand or flag), 3 invalid parameter value,
4 enumeration budget exceeded, 5 invariant violation, 6 I/O error. Failures
also print a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import DomainError, InvariantViolation, ResourceError
from .lattice import ModelParams, SiteSet, brute_force_log_partition, in_disordered_region
from .polycubes import bound_table, enumeration_budget
from .polymers import grand_partition
from .region import (
    LOG2,
    all_temperature_check,
    constants_report,
    criterion_terms,
    derived_region_boundary,
    in_analytic_region,
    log_beta_grid,
    region_boundary,
)
from .report import EmptyReportError, build_meta, emit_report
from .trees import TREE_CAP, c_n, embedding_weight, embedding_weight_bound, enumerate_bounded_trees, simplified_weight_bound
from .verify import identity_sweep, py_sweep, random_identity_params, stability_sweep, weight_bound_sweep

log = logging.getLogger("begcluster")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_RESOURCE = 4
EXIT_INVARIANT = 5
EXIT_IO = 6

OUTPUT_DIR_ENV = "BEGCLUSTER_OUTPUT_DIR"
SUBCOMMANDS = ("region", "check-criterion", "verify-identity", "verify-inequalities", "trees", "bounds")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _lattice_shape(text: str) -> tuple[int, ...]:
    try:
        shape = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"lattice must look like 2x2, got {text!r}") from None
    if not shape or any(v < 1 for v in shape):
        raise argparse.ArgumentTypeError(f"lattice sides must be positive, got {text!r}")
    return shape


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--output", help="output file (default: stdout, or $%s/<command>.<format>)" % OUTPUT_DIR_ENV)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, help="override the enumeration size cap")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="begcluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("region", parents=[common], help="boundary of the analyticity region")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--y-min", type=float, default=-8.0)
    p.add_argument("--y-max", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--derived", action="store_true", help="use constants from the bisection roots")

    p = sub.add_parser("check-criterion", parents=[common], help="evaluate the convergence condition over beta")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--beta-min", type=float, default=1e-3)
    p.add_argument("--beta-max", type=float, default=50.0)
    p.add_argument("--beta-count", type=int, default=200)
    p.add_argument("--a", type=float, default=None, help="criterion parameter a (default log 2)")

    p = sub.add_parser("verify-identity", parents=[common], help="Z = (1+2e^{2d beta x})^N Xi on a box")
    p.add_argument("--lattice", type=_lattice_shape, action="append")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--random", type=int, default=0, help="number of seeded random parameter triples")

    p = sub.add_parser("verify-inequalities", parents=[common], help="stability, tree-graph and weight-bound sweeps")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--nmax", type=int, default=6)

    p = sub.add_parser("trees", parents=[common], help="bounded-degree tree statistics")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--nmax", type=int, default=6)

    p = sub.add_parser("bounds", parents=[common], help="polycube counts against the binomial bounds")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--known", help="JSON file {n: A_n} extending the table beyond the budget")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


def run_region(a) -> tuple[list[dict], dict]:
    _require(a.d >= 2, "--d must be >= 2")
    _require(a.step > 0, "--step must be positive")
    _require(a.y_max >= a.y_min, "--y-max must be >= --y-min")
    b = derived_region_boundary(a.d) if a.derived else region_boundary(a.d)
    rows = []
    for y, x, branch in b.polyline(a.y_min, a.y_max, a.step):
        if not (x < 0 and in_disordered_region(x, y)):
            raise InvariantViolation(f"boundary point ({x}, {y}) is outside the disordered region")
        rows.append({"y": y, "x_max": x, "branch": branch, "k": b.k, "kbar": b.kbar})
    extra = {"constants": constants_report(a.d), "jump": list(b.jump)}
    return rows, extra


def run_check_criterion(a) -> tuple[list[dict], dict]:
    _require(a.d >= 2, "--d must be >= 2")
    _require(0 <= a.beta_min <= a.beta_max and a.beta_count >= 1, "invalid beta grid")
    crit_a = LOG2 if a.a is None else a.a
    _require(crit_a > 0, "--a must be positive")
    if a.beta_min == 0:
        grid = [0.0] + log_beta_grid(1e-3, a.beta_max, a.beta_count - 1) if a.beta_count > 1 else [0.0]
    else:
        grid = log_beta_grid(a.beta_min, a.beta_max, a.beta_count)
    rows = []
    for beta in grid:
        t = criterion_terms(a.d, a.x, a.y, beta, crit_a)
        rows.append(
            {"beta": beta, "delta": t.delta, "epsilon": t.epsilon, "r": t.r, "value": t.value, "satisfied": t.satisfied}
        )
    report = all_temperature_check(a.x, a.y, a.d, grid) if a.a is None else None
    inside = in_analytic_region(a.x, a.y, a.d)
    if inside and a.a is None and not report.all_satisfied:
        raise InvariantViolation(
            f"({a.x}, {a.y}) is in the analyticity region but the condition reaches {report.max_value} "
            f"at beta = {report.argmax_beta}"
        )
    return rows, {"in_analytic_region": inside, "max_value": max(r["value"] for r in rows)}


def run_verify_identity(a) -> tuple[list[dict], dict]:
    shapes = a.lattice or [(2, 2)]
    for shape in shapes:
        _require(math.prod(shape) <= 9, f"lattice {shape} has more than 9 sites")
    params = []
    if a.x is not None or a.y is not None or a.beta is not None:
        _require(None not in (a.x, a.y, a.beta), "--x, --y and --beta must be given together")
        params.append(ModelParams(d=a.d, x=a.x, y=a.y, beta=a.beta))
    if a.random:
        _require(a.random > 0, "--random must be positive")
        params.extend(random_identity_params(a.random, a.seed, a.d))
    _require(bool(params), "give --x/--y/--beta or --random N")
    rows = []
    for shape in shapes:
        sites = SiteSet.box(*shape)
        for p in params:
            log_z = brute_force_log_partition(sites, p)
            t = 2 * p.d * p.beta * p.x
            single = math.log1p(2 * math.exp(t)) if t < 0 else t + math.log(math.exp(-t) + 2)
            log_xi = math.log(grand_partition(sites, p))
            residual = abs(log_z - (len(sites) * single + log_xi))
            rows.append(
                {
                    "lattice": "x".join(map(str, shape)),
                    "x": p.x,
                    "y": p.y,
                    "beta": p.beta,
                    "log_z": log_z,
                    "site_factor": len(sites) * single,
                    "log_xi": log_xi,
                    "residual": residual,
                }
            )
            if not residual <= 1e-9:
                raise InvariantViolation(f"factorization residual {residual} on {shape} at {p}")
    return rows, {}


def run_verify_inequalities(a) -> tuple[list[dict], dict]:
    _require(1 <= a.max_size <= 6, "--max-size must be in 1..6")
    _require(2 <= a.nmax <= 8, "--nmax must be in 2..8")
    _require(a.count >= 1, "--count must be positive")
    results = []
    for name, fn in (
        ("stability", lambda: stability_sweep(a.max_size)),
        ("tree-graph", lambda: py_sweep(a.count, a.seed)),
        ("weight-bound", lambda: weight_bound_sweep(a.nmax)),
    ):
        log.info("running %s sweep", name)
        results.append(fn())
    rows = [
        {"check": r.name, "instances": r.instances, "failures": r.failures, "worst_margin": r.worst_margin}
        for r in results
    ]
    bad = [r.name for r in results if not r.ok]
    if bad:
        raise InvariantViolation(f"inequality sweeps failed: {', '.join(bad)}")
    return rows, {}


def run_trees(a) -> tuple[list[dict], dict]:
    cap = TREE_CAP if a.budget is None else a.budget
    _require(a.d >= 1, "--d must be >= 1")
    _require(a.nmax >= 1, "--nmax must be >= 1")
    if a.nmax > min(cap, 8):
        raise ResourceError(f"--nmax {a.nmax} exceeds the tree budget {min(cap, 8)}")
    rows = []
    for n in range(1, a.nmax + 1):
        log.info("trees: n = %d", n)
        trees = enumerate_bounded_trees(n, 2 * a.d)
        weights = [embedding_weight(t, a.d) for t in trees]
        degree_bounds = [embedding_weight_bound(t.degrees, 0, a.d) for t in trees]
        cn = c_n(n, a.d)
        if cn.exact > cn.bound or any(w > b for w, b in zip(weights, degree_bounds)):
            raise InvariantViolation(f"tree bound violated at n = {n}")
        if n >= 2 and max(degree_bounds) > simplified_weight_bound(n, a.d):
            raise InvariantViolation(f"simplified bound violated at n = {n}")
        rows.append(
            {
                "n": n,
                "trees": len(trees),
                "c_n_exact": cn.exact,
                "c_n_bound": cn.bound,
                "max_weight": max(weights),
                "max_degree_bound": max(degree_bounds),
            }
        )
    return rows, {}


def _load_known(path: str) -> dict[int, int]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if isinstance(raw, list):
        raw = {i + 1: v for i, v in enumerate(raw)}
    return {int(k): int(v) for k, v in raw.items()}


def run_bounds(a) -> tuple[list[dict], dict]:
    _require(a.d >= 1, "--d must be >= 1")
    _require(a.nmax >= 2, "--nmax must be >= 2")
    _require(a.workers >= 1, "--workers must be >= 1")
    known = _load_known(a.known) if a.known else None
    budget = enumeration_budget(a.d) if a.budget is None else a.budget
    if known is None and a.nmax > budget:
        raise ResourceError(f"--nmax {a.nmax} exceeds the enumeration budget {budget}; pass --known or --budget")
    table = bound_table(a.d, a.nmax, known=known, workers=a.workers, budget=budget)
    rows = []
    for r in table:
        if r.a_n is not None and r.a_n > r.llp:
            raise InvariantViolation(f"A_{r.n} = {r.a_n} exceeds the bound {r.llp}")
        if a.d >= 2 and r.llp > r.bs:
            raise InvariantViolation(f"bound ordering fails at n = {r.n}")
        rows.append(
            {"n": r.n, "A_n": r.a_n, "A_star": r.a_star, "LLP": r.llp, "BS": r.bs, "ratio": r.ratio, "source": r.source}
        )
    return rows, {}


_RUNNERS = {
    "region": run_region,
    "check-criterion": run_check_criterion,
    "verify-identity": run_verify_identity,
    "verify-inequalities": run_verify_inequalities,
    "trees": run_trees,
    "bounds": run_bounds,
}


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def dispatch(args: argparse.Namespace) -> int:
    runner = _RUNNERS[args.command]
    rows, extra = runner(args)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "output", "format", "verbose", "seed")}
    params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()}
    meta = build_meta(args.command, {**params, **extra}, args.seed)
    sink: str | None = args.output
    if sink is None and os.environ.get(OUTPUT_DIR_ENV):
        sink = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{args.format}")
    emit_report(rows, meta, args.format, sink)
    return EXIT_OK


def _configure_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE)
    _configure_logging(args.verbose)
    try:
        return dispatch(args)
    except DomainError as exc:
        return _error("invalid-parameter", str(exc), EXIT_INVALID)
    except ResourceError as exc:
        return _error("budget", str(exc), EXIT_RESOURCE)
    except InvariantViolation as exc:
        return _error("invariant", str(exc), EXIT_INVARIANT)
    except EmptyReportError as exc:
        return _error("empty-report", str(exc), EXIT_INVARIANT)
    except OSError as exc:
        return _error("io", str(exc), EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
