"""Command line entry point.

Subcommands: generate, solve, validate, evaluate, bench, export-geojson.
Option defaults may be overridden by MPPC_* environment variables (for
example MPPC_EPSILON or MPPC_STRATEGY); explicit flags win over both.

Exit codes: 0 ok, 1 usage, 2 validation, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import (InfeasibleSolutionError, MetricError, MppcError, ParameterError, ParseError,
                     StructuralError, ValidationError)
from .evaluation import brute_force_optimum, evaluate, render_report
from .generator import GeneratorSpec, generate_instance
from .geojson import export_geojson
from .instance import (AssumptionParams, check_feasibility, dumps_instance, dumps_solution, load_instance,
                       load_solution, validate_assumptions)
from .metric import import_directions_cache
from .pipelines import SolverConfig, solve

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_SOLVER = 0, 1, 2, 3

log = logging.getLogger("mppc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _env(name, default, cast=str):
    raw = os.environ.get(f"MPPC_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"bad value for MPPC_{name}: {raw!r}") from None


def _read(path) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path, data) -> None:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if path in (None, "-"):
        sys.stdout.write(data)
    else:
        Path(path).write_text(data, encoding="utf-8")


def _add_params(p):
    p.add_argument("--epsilon", type=float, default=_env("EPSILON", 0.5, float))
    p.add_argument("--p", type=float, default=_env("P", 1.0, float))
    p.add_argument("--alpha", type=float, default=_env("ALPHA", 1.0, float))


def _add_solver(p):
    _add_params(p)
    p.add_argument("--algorithm", "-a", choices=["1", "2", "3"], default=_env("ALGORITHM", "1"))
    p.add_argument("--s", type=float, default=_env("S", None, float), help="WSPD separation (alg 3)")
    p.add_argument("--strategy", choices=["exact_dp", "exact", "insertion", "bucketed"],
                   default=_env("STRATEGY", "exact_dp"))
    p.add_argument("--crossover", type=int, default=_env("CROSSOVER", 16, int))
    p.add_argument("--pair-order", choices=["ascending", "descending"], default=_env("PAIR_ORDER", "ascending"))
    p.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    p.add_argument("--directions", help="offline directions cache replacing the instance metric")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mppc", description="Maximum profit pickup routing with time windows")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--T", type=int, default=_env("T", 15, int))
    g.add_argument("--box", type=float, default=_env("BOX", 20.0, float))
    g.add_argument("--q-lo", type=float, default=_env("Q_LO", 120.0, float))
    g.add_argument("--q-hi", type=float, default=_env("Q_HI", 360.0, float))
    g.add_argument("--capacity", type=float, default=_env("CAPACITY", 1000.0, float))
    g.add_argument("--speed", type=float, default=_env("SPEED", 10.0, float))
    g.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    g.add_argument("--name")
    g.add_argument("--epsilon", type=float, default=_env("EPSILON", 0.5, float))
    g.add_argument("--out", default="-")

    s = sub.add_parser("solve", help="run a pipeline on an instance")
    _add_solver(s)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", default="-")

    v = sub.add_parser("validate", help="check an instance (and optionally a solution)")
    _add_params(v)
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--solution")
    v.add_argument("--constant", type=float, default=1.0, help="C in q_max <= C n^p q_min")
    v.add_argument("--oracle", action="store_true", help="compute m* by brute force (n <= 8)")

    e = sub.add_parser("evaluate", help="report P, U and rho for a solution")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--solution", required=True)
    e.add_argument("--format", choices=["text", "json"], default="text")
    e.add_argument("--out", help="also write the JSON report here")

    b = sub.add_parser("bench", help="solve and evaluate every instance in a directory")
    _add_solver(b)
    b.add_argument("--suite", required=True)
    b.add_argument("--jobs", type=int, default=_env("JOBS", 1, int))
    b.add_argument("--out", help="write the JSON report here")

    x = sub.add_parser("export-geojson", help="GeoJSON of sites and routes")
    x.add_argument("--in", dest="input", required=True)
    x.add_argument("--solution", required=True)
    x.add_argument("--out", default="-")
    return parser


def _config(args) -> SolverConfig:
    strategy = "exact_dp" if args.strategy == "exact" else args.strategy
    return SolverConfig(algorithm=args.algorithm,
                        params=AssumptionParams(args.epsilon, args.p, args.alpha),
                        strategy=strategy, crossover=args.crossover, s=args.s,
                        pair_order=args.pair_order, seed=args.seed)


def _load(args):
    inst = load_instance(_read(args.input))
    if getattr(args, "directions", None):
        inst = inst.with_matrix(import_directions_cache(_read(args.directions), inst).array.tolist())
    return inst


def cmd_generate(args):
    spec = GeneratorSpec(args.n, args.T, args.box, args.q_lo, args.q_hi, args.capacity, args.speed,
                         args.seed, args.name)
    inst = generate_instance(spec)
    report = validate_assumptions(inst, AssumptionParams(epsilon=args.epsilon))
    if report[2].holds is False:
        print(f"mppc: warning: generated instance violates the cost/quantity assumption at "
              f"epsilon={args.epsilon:g}: {report[2].detail}", file=sys.stderr)
    _write(args.out, dumps_instance(inst))
    return EXIT_OK


def cmd_solve(args):
    inst = _load(args)
    sol = solve(inst, _config(args))
    _write(args.out, dumps_solution(sol, inst))
    log.info("profit %.4f with %d vehicles", sol.profit, sol.vehicles)
    return EXIT_OK


def cmd_validate(args):
    inst = load_instance(_read(args.input))
    m_star = brute_force_optimum(inst).vehicles if args.oracle else None
    report = validate_assumptions(inst, AssumptionParams(args.epsilon, args.p, args.alpha),
                                  constant=args.constant, optimal_vehicles=m_star)
    print(f"instance {inst.name}: n={inst.n} Q={inst.capacity:g} T={inst.horizon} ok")
    for c in report.checks:
        status = {True: "holds", False: "VIOLATED", None: "unknown"}[c.holds]
        print(f"{c.name}: {status} - {c.detail}")
    if args.solution:
        violations = check_feasibility(inst, load_solution(_read(args.solution), inst))
        for v in violations:
            print(f"violation: {v}")
        print(f"solution: {len(violations)} violation(s)")
        if violations:
            return EXIT_VALIDATION
    return EXIT_OK


def cmd_evaluate(args):
    inst = load_instance(_read(args.input))
    sol = load_solution(_read(args.solution), inst)
    report = evaluate(inst, sol)
    _write("-", render_report([report], args.format))
    if args.out:
        _write(args.out, render_report([report], "json"))
    return EXIT_VALIDATION if any(f.startswith("infeasible") for f in report.flags) else EXIT_OK


def _bench_one(path, cfg):
    inst = load_instance(Path(path).read_text(encoding="utf-8"))
    return evaluate(inst, solve(inst, cfg))


def cmd_bench(args):
    files = sorted(Path(args.suite).glob("*.json"))
    if not files:
        raise UsageError(f"no *.json instances in {args.suite}")
    cfg = _config(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_bench_one, files, [cfg] * len(files)))
    else:
        reports = [_bench_one(f, cfg) for f in files]
    _write("-", render_report(reports))
    if args.out:
        _write(args.out, render_report(reports, "json"))
    return EXIT_OK


def cmd_export(args):
    inst = load_instance(_read(args.input))
    sol = load_solution(_read(args.solution), inst)
    _write(args.out, export_geojson(inst, sol))
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "validate": cmd_validate,
            "evaluate": cmd_evaluate, "bench": cmd_bench, "export-geojson": cmd_export}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mppc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mppc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleSolutionError as exc:
        print(f"mppc: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ParseError, ValidationError, MetricError, StructuralError, json.JSONDecodeError) as exc:
        print(f"mppc: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ParameterError, MppcError) as exc:
        print(f"mppc: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
