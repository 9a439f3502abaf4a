"""Command-line entry point: solve, compare, simulate, generate, bench.

Exit codes: 0 success, 2 invalid input, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace

from . import dist
from .baseline import compare
from .bench import (CSV_COLUMNS, bench_specs, format_summary, parse_range, run_bench, summarize,
                    write_csv)
from .errors import InvalidParameterError, ProblemError, ScheduleInvalidError, SearchLimitError
from .fileformat import load_problem, load_schedule, operator_to_dict, save_problem
from .gen import WEIGHT_RULES, GenSpec, generate
from .heuristics import MODES
from .mc import agrees, simulate
from .search import solve

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_LIMIT = 3


def _schedule_report(schedule, problem, stats=None) -> dict:
    rep = {
        "operators": [operator_to_dict(op) for op in schedule.operators],
        "sequence": schedule.describe(),
        "expected_penalty": schedule.expected_penalty,
        "completion_time_mean": dist.mean(schedule.cost.time),
        "orders": {
            oid: {
                "late_prob": oc.late_prob,
                "penalty": oc.penalty,
                "ship_time_mean": dist.mean(oc.ship_time),
                "deadline": problem.order(oid).deadline,
            }
            for oid, oc in schedule.per_order.items()
        },
    }
    if stats is not None:
        rep["stats"] = asdict(stats)
    return rep


def _emit(doc, out):
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load(args):
    problem = load_problem(args.problem)
    weights = {}
    for pos, flag in enumerate((args.w1, args.w2, args.w3)):
        if flag is not None:
            if pos >= len(problem.orders):
                raise ProblemError(f"--w{pos + 1} given but problem has {len(problem.orders)} orders",
                                   f"orders[{pos}]")
            weights[problem.orders[pos].id] = flag
    for item in args.weight or ():
        oid, _, value = item.partition("=")
        if oid not in problem.order_index:
            raise ProblemError(f"--weight names unknown order {oid!r}", "orders.id")
        weights[oid] = float(value)
    if weights:
        problem = problem.with_weights(weights)
    if getattr(args, "grid_step", None):
        problem = replace(problem, grid_step=args.grid_step)
    return problem


def _add_problem_flags(p):
    p.add_argument("problem", help="problem JSON file")
    p.add_argument("--heuristic", choices=MODES, default="max")
    p.add_argument("--grid-step", type=float, default=None, help="override the file's grid step")
    p.add_argument("--max-expansions", type=int, default=None)
    p.add_argument("--max-seconds", type=float, default=None)
    p.add_argument("--w1", type=float, default=None, help="weight of the first order")
    p.add_argument("--w2", type=float, default=None, help="weight of the second order")
    p.add_argument("--w3", type=float, default=None, help="weight of the third order")
    p.add_argument("--weight", action="append", metavar="ORDER=W", help="override an order weight")
    p.add_argument("-o", "--out", default=None, help="write the report here instead of stdout")


def cmd_solve(args) -> int:
    problem = _load(args)
    try:
        schedule, stats = solve(problem, args.heuristic, prune=not args.no_prune,
                                max_expansions=args.max_expansions, max_seconds=args.max_seconds)
    except SearchLimitError as e:
        doc = {"error": str(e), "stats": asdict(e.stats) if e.stats else None}
        if e.incumbent is not None:
            doc["incumbent"] = _schedule_report(e.incumbent, problem)
        _emit(doc, args.out)
        return EXIT_LIMIT
    doc = _schedule_report(schedule, problem, stats)
    doc["heuristic"] = args.heuristic
    doc["grid_step"] = problem.grid_step
    _emit(doc, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    problem = _load(args)
    try:
        rec = compare(problem, args.heuristic, max_expansions=args.max_expansions,
                      max_seconds=args.max_seconds)
    except SearchLimitError as e:
        _emit({"error": str(e)}, args.out)
        return EXIT_LIMIT
    _emit({
        "E_stoch": rec.e_stoch,
        "E_det_eval": rec.e_det_eval,
        "E_det_model": rec.e_det_model,
        "improvement": rec.improvement,
        "stochastic": _schedule_report(rec.stoch_schedule, problem, rec.stoch_stats),
        "deterministic": _schedule_report(rec.det_schedule, problem, rec.det_stats),
    }, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < 1:
        print(f"error: -n must be >= 1, got {args.n}", file=sys.stderr)
        return EXIT_INVALID
    problem = _load(args)
    ops = load_schedule(args.schedule)
    res = simulate(ops, problem, args.n, args.seed)
    ok, analytic, gap, budget = agrees(ops, problem, res)
    _emit({
        "analytic_expected_penalty": analytic,
        "mc_mean": res.mean,
        "mc_stderr": res.stderr,
        "gap": gap,
        "budget": budget,
        "verdict": "PASS" if ok else "FAIL",
        "n": res.n,
        "seed": res.seed,
        "rng": res.rng,
        "late_frequency": {oid: res.late_frequency(oid) for oid in res.late_counts},
    }, args.out)
    return EXIT_OK


def _genspec(args, **over) -> GenSpec:
    qlo, qhi = (int(x) for x in args.quantity_range.split(":"))
    return GenSpec(
        horizon=args.horizon,
        quantity_range=(qlo, qhi),
        weight_rule=args.weight_rule,
        grid_step=args.grid_step,
        **over,
    )


def _add_gen_flags(p):
    p.add_argument("--horizon", type=float, default=480.0)
    p.add_argument("--quantity-range", default="5:30", metavar="LO:HI")
    p.add_argument("--weight-rule", choices=WEIGHT_RULES, default="per-unit-quantity")
    p.add_argument("--grid-step", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)


def cmd_generate(args) -> int:
    spec = _genspec(args, n_orders=args.orders, target_capacity=args.capacity, seed=args.seed)
    problem = generate(spec)
    if args.out:
        save_problem(problem, args.out)
    else:
        from .fileformat import problem_to_dict
        print(json.dumps(problem_to_dict(problem), indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    orders = parse_range(args.orders, int)
    capacities = parse_range(args.capacities, float)
    base = _genspec(args)
    specs = bench_specs(orders, capacities, args.per_cell, args.seed, base)
    rows = run_bench(specs, args.heuristic, jobs=args.jobs,
                     max_expansions=args.max_expansions, max_seconds=args.max_seconds)
    write_csv(rows, args.out)
    print(format_summary(summarize(rows)))
    print(f"wrote {len(rows)} rows ({', '.join(CSV_COLUMNS)}) to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdastar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal stochastic schedule for a problem file")
    _add_problem_flags(p)
    p.add_argument("--no-prune", action="store_true", help="disable dominance pruning")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="stochastic vs deterministic-means schedule")
    _add_problem_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte-Carlo check of a schedule file")
    p.add_argument("problem")
    p.add_argument("schedule", help="schedule JSON (a solve report works too)")
    p.add_argument("-n", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--w1", type=float, default=None)
    p.add_argument("--w2", type=float, default=None)
    p.add_argument("--w3", type=float, default=None)
    p.add_argument("--weight", action="append", metavar="ORDER=W")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="write a random Nova instance")
    p.add_argument("--orders", type=int, default=8)
    p.add_argument("--capacity", type=float, default=1.1)
    _add_gen_flags(p)
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="capacity sweep; one CSV row per instance")
    p.add_argument("--orders", default="6:10", help="order count or LO:HI range (cycled)")
    p.add_argument("--capacities", default="0.95:1.25:0.05", metavar="LO:HI:STEP")
    p.add_argument("--per-cell", type=int, default=10)
    _add_gen_flags(p)
    p.add_argument("--heuristic", choices=MODES, default="max")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-expansions", type=int, default=None)
    p.add_argument("--max-seconds", type=float, default=None)
    p.add_argument("-o", "--out", default="bench.csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemError as e:
        where = f" [field: {e.field}]" if e.field else ""
        print(f"error: invalid problem: {e}{where}", file=sys.stderr)
        return EXIT_INVALID
    except (ScheduleInvalidError, InvalidParameterError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
