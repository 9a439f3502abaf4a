"""Stochastic-vs-deterministic benchmark over a capacity sweep."""

from __future__ import annotations

import csv
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Iterable, Optional

from .baseline import compare
from .gen import GenSpec, generate

CSV_VERSION = "sdastar-bench v1"
CSV_COLUMNS = ("seed", "n_orders", "capacity", "E_stoch", "E_det_eval", "improvement",
               "expansions_stoch", "expansions_det", "dominations", "wall_ms", "status")


def parse_range(text: str, cast=float) -> list:
    """``"8"`` -> [8]; ``"6:10"`` -> 6..10 inclusive; ``"0.95:1.25:0.05"`` -> stepped, inclusive."""
    parts = text.split(":")
    if len(parts) == 1:
        return [cast(parts[0])]
    lo, hi = cast(parts[0]), cast(parts[1])
    step = cast(parts[2]) if len(parts) == 3 else cast(1)
    if step <= 0 or hi < lo:
        raise ValueError(f"bad range {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [cast(round(lo + k * step, 10)) for k in range(count)]


def bench_specs(orders: list[int], capacities: list[float], per_cell: int, seed: int = 0,
                base: Optional[GenSpec] = None) -> list[GenSpec]:
    """One spec per (capacity, replicate); order counts cycle through ``orders``."""
    base = base or GenSpec()
    specs = []
    k = 0
    for cap in capacities:
        for _ in range(per_cell):
            specs.append(replace(base, n_orders=orders[k % len(orders)], target_capacity=cap,
                                 seed=seed + k))
            k += 1
    return specs


def run_one(spec: GenSpec, heuristic: str = "max", max_expansions: Optional[int] = None,
            max_seconds: Optional[float] = None) -> dict:
    row = {"seed": spec.seed, "n_orders": spec.n_orders, "capacity": spec.target_capacity}
    t0 = time.perf_counter()
    try:
        rec = compare(generate(spec), heuristic, max_expansions=max_expansions,
                      max_seconds=max_seconds)
    except Exception as e:  # recorded per row; the sweep continues
        row.update({c: "" for c in CSV_COLUMNS if c not in row})
        row["wall_ms"] = round(1000 * (time.perf_counter() - t0), 1)
        row["status"] = f"error: {type(e).__name__}: {e}".replace("\n", " ")
        return row
    row.update({
        "E_stoch": rec.e_stoch,
        "E_det_eval": rec.e_det_eval,
        "improvement": rec.improvement,
        "expansions_stoch": rec.stoch_stats.expansions,
        "expansions_det": rec.det_stats.expansions,
        "dominations": rec.stoch_stats.dominations,
        "wall_ms": round(1000 * (time.perf_counter() - t0), 1),
        # marks rows where the deterministic plan beat the search by rounding only
        "status": "ok:incumbent" if rec.stoch_stats.from_incumbent else "ok",
    })
    return row


def _run_star(args):
    return run_one(*args)


def run_bench(specs: Iterable[GenSpec], heuristic: str = "max", jobs: int = 1,
              max_expansions: Optional[int] = None, max_seconds: Optional[float] = None) -> list[dict]:
    """Rows in spec order regardless of completion order."""
    tasks = [(s, heuristic, max_expansions, max_seconds) for s in specs]
    if jobs <= 1:
        return [_run_star(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_star, tasks))


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {CSV_VERSION}\n")
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({c: r.get(c, "") for c in CSV_COLUMNS})


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def strictly_improved(row: dict) -> bool:
    e_s, e_d = float(row["E_stoch"]), float(row["E_det_eval"])
    return e_d - e_s > 1e-9 * max(1.0, e_d)


def summarize(rows: list[dict]) -> dict:
    """Improvement statistics over over-capacity rows and per-capacity effort."""
    ok = [r for r in rows if r["status"].startswith("ok")]
    over = [r for r in ok if float(r["capacity"]) > 1.0]
    improved = [r for r in over if strictly_improved(r)]
    cells = defaultdict(list)
    for r in ok:
        cells[float(r["capacity"])].append(r)

    def avg(xs):
        xs = list(xs)
        return sum(xs) / len(xs) if xs else float("nan")

    return {
        "rows": len(rows),
        "failed": len(rows) - len(ok),
        "from_incumbent": sum(r["status"] == "ok:incumbent" for r in ok),
        "over_capacity": len(over),
        "strict_fraction": len(improved) / len(over) if over else float("nan"),
        "mean_improvement": avg(float(r["improvement"]) for r in over),
        "mean_improvement_improved": avg(float(r["improvement"]) for r in improved),
        "by_capacity": {
            cap: {
                "n": len(rs),
                "E_stoch": avg(float(r["E_stoch"]) for r in rs),
                "E_det_eval": avg(float(r["E_det_eval"]) for r in rs),
                "expansions_stoch": avg(float(r["expansions_stoch"]) for r in rs),
                "expansions_det": avg(float(r["expansions_det"]) for r in rs),
                "dominations": avg(float(r["dominations"]) for r in rs),
                "strict_fraction": avg(1.0 if strictly_improved(r) else 0.0 for r in rs),
            }
            for cap, rs in sorted(cells.items())
        },
    }


def format_summary(summary: dict) -> str:
    lines = [
        f"instances: {summary['rows']} ({summary['failed']} failed, "
        f"{summary['from_incumbent']} kept the deterministic plan on a rounding tie)",
        f"over-capacity instances: {summary['over_capacity']}",
        f"strictly improved (capacity > 1.0): {summary['strict_fraction']:.3f}",
        f"mean improvement (capacity > 1.0): {summary['mean_improvement']:.3%}",
        f"mean improvement among improved: {summary['mean_improvement_improved']:.3%}",
        "",
        f"{'capacity':>8} {'n':>4} {'E_stoch':>9} {'E_det':>9} {'improved':>8} "
        f"{'exp_stoch':>10} {'exp_det':>10} {'dominations':>11}",
    ]
    for cap, c in summary["by_capacity"].items():
        lines.append(f"{cap:>8.2f} {c['n']:>4} {c['E_stoch']:>9.3f} {c['E_det_eval']:>9.3f} "
                     f"{c['strict_fraction']:>8.2f} {c['expansions_stoch']:>10.1f} "
                     f"{c['expansions_det']:>10.1f} {c['dominations']:>11.1f}")
    return "\n".join(lines)
