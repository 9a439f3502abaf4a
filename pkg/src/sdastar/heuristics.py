"""Lower bounds on the expected penalty still to be accrued from a node.

Both bounds take the path's time law into account, not just the state.
"""

from __future__ import annotations

import numpy as np

from . import dist
from .model import PathCost, Problem, State, increment_time

MODES = ("zero", "parallel", "fractional", "max")


def h_zero(state: State, cost: PathCost, problem: Problem) -> float:
    return 0.0


def h_parallel(state: State, cost: PathCost, problem: Problem) -> float:
    """Penalty each unshipped order would incur if it were processed next.

    Every order's shipping time is at least the current time plus the work
    it alone still needs (its setup, when the machine is set for another
    product and units remain to be made), so summing the per-order lateness
    under that relaxation never overestimates.
    """
    pidx = problem.product_index
    total = 0.0
    for k, o in enumerate(problem.orders):
        if state.shipped[k] or o.weight == 0:
            continue
        missing = max(0, o.quantity - state.inventory[pidx[o.product]])
        if missing == 0:
            late = dist.prob_greater(cost.time, o.deadline)
        else:
            inc = increment_time(problem, o.product, missing, state.setup != o.product)
            late = dist.prob_sum_greater(cost.time, inc, o.deadline)
        total += o.weight * late
    return total


def h_fractional(state: State, cost: PathCost, problem: Problem) -> float:
    """Greedy fractional-knapsack bound over the earliest remaining deadline.

    Orders sharing the earliest unshipped deadline are served in decreasing
    weight per expected minute of remaining work, setups ignored, the last
    one split fractionally; later deadlines contribute nothing. The fill is
    done separately for every atom of the current time law.
    """
    pidx = problem.product_index
    pending = [(k, o) for k, o in enumerate(problem.orders) if not state.shipped[k]]
    if not pending:
        return 0.0
    d = min(o.deadline for _, o in pending)
    jobs = []
    for k, o in pending:
        if o.deadline != d or o.weight == 0:
            continue
        missing = max(0, o.quantity - state.inventory[pidx[o.product]])
        work = missing * problem.product(o.product).unit_run_mean
        jobs.append((k, o.weight, work))
    if not jobs:
        return 0.0

    # zero-work jobs are always served; the rest fill in density order
    positive = [j for j in jobs if j[2] > 0]
    if not positive:
        return 0.0
    positive.sort(key=lambda j: (-j[1] / j[2], j[2], j[0]))
    cum_work = np.concatenate(([0.0], np.cumsum([j[2] for j in positive])))
    cum_served = np.concatenate(([0.0], np.cumsum([j[1] for j in positive])))
    capacity = np.maximum(0.0, d - cost.time.grid)
    served = np.interp(capacity, cum_work, cum_served)
    penalty = cum_served[-1] - served
    return max(0.0, float(np.dot(cost.time.weights, penalty)))


def h_max(state: State, cost: PathCost, problem: Problem) -> float:
    return max(h_parallel(state, cost, problem), h_fractional(state, cost, problem))


_BY_MODE = {
    "zero": h_zero,
    "parallel": h_parallel,
    "fractional": h_fractional,
    "max": h_max,
}


def get_heuristic(mode: str):
    try:
        return _BY_MODE[mode]
    except KeyError:
        raise ValueError(f"unknown heuristic mode {mode!r}; expected one of {MODES}") from None
