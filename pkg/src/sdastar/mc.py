"""Monte-Carlo estimate of a fixed schedule's expected penalty.

Run and setup times are drawn from the continuous truncated normals, not
from the discretized grid, so the estimate is independent of the
convolution arithmetic it is used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dist
from .errors import InvalidParameterError
from .model import Make, Problem, Setup, Ship, replay

RNG_ALGORITHM = "numpy.random.Generator(PCG64)"
_CHUNK = 50_000


@dataclass
class SimulationResult:
    mean: float
    stderr: float
    late_counts: dict
    n: int
    seed: int
    rng: str = RNG_ALGORITHM

    def late_frequency(self, order_id: str) -> float:
        return self.late_counts[order_id] / self.n


def _truncated_normal_samples(rng, mean, std, size):
    if std == 0:
        return np.full(size, float(mean))
    lo = max(0.0, mean - dist.TRUNCATION_SIGMAS * std)
    hi = mean + dist.TRUNCATION_SIGMAS * std
    x = rng.normal(mean, std, size)
    bad = (x < lo) | (x > hi)
    while bad.any():
        x[bad] = rng.normal(mean, std, int(bad.sum()))
        bad = (x < lo) | (x > hi)
    return x


def _sum_of_units(rng, mean, std, q, n):
    if std == 0:
        return np.full(n, q * float(mean))
    total = np.zeros(n)
    for _ in range(q):
        total += _truncated_normal_samples(rng, mean, std, n)
    return total


def simulate(operators: Sequence, problem: Problem, n: int, seed: int = 0) -> SimulationResult:
    """Sample ``n`` executions of ``operators`` and average the weighted tardiness."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    replay(problem, operators)  # legality check only
    rng = np.random.default_rng(seed)
    late_counts = {o.id: 0 for o in problem.orders}
    penalty_sum = 0.0
    penalty_sq = 0.0
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        clock = np.zeros(m)
        penalty = np.zeros(m)
        for op in operators:
            if isinstance(op, Make):
                p = problem.product(op.product)
                clock += _sum_of_units(rng, p.unit_run_mean, p.unit_run_std, op.quantity, m)
            elif isinstance(op, Setup):
                p = problem.product(op.product)
                clock += _truncated_normal_samples(rng, p.setup_mean, p.setup_std, m)
            elif isinstance(op, Ship):
                o = problem.order(op.order)
                late = clock > o.deadline
                late_counts[o.id] += int(late.sum())
                penalty += o.weight * late
        penalty_sum += float(penalty.sum())
        penalty_sq += float(penalty @ penalty)
        done += m
    mean = penalty_sum / n
    var = max(0.0, (penalty_sq - n * mean * mean) / (n - 1)) if n > 1 else 0.0
    return SimulationResult(mean, math.sqrt(var / n), late_counts, n, seed)


def discretization_allowance(operators: Sequence, problem: Problem) -> float:
    """Bias budget of the grid: half a step times total weight times peak density.

    Uses the largest per-step density of the time law at any ship.
    """
    sched = replay(problem, operators)
    if not sched.per_order:
        return 0.0
    peak = max(float(oc.ship_time.weights.max()) for oc in sched.per_order.values())
    return 0.5 * problem.grid_step * problem.total_weight * (peak / problem.grid_step)


def agrees(operators: Sequence, problem: Problem, result: SimulationResult, sigmas: float = 3.0):
    """(passes, analytic, gap, budget) for the analytic-vs-sampled check."""
    analytic = replay(problem, operators).expected_penalty
    budget = sigmas * result.stderr + discretization_allowance(operators, problem)
    gap = abs(analytic - result.mean)
    return gap <= budget + 1e-12, analytic, gap, budget
