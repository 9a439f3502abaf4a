"""Deterministic-means baseline and stochastic re-evaluation of fixed schedules."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .model import Problem, Schedule, replay
from .search import SearchStats, solve

# relative gap below which two expected penalties count as equal in reports
IMPROVEMENT_EPS = 1e-9


def deterministic_problem(problem: Problem) -> Problem:
    """Same instance with every run and setup time fixed at its mean."""
    products = tuple(replace(p, unit_run_std=0.0, setup_std=0.0) for p in problem.products)
    return replace(problem, products=products)


def evaluate_schedule(operators: Sequence, problem: Problem) -> Schedule:
    """Replay ``operators`` under ``problem``'s (stochastic) laws."""
    return replay(problem, operators)


@dataclass
class ComparisonRecord:
    e_stoch: float
    e_det_eval: float
    e_det_model: float
    stoch_schedule: Schedule
    det_schedule: Schedule
    stoch_stats: SearchStats
    det_stats: SearchStats

    @property
    def improvement(self) -> float:
        """Relative reduction of expected penalty over the deterministic plan."""
        if self.e_det_eval <= 0:
            return 0.0
        return (self.e_det_eval - self.e_stoch) / self.e_det_eval

    @property
    def strictly_improved(self) -> bool:
        return self.e_det_eval - self.e_stoch > IMPROVEMENT_EPS * max(1.0, self.e_det_eval)


def compare(problem: Problem, heuristic: str = "max", *, max_expansions: Optional[int] = None,
            max_seconds: Optional[float] = None) -> ComparisonRecord:
    """Solve stochastically and deterministically; score both plans on the stochastic laws.

    The deterministic plan seeds the stochastic search as its incumbent, so
    the stochastic answer is never worse even when the two plans tie up to
    rounding.
    """
    det, det_stats = solve(deterministic_problem(problem), heuristic,
                           max_expansions=max_expansions, max_seconds=max_seconds)
    det_eval = evaluate_schedule(det.operators, problem)
    stoch, stoch_stats = solve(problem, heuristic, max_expansions=max_expansions,
                               max_seconds=max_seconds, incumbent=det.operators)
    return ComparisonRecord(
        e_stoch=stoch.expected_penalty,
        e_det_eval=det_eval.expected_penalty,
        e_det_model=det.expected_penalty,
        stoch_schedule=stoch,
        det_schedule=det_eval,
        stoch_stats=stoch_stats,
        det_stats=det_stats,
    )
