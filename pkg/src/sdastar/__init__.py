"""Optimal stochastic lot-sizing schedules via stochastic-dominance A*."""

__version__ = "0.1.0"
