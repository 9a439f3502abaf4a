"""Probability mass functions over elapsed time on a uniform minute grid.

Every distribution used in one solve shares the same ``step``. Grid points
are integer multiples of the step, so a distribution is stored as an integer
``offset`` (index of its first atom) plus a weight vector. Keeping positions
as integers makes convolution, dominance and tail queries exact with respect
to grid alignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import ndtr

from .errors import GridMismatchError, InvalidParameterError

DEFAULT_STEP = 0.25
TRIM_TOL = 1e-12
DOMINANCE_TOL = 1e-12
TRUNCATION_SIGMAS = 4.0

# absorbs float error when mapping a time in minutes onto a grid index
_INDEX_EPS = 1e-9


def grid_index(t: float, step: float) -> int:
    """Index of the grid point nearest ``t``; exact halves go to the lower point."""
    return math.ceil(t / step - 0.5 - _INDEX_EPS)


def _floor_index(t: float, step: float) -> int:
    # largest k with k*step <= t, tolerant of representation error
    return math.floor(t / step + _INDEX_EPS)


def _same_step(a: float, b: float) -> bool:
    return a == b or math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Nonnegative random time, as masses on consecutive grid points.

    The atom ``weights[k]`` sits at ``(offset + k) * step`` minutes.
    Instances are immutable; construct them through the module helpers,
    which normalize and strip zero padding.
    """

    step: float
    offset: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def origin(self) -> float:
        """Time of the first atom, in minutes."""
        return self.offset * self.step

    @property
    def end(self) -> int:
        """Grid index of the last atom."""
        return self.offset + len(self.weights) - 1

    @property
    def support(self) -> tuple[float, float]:
        return self.origin, self.end * self.step

    @cached_property
    def grid(self) -> np.ndarray:
        return (self.offset + np.arange(len(self.weights))) * self.step

    @cached_property
    def tail_sums(self) -> np.ndarray:
        # tail_sums[k] = P(atom index >= k), with a trailing 0
        out = np.zeros(len(self.weights) + 1)
        out[:-1] = np.cumsum(self.weights[::-1])[::-1]
        return out

    def cdf(self, t: float) -> float:
        return 1.0 - prob_greater(self, t)

    def std(self) -> float:
        m = mean(self)
        return float(math.sqrt(max(0.0, np.dot(self.weights, (self.grid - m) ** 2))))

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        lo, hi = self.support
        return (f"DiscreteDistribution(step={self.step}, support=[{lo:g}, {hi:g}], "
                f"atoms={len(self.weights)}, mean={mean(self):.6g})")


def from_weights(weights, offset: int, step: float, trim: float = 0.0) -> DiscreteDistribution:
    """Normalize ``weights`` and drop (near-)empty tails.

    With ``trim > 0`` leading/trailing atoms whose cumulative mass stays
    below ``trim`` are removed before renormalizing.
    """
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    w = np.clip(np.asarray(weights, dtype=np.float64), 0.0, None)
    total = w.sum()
    if not total > 0:
        raise InvalidParameterError("distribution has no mass")
    w = w / total
    if trim > 0:
        left = np.cumsum(w)
        right = np.cumsum(w[::-1])
        lo = int(np.searchsorted(left, trim, side="left"))
        hi = len(w) - int(np.searchsorted(right, trim, side="left"))
    else:
        nz = np.flatnonzero(w)
        lo, hi = int(nz[0]), int(nz[-1]) + 1
    if lo > 0 or hi < len(w):
        w = w[lo:hi]
        w = w / w.sum()
    return DiscreteDistribution(step=step, offset=offset + lo, weights=w)


def point_mass(t: float, step: float = DEFAULT_STEP) -> DiscreteDistribution:
    if t < 0:
        raise InvalidParameterError(f"point mass must sit at t >= 0, got {t}")
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    return DiscreteDistribution(step=step, offset=grid_index(t, step), weights=np.ones(1))


def truncated_normal(mean: float, std: float, step: float = DEFAULT_STEP) -> DiscreteDistribution:
    """Normal(mean, std) truncated at +-4 std, discretized onto the grid.

    The atom at grid point ``t`` carries the density integrated over
    ``[t - step/2, t + step/2)`` intersected with the truncation window.
    Negative times are cut off as well. ``std == 0`` gives a point mass.
    """
    if not mean > 0:
        raise InvalidParameterError(f"mean must be positive, got {mean}")
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    if std < 0:
        raise InvalidParameterError(f"std must be nonnegative, got {std}")
    if std == 0:
        return point_mass(mean, step)
    lo = max(0.0, mean - TRUNCATION_SIGMAS * std)
    hi = mean + TRUNCATION_SIGMAS * std
    k_lo, k_hi = grid_index(lo, step), grid_index(hi, step)
    ks = np.arange(k_lo, k_hi + 1)
    left = np.maximum((ks - 0.5) * step, lo)
    right = np.minimum((ks + 0.5) * step, hi)
    mass = ndtr((right - mean) / std) - ndtr((left - mean) / std)
    return from_weights(mass, k_lo, step)


def _check_steps(f: DiscreteDistribution, g: DiscreteDistribution):
    if not _same_step(f.step, g.step):
        raise GridMismatchError(f"grid steps differ: {f.step} vs {g.step}")


def convolve(f: DiscreteDistribution, g: DiscreteDistribution) -> DiscreteDistribution:
    """Law of the sum of independent ``f`` and ``g``."""
    _check_steps(f, g)
    if len(f) == 1:
        return DiscreteDistribution(f.step, f.offset + g.offset, g.weights)
    if len(g) == 1:
        return DiscreteDistribution(f.step, f.offset + g.offset, f.weights)
    w = np.convolve(f.weights, g.weights)
    return from_weights(w, f.offset + g.offset, f.step, trim=TRIM_TOL)


def convolve_power(f: DiscreteDistribution, n: int) -> DiscreteDistribution:
    """n-fold self-convolution (binary powering)."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    result = None
    base = f
    while n:
        if n & 1:
            result = base if result is None else convolve(result, base)
        n >>= 1
        if n:
            base = convolve(base, base)
    return result


def prob_greater(f: DiscreteDistribution, d: float) -> float:
    """P(X > d). An atom sitting exactly on ``d`` counts as on time."""
    start = _floor_index(d, f.step) - f.offset + 1
    if start <= 0:
        return 1.0
    if start >= len(f):
        return 0.0
    return float(f.tail_sums[start])


def prob_sum_greater(f: DiscreteDistribution, g: DiscreteDistribution, d: float) -> float:
    """P(X + Y > d) for independent X ~ f, Y ~ g, without forming the sum.

    Untrimmed, so it may differ from ``prob_greater(convolve(f, g), d)``
    by at most the trim tolerance.
    """
    _check_steps(f, g)
    kd = _floor_index(d, f.step)
    # for an f-atom at index i the sum is late iff the g-index exceeds kd - i
    j0 = kd - (f.offset + np.arange(len(f))) - g.offset + 1
    np.clip(j0, 0, len(g), out=j0)
    return float(np.dot(f.weights, g.tail_sums[j0]))


def _aligned_cdfs(f: DiscreteDistribution, g: DiscreteDistribution):
    lo = min(f.offset, g.offset)
    hi = max(f.end, g.end)
    n = hi - lo + 1
    cf = np.zeros(n)
    cg = np.zeros(n)
    cf[f.offset - lo:f.offset - lo + len(f)] = f.weights
    cg[g.offset - lo:g.offset - lo + len(g)] = g.weights
    return np.cumsum(cf), np.cumsum(cg)


def dominates(f: DiscreteDistribution, g: DiscreteDistribution, tol: float = DOMINANCE_TOL) -> bool:
    """First-order stochastic dominance: ``f`` is stochastically no later than ``g``.

    True iff CDF_f(z) >= CDF_g(z) - tol at every grid point of either support.
    """
    _check_steps(f, g)
    # cheap rejections before the full sweep
    if f.offset > g.offset and g.weights[0] > tol:
        return False
    if f.end > g.end and f.weights[-1] > tol:
        return False
    cf, cg = _aligned_cdfs(f, g)
    return bool(np.all(cf >= cg - tol))


def mean(f: DiscreteDistribution) -> float:
    return float(np.dot(f.weights, f.grid))


def max_abs_diff(f: DiscreteDistribution, g: DiscreteDistribution) -> float:
    """Largest pointwise PMF difference after aligning the two supports."""
    _check_steps(f, g)
    lo = min(f.offset, g.offset)
    n = max(f.end, g.end) - lo + 1
    a = np.zeros(n)
    b = np.zeros(n)
    a[f.offset - lo:f.offset - lo + len(f)] = f.weights
    b[g.offset - lo:g.offset - lo + len(g)] = g.weights
    return float(np.max(np.abs(a - b)))
