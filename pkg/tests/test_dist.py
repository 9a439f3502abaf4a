import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from sdastar import dist
from sdastar.dist import (convolve, dominates, mean, point_mass, prob_greater, prob_sum_greater,
                          truncated_normal)
from sdastar.errors import GridMismatchError, InvalidParameterError


@st.composite
def pmfs(draw, step=0.25, max_len=25):
    n = draw(st.integers(1, max_len))
    w = draw(st.lists(st.floats(1e-3, 1.0), min_size=n, max_size=n))
    off = draw(st.integers(0, 60))
    return dist.from_weights(w, off, step)


def total(f):
    return float(f.weights.sum())


# --- truncated_normal ------------------------------------------------------

def test_truncated_normal_mean_and_support():
    f = truncated_normal(20, 2, 0.25)
    assert abs(mean(f) - 20) < 1e-6
    lo, hi = f.support
    assert lo >= 12 and hi <= 28


def test_truncated_normal_zero_std_is_point_mass():
    f = truncated_normal(5, 0, 0.25)
    assert len(f) == 1 and f.origin == 5.0


def test_truncated_normal_tail_at_four_sigma():
    f = truncated_normal(2.9, 0.2, 0.05)
    expected = norm.sf(4.0)  # ~3.2e-5
    assert abs(prob_greater(f, 3.7) - expected) < 2e-3


def test_truncated_normal_matches_closed_form_cdf():
    # cell masses are exact integrals, so cdf at cell edges matches the
    # renormalized truncated normal cdf
    f = truncated_normal(30, 2, 0.25)
    z = (29.875 - 30) / 2
    exact = (norm.cdf(z) - norm.cdf(-4)) / (norm.cdf(4) - norm.cdf(-4))
    assert f.cdf(29.75) == pytest.approx(exact, abs=1e-12)


@pytest.mark.parametrize("args", [(0, 1, 0.25), (-3, 1, 0.25), (5, 1, 0), (5, -1, 0.25)])
def test_truncated_normal_rejects_bad_parameters(args):
    with pytest.raises(InvalidParameterError):
        truncated_normal(*args)


def test_truncated_normal_has_no_zero_padding():
    for m, s, h in [(2.9, 0.2, 0.05), (15, 0.2, 0.05), (20, 2, 0.25), (3.1, 0.2, 0.25)]:
        f = truncated_normal(m, s, h)
        assert f.weights[0] > 0 and f.weights[-1] > 0
        assert abs(total(f) - 1) < 1e-9


# --- point_mass --------------------------------------------------------------

def test_point_mass_basics():
    assert mean(point_mass(0, 0.25)) == 0
    assert prob_greater(point_mass(470, 0.25), 480) == 0
    assert point_mass(470.1, 0.25).origin == 470.0
    # exact half-way goes to the lower grid point
    assert point_mass(470.125, 0.25).origin == 470.0
    assert mean(point_mass(7)) == 7


def test_point_mass_rejects_negative_time():
    with pytest.raises(InvalidParameterError):
        point_mass(-1.0)


# --- convolve ----------------------------------------------------------------

def test_convolve_point_masses():
    f = convolve(point_mass(5), point_mass(10))
    assert len(f) == 1 and f.origin == 15.0


def test_convolve_mean_additivity():
    f, g = truncated_normal(20, 2), truncated_normal(30, 2)
    assert abs(mean(convolve(f, g)) - mean(f) - mean(g)) < 1e-6


def test_eleven_fold_convolution_moments():
    unit = truncated_normal(20, 2)
    f = unit
    for _ in range(10):
        f = convolve(f, unit)
    assert mean(f) == pytest.approx(220, rel=1e-9)
    assert f.std() == pytest.approx(math.sqrt(44), rel=0.01)
    assert dist.max_abs_diff(f, dist.convolve_power(unit, 11)) < 1e-9


def test_convolve_rejects_mismatched_grids():
    with pytest.raises(GridMismatchError):
        convolve(point_mass(1, 0.25), point_mass(1, 0.5))
    with pytest.raises(GridMismatchError):
        dominates(point_mass(1, 0.25), point_mass(1, 0.5))


def test_convolve_trims_negligible_tails():
    f = truncated_normal(20, 2)
    g = dist.convolve_power(f, 20)
    assert g.weights[0] >= 1e-13 and g.weights[-1] >= 1e-13
    assert abs(total(g) - 1) < 1e-9


# --- prob_greater ------------------------------------------------------------

def test_prob_greater_boundary_is_on_time():
    assert prob_greater(point_mass(480), 480) == 0.0
    assert prob_greater(point_mass(480.25), 480) == 1.0


def test_prob_greater_handles_inexact_grid_multiples():
    # 74 * 0.05 is 3.7000000000000002 in binary floating point
    f = dist.DiscreteDistribution(0.05, 74, np.ones(1))
    assert prob_greater(f, 3.7) == 0.0


def test_prob_sum_greater_matches_convolution():
    f, g = truncated_normal(220, 6, 0.25), truncated_normal(250, 5, 0.25)
    for d in (400, 460, 470, 480, 500):
        a = prob_sum_greater(f, g, d)
        b = prob_greater(convolve(f, g), d)
        assert a == pytest.approx(b, abs=1e-11)


# --- dominates -----------------------------------------------------------------

def test_dominates_examples():
    f = truncated_normal(20, 2)
    assert dominates(f, f)
    assert dominates(point_mass(5), point_mass(10))
    assert not dominates(point_mass(10), point_mass(5))


def test_dominance_fails_both_ways_when_cdfs_cross():
    wide, narrow = truncated_normal(20, 5), truncated_normal(20, 1)
    # closed-form: below the mean the wide law has more mass, above it less
    assert norm.cdf(17, 20, 5) > norm.cdf(17, 20, 1)
    assert norm.cdf(23, 20, 5) < norm.cdf(23, 20, 1)
    assert not dominates(wide, narrow)
    assert not dominates(narrow, wide)


# --- properties ----------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(pmfs(), pmfs())
def test_convolution_normalized_and_commutative(f, g):
    a, b = convolve(f, g), convolve(g, f)
    assert abs(total(a) - 1) < 1e-9
    assert a.offset == b.offset
    assert dist.max_abs_diff(a, b) < 1e-9
    assert abs(mean(a) - mean(f) - mean(g)) < 1e-6


@settings(max_examples=100, deadline=None)
@given(pmfs(max_len=10), pmfs(max_len=10), pmfs(max_len=10))
def test_convolution_associative(f, g, h):
    a = convolve(convolve(f, g), h)
    b = convolve(f, convolve(g, h))
    assert dist.max_abs_diff(a, b) < 1e-9


@settings(max_examples=150, deadline=None)
@given(pmfs(), pmfs(), pmfs(), st.floats(0, 40))
def test_dominance_closure_under_convolution(f, g, h, shift):
    # make f dominate g by shifting g later
    k = int(shift / f.step)
    g_late = dist.DiscreteDistribution(f.step, f.offset + k, f.weights)
    assert dominates(f, g_late)
    assert dominates(convolve(h, f), convolve(h, g_late))
    if dominates(f, g):
        assert dominates(convolve(h, f), convolve(h, g))


@settings(max_examples=150, deadline=None)
@given(pmfs(), pmfs(), st.floats(-5, 80))
def test_dominance_implies_tail_ordering(f, g, d):
    if dominates(f, g):
        assert prob_greater(f, d) <= prob_greater(g, d) + 1e-12


@settings(max_examples=100, deadline=None)
@given(pmfs(max_len=8), pmfs(max_len=8), pmfs(max_len=8))
def test_dominance_is_transitive(f, g, h):
    assert dominates(f, f)
    if dominates(f, g) and dominates(g, h):
        assert dominates(f, h, tol=2e-12)
