"""
Tests for the cutoff chi_delta: boundary values, monotonicity, the slope bound
and the two comparison inequalities, plus the choice of delta.
"""

import math
import os
import sys

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from src.verifier.errors import ConfigurationError
from src.verifier.mollifier import (
    BUMP_MASS,
    CORNER_CACHE_SIZE,
    CutoffProfile,
    bump,
    chi,
    chi_prime,
    chi_second,
    corner_moments,
    select_delta,
)

DELTAS = [0.01, 0.09, 0.2, 0.24]
GRID = np.linspace(-0.05, 1.05, 10_001)


@pytest.fixture(scope="module", params=DELTAS)
def profile(request):
    return CutoffProfile(request.param)


def test_bump_mass_matches_mpmath():
    mpmath.mp.dps = 50
    ref = mpmath.quad(lambda y: mpmath.exp(-1 / (1 - y * y)), [-1, 0, 1])
    assert abs(BUMP_MASS - float(ref)) < 1e-12
    assert bump(1.0) == 0.0 and bump(-1.5) == 0.0


def test_boundary_values(profile):
    assert chi(profile, 0.0) == 0.0
    assert chi(profile, -3.0) == 0.0
    assert chi(profile, 1.0) == 1.0
    assert chi(profile, 7.0) == 1.0
    assert abs(chi(profile, 0.5) - 0.5) < 1e-12


def test_range_and_monotone(profile):
    values = np.array([chi(profile, s) for s in GRID])
    assert values.min() >= 0.0 and values.max() <= 1.0
    assert np.all(np.diff(values) >= -1e-12), "chi must be non-decreasing"


def test_derivative_support_and_sup(profile):
    slopes = np.array([chi_prime(profile, s) for s in GRID])
    assert slopes.min() >= 0.0
    outside = (GRID <= 0.0) | (GRID >= 1.0)
    assert np.all(slopes[outside] == 0.0)
    assert abs(slopes.max() - (1.0 + profile.delta)) < 1e-10
    assert abs(chi_prime(profile, 0.5) - (1.0 + profile.delta)) < 1e-10


def test_comparison_inequalities(profile):
    d = profile.delta
    for s in GRID:
        if 0.0 <= s <= 0.5:
            assert chi(profile, s) <= s + 1e-12, f"chi({s}) > s for delta={d}"
        elif 0.5 <= s <= 1.0:
            assert chi(profile, s) <= (1.0 + d) * s - d / 2.0 + 1e-12, f"upper comparison fails at {s}"


def test_symmetry(profile):
    for s in np.linspace(0.0, 1.0, 101):
        assert abs(chi(profile, s) + chi(profile, 1.0 - s) - 1.0) < 1e-12


def test_derivatives_match_finite_differences(profile):
    h = 1e-6
    a = profile.plateau
    for s in [a - 0.5 * profile.bump_radius, a, a + 0.2 * profile.bump_radius, 0.3, 1.0 - a]:
        fd = (chi(profile, s + h) - chi(profile, s - h)) / (2 * h)
        assert abs(fd - chi_prime(profile, s)) < 1e-5 * (1.0 + profile.delta)
        fd2 = (chi_prime(profile, s + h) - chi_prime(profile, s - h)) / (2 * h)
        assert abs(fd2 - chi_second(profile, s)) < 1e-3 * max(1.0, abs(chi_second(profile, s)))



def test_first_derivative_at_random_points(profile):
    a, d = profile.plateau, profile.bump_radius
    rng = np.random.default_rng(11)
    points = np.concatenate([
        rng.uniform(a - d, a + d, 40),
        rng.uniform(1.0 - a - d, 1.0 - a + d, 40),
        rng.uniform(0.0, 1.0, 20),
    ])
    # fourth-order central difference; truncation scales as (h / bump_radius)^4
    h = 0.002 * d
    for s in points:
        fd = (8.0 * (chi(profile, s + h) - chi(profile, s - h)) - (chi(profile, s + 2 * h) - chi(profile, s - 2 * h))) / (12.0 * h)
        assert abs(fd - chi_prime(profile, s)) <= 1e-8 * profile.slope, f"s={s} delta={profile.delta}"


def test_corner_cache_is_bounded():
    profile = CutoffProfile(0.05)
    for s in np.linspace(profile.plateau - profile.bump_radius, profile.plateau + profile.bump_radius, 200)[1:-1]:
        chi(profile, s)
    info = corner_moments.cache_info()
    assert info.maxsize == CORNER_CACHE_SIZE
    assert info.currsize <= CORNER_CACHE_SIZE


@given(st.floats(min_value=1e-6, max_value=10.0))
@settings(max_examples=100)
def test_select_delta_constraints(epsilon):
    d = select_delta(epsilon)
    assert 0.0 < d < 0.25
    assert d * d + d <= epsilon


def test_select_delta_reference_value():
    assert abs(select_delta(0.1) - 0.0906919) < 1e-6


@pytest.mark.parametrize("epsilon", [0.0, -1.0, math.inf, math.nan])
def test_select_delta_rejects(epsilon):
    with pytest.raises(ConfigurationError):
        select_delta(epsilon)


@pytest.mark.parametrize("delta", [0.0, 0.25, -0.1, 0.3])
def test_profile_rejects_delta(delta):
    with pytest.raises(ConfigurationError):
        CutoffProfile(delta)
