"""
Tests for the radii schedules, the band constants and the choice of k0.
"""

import math
import os
import sys

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from src.verifier.errors import ConfigurationError, RangeError
from src.verifier.radii import (
    RadiiSchedule,
    band_constants,
    band_coordinate,
    k0_conditions,
    log_rho,
    double_exponential_closed_forms,
    select_k0,
    select_k0_fallback,
)

DELTA_EPS_01 = 0.0906919


def brute_force_k0(delta: float, k_max: int) -> int:
    """Smallest k whose five conditions hold on all of [k, k_max], from the closed forms."""

    def holds(k: int) -> bool:
        L = lambda j: -math.exp((k + j / 6.0) ** 2)  # noqa: E731
        c = 1.0 + 1.0 / math.expm1(k / 3.0 + 1.0 / 12.0)
        c_tilde = 1.0 + 1.0 / math.expm1(k / 3.0 + 1.0 / 4.0)
        return (
            c <= 1.0 + delta
            and 1.0 / (L(2) - L(3)) <= delta
            and 1.0 / (L(3) - L(4)) <= delta
            and c_tilde <= 1.0 + delta
            and 1.0 / abs(L(0)) <= 0.5
        )

    for k in range(1, k_max + 1):
        if all(holds(j) for j in range(k, k_max + 1)):
            return k
    raise AssertionError("no admissible k")


class TestSchedule:
    def test_paper_preset_values(self):
        s = RadiiSchedule("paper", 12)
        assert log_rho(s, 3) == -math.exp(9.0)
        assert log_rho(s, 8, 3) == -math.exp(8.5 ** 2)
        assert log_rho(s, 12, 6) == log_rho(s, 13, 0) == -math.exp(169.0)

    def test_mild_values(self):
        s = RadiiSchedule("mild", 12)
        assert log_rho(s, 4) == -16.0
        assert log_rho(s, 4, 6) == log_rho(s, 5, 0) == -32.0

    def test_strictly_decreasing(self):
        for preset in ("paper", "mild"):
            s = RadiiSchedule(preset, 10)
            values = [log_rho(s, k, j) for k in range(0, 11) for j in range(6)] + [log_rho(s, 11, 0)]
            assert all(a > b for a, b in zip(values, values[1:])), preset

    def test_out_of_range(self):
        s = RadiiSchedule("paper", 12)
        with pytest.raises(RangeError):
            log_rho(s, 14)
        with pytest.raises(RangeError):
            log_rho(s, 13, 1)
        with pytest.raises(RangeError):
            log_rho(s, 5, 7)

    @pytest.mark.parametrize("preset,k_max", [("nope", 12), ("paper", 1), ("paper", 26), ("mild", 201)])
    def test_invalid_schedule(self, preset, k_max):
        with pytest.raises(ConfigurationError):
            RadiiSchedule(preset, k_max)

    def test_default_k_max(self):
        assert RadiiSchedule().k_max == 12


class TestBandConstants:
    def test_closed_forms_match_ratios(self):
        s = RadiiSchedule("paper", 20)
        for k in range(1, 21):
            bc, ref = band_constants(s, k), double_exponential_closed_forms(k)
            assert abs(bc.c_k - ref.c_k) <= 1e-12 * ref.c_k, k
            assert abs(bc.c_tilde_k - ref.c_tilde_k) <= 1e-12 * ref.c_tilde_k, k

    def test_mild_c_k_is_constant(self):
        s = RadiiSchedule("mild", 20)
        values = [band_constants(s, k).c_k for k in range(1, 21)]
        assert max(values) - min(values) < 1e-12
        assert abs(values[0] - 1.0 / (1.0 - 2.0 ** (-1.0 / 6.0))) < 1e-12

    @pytest.mark.parametrize("k", [2, 5, 8, 11])
    def test_band_coordinate_endpoints(self, k):
        s = RadiiSchedule("paper", 12)
        for j in range(6):
            lo, hi = log_rho(s, k, j + 1), log_rho(s, k, j)
            assert band_coordinate(s, k, j, 0.0) == pytest.approx(hi, rel=1e-12)
            assert band_coordinate(s, k, j, 1.0) == pytest.approx(lo, rel=1e-12)
            mid = band_coordinate(s, k, j, 0.5)
            assert lo < mid < hi

    def test_band_coordinate_inverts_cutoff_argument(self):
        s = RadiiSchedule("mild", 12)
        k = 6
        c = band_constants(s, k)
        for u in (0.1, 0.4, 0.8):
            t = band_coordinate(s, k, 1, u)
            assert c.c_k * (1.0 - log_rho(s, k, 1) / t) == pytest.approx(u, abs=1e-12)
            t = band_coordinate(s, k, 4, u)
            assert c.c_tilde_k * (1.0 - log_rho(s, k, 4) / t) == pytest.approx(u, abs=1e-12)

    def test_band_coordinate_runs_outer_to_inner(self):
        s = RadiiSchedule("mild", 12)
        k = 6
        l2, l3, l4 = log_rho(s, k, 2), log_rho(s, k, 3), log_rho(s, k, 4)
        for u in (0.1, 0.4, 0.8):
            assert (l2 - band_coordinate(s, k, 2, u)) / (l2 - l3) == pytest.approx(u, abs=1e-12)
            # band 3 raises its cutoff from the inner edge
            assert (band_coordinate(s, k, 3, u) - l4) / (l3 - l4) == pytest.approx(1.0 - u, abs=1e-12)
        ts = [band_coordinate(s, k, 3, u) for u in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert all(a > b for a, b in zip(ts, ts[1:]))


class TestK0:
    def test_epsilon_point_one(self):
        s = RadiiSchedule("paper", 12)
        assert select_k0(s, DELTA_EPS_01) == 8
        assert brute_force_k0(DELTA_EPS_01, 12) == 8

    def test_delta_point_two(self):
        s = RadiiSchedule("paper", 12)
        assert select_k0(s, 0.2) == 6
        assert brute_force_k0(0.2, 12) == 6
        cond = k0_conditions(s, 4, 0.2)
        assert not cond.c_bound and not cond.all_hold
        assert cond.as_dict()["a"] is False

    def test_conditions_monotone_above_k0(self):
        s = RadiiSchedule("paper", 12)
        assert all(k0_conditions(s, k, DELTA_EPS_01).all_hold for k in range(8, 13))
        assert not k0_conditions(s, 7, DELTA_EPS_01).all_hold

    def test_mild_has_no_admissible_k0(self):
        s = RadiiSchedule("mild", 12)
        with pytest.raises(ConfigurationError):
            select_k0(s, DELTA_EPS_01)
        assert select_k0_fallback(s, DELTA_EPS_01) == 7
        assert k0_conditions(s, 7, DELTA_EPS_01).fallback_hold

    def test_no_usable_k0(self):
        s = RadiiSchedule("mild", 3)
        with pytest.raises(ConfigurationError):
            select_k0_fallback(s, 1e-4)

    @pytest.mark.parametrize("k_max", [15, 25])
    @pytest.mark.parametrize("delta,expected", [(DELTA_EPS_01, 8), (0.2, 6)])
    def test_k0_stable_under_larger_k_max(self, k_max, delta, expected):
        s = RadiiSchedule("paper", k_max)
        assert select_k0(s, delta) == expected
        assert brute_force_k0(delta, k_max) == expected
        assert all(k0_conditions(s, k, delta).all_hold for k in range(expected, k_max + 1))
