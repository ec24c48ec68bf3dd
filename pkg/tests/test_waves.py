"""Shooting profiles, the minimal speed, and wave samplers."""
from __future__ import annotations

import numpy as np
import pytest

import satspread as ss

from oracles import C_STAR_LINEAR_1D, c_star_quadrature_root


def test_frozen_oracle_value_regenerates():
    assert abs(c_star_quadrature_root() - C_STAR_LINEAR_1D) <= 1e-9


class TestShootProfile:
    def test_tail_is_exact_exponential_decay(self, linear_g, front_profile_1d):
        wave = ss.shoot_profile(1.0, linear_g, front_profile_1d, s_max=2.0)
        tail = wave.s >= 1.0
        s_tail = wave.s[tail]
        phi_ell = wave.phi_at_ell
        expected = phi_ell * np.exp(-(s_tail - 1.0) / 1.0)
        assert np.max(np.abs(wave.phi[tail] - expected)) <= 1e-10

    def test_fast_profile_stays_above_napkin_bound(self, linear_g, front_profile_1d):
        wave = ss.shoot_profile(2.0, linear_g, front_profile_1d, s_max=1.0)
        assert wave.phi_at_ell > 0.0
        assert wave.phi_at_ell >= 1.0 - 1.0 * linear_g.sup / 2.0 - 1e-12

    def test_slow_profile_goes_negative_at_ell(self, linear_g, front_profile_1d):
        wave = ss.shoot_profile(0.2, linear_g, front_profile_1d, s_max=1.0)
        assert wave.phi_at_ell < 0.0
        assert wave.sign_at_ell == -1

    def test_single_crossing_below_minimal_speed(self, linear_g, front_profile_1d):
        wave = ss.shoot_profile(0.35, linear_g, front_profile_1d, s_max=1.0)
        inside = (wave.s > 0) & (wave.s < 1.0)
        if np.any(wave.phi[inside] <= 0.0):
            assert wave.phi_at_ell < 0.0

    def test_derivative_strictly_negative_on_nonnegative_part(
            self, linear_g, front_profile_1d, c_star_result):
        wave = ss.shoot_profile(c_star_result.c_star, linear_g,
                                front_profile_1d, s_max=1.0)
        keep = wave.phi >= 0.0
        assert np.all(np.diff(wave.phi[keep]) < 0.0)

    def test_fourth_order_refinement_ratio(self, linear_g, front_profile_1d):
        c = 0.6
        values = [ss.shoot_profile(c, linear_g, front_profile_1d, s_max=1.0,
                                   ode_step=1.0 / n).phi_at_ell
                  for n in (200, 400, 800)]
        d1 = values[0] - values[1]
        d2 = values[1] - values[2]
        assert d2 != 0.0
        assert 10.0 <= d1 / d2 <= 24.0

    def test_preconditions(self, linear_g, front_profile_1d):
        with pytest.raises(ValueError):
            ss.shoot_profile(-1.0, linear_g, front_profile_1d)
        with pytest.raises(ValueError):
            ss.shoot_profile(1.0, linear_g, front_profile_1d, s_max=0.5)
        with pytest.raises(ValueError):
            ss.shoot_profile(1.0, linear_g, front_profile_1d, ode_step=0.25)


class TestFindCStar:
    def test_matches_independent_oracle(self, c_star_result):
        rel = abs(c_star_result.c_star - C_STAR_LINEAR_1D) / C_STAR_LINEAR_1D
        assert rel <= 1e-6

    def test_bracket_and_bounds_invariants(self, c_star_result):
        lo, hi = c_star_result.bracket
        assert hi - lo <= c_star_result.tol
        assert c_star_result.c_star == pytest.approx(0.5 * (lo + hi))
        b_lo, b_hi = c_star_result.analytic_bounds
        assert b_lo == pytest.approx(0.25, abs=1e-12)
        assert b_hi == pytest.approx(1.0, abs=1e-12)
        assert b_lo <= c_star_result.c_star <= b_hi
        assert c_star_result.phi_ell_lo < 0.0 < c_star_result.phi_ell_hi
        assert c_star_result.interior_min > 0.0

    def test_doubling_growth_doubles_speed(self, linear_g, front_profile_1d,
                                           c_star_result):
        doubled = ss.find_c_star(ss.linear_growth(2.0), front_profile_1d)
        assert abs(doubled.c_star - 2.0 * c_star_result.c_star) <= 1e-6

    def test_growth_without_cap_rejected(self, front_profile_1d):
        with pytest.raises(ValueError, match="cap"):
            ss.find_c_star(ss.logistic_growth(1.0, 1.2), front_profile_1d)


class TestMonotoneInC:
    def test_equal_speeds_give_zero_gap(self, linear_g, front_profile_1d):
        with pytest.raises(ValueError):
            ss.monotone_in_c_check(0.5, 0.5, linear_g, front_profile_1d)

    def test_strict_ordering_above_minimal_speed(self, linear_g,
                                                 front_profile_1d,
                                                 c_star_result):
        c = c_star_result.c_star
        ordered, gap = ss.monotone_in_c_check(c, 2 * c, linear_g,
                                              front_profile_1d)
        assert ordered and gap > 0.0

    def test_small_speed_increment_still_strict(self, linear_g,
                                                front_profile_1d,
                                                c_star_result):
        c = c_star_result.c_star
        ordered, gap = ss.monotone_in_c_check(c, 1.01 * c, linear_g,
                                              front_profile_1d)
        assert ordered and gap > 0.0


class TestExportWave:
    def test_sampler_values_at_landmarks(self, minimal_wave):
        sampler = ss.export_wave(minimal_wave, [1.0], 3.0)
        x = np.array([3.0, 2.0, 4.0, 10.0])
        vals = sampler(x)
        assert vals[0] == 1.0          # at the offset the profile starts at 1
        assert vals[1] == 1.0          # behind the front
        assert vals[3] == 0.0          # far ahead
        assert vals[2] == pytest.approx(float(ss.sample_wave(minimal_wave, 1.0)),
                                        abs=1e-12)

    def test_minimal_profile_vanishes_at_support_edge(self, minimal_wave):
        sampler = ss.export_wave(minimal_wave, [1.0], 0.0)
        assert sampler(np.array([1.0]))[0] == 0.0

    def test_large_negative_offset_dominates_compact_data(self, minimal_wave):
        sampler = ss.export_wave(minimal_wave, [1.0], 5.0)
        x = np.linspace(-4.0, 4.0, 101)
        u0 = np.clip(1.0 - np.abs(x), 0.0, 1.0)
        assert np.all(sampler(x) >= u0)

    def test_direction_must_be_unit(self, minimal_wave):
        with pytest.raises(ValueError):
            ss.export_wave(minimal_wave, [2.0], 0.0)

    def test_planar_sampler_in_two_dimensions(self, minimal_wave):
        e = np.array([1.0, 0.0])
        sampler = ss.export_wave(minimal_wave, e, 0.0)
        pts = np.array([[-1.0, 3.0], [0.5, -2.0], [2.0, 0.0]])
        vals = sampler(pts)
        assert vals[0] == 1.0
        assert 0.0 < vals[1] < 1.0
        assert vals[2] == 0.0
