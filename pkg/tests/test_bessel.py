"""Log-space Bessel evaluation and the ratio-bound certifications.

mpmath at 40 digits is the ground-truth oracle for log I_n(t); the two
internal evaluation regimes (ascending series, normalized backward
recurrence) are additionally compared against each other on an overlap
grid, and classical identities (three-term recurrence, normalization,
order symmetry) serve as self-checks.
"""

import math

import mpmath
import numpy as np
import pytest

from hwicheck.bessel import (
    BesselEvaluator,
    UnimodalSymmetricLaw,
    binomial_law,
    check_amos_bound,
    check_f_monotonicity,
    check_ratio_bound,
    check_unimodal_expectation,
    f_value,
    h_oddness_residual,
    log_bessel_i,
    normalization_defect,
    point_mass_law,
    uniform_window_law,
)
from hwicheck.bessel import _log_i_series, _miller_table

mpmath.mp.dps = 40


def mp_log_i(n: int, t: float) -> float:
    return float(mpmath.log(mpmath.besseli(n, mpmath.mpf(t))))


class TestLogBesselI:
    def test_zero_time(self):
        assert log_bessel_i(0, 0.0) == 0.0
        assert log_bessel_i(1, 0.0) == -math.inf
        assert log_bessel_i(-3, 0.0) == -math.inf

    def test_negative_time(self):
        with pytest.raises(ValueError):
            log_bessel_i(0, -1.0)

    @pytest.mark.parametrize("t", [1e-3, 0.1, 1.0, 10.0, 100.0, 1000.0])
    @pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 60, 200])
    def test_against_mpmath(self, n, t):
        got = log_bessel_i(n, t)
        want = mp_log_i(n, t)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_order_symmetry(self):
        for n in (1, 4, 9):
            for t in (0.3, 7.0, 80.0):
                assert log_bessel_i(-n, t) == log_bessel_i(n, t)

    @pytest.mark.parametrize("t", [5.0, 16.0, 40.0, 120.0, 300.0])
    def test_regime_overlap_agreement(self, t):
        # series and normalized backward recurrence must agree to 1e-11
        table = _miller_table(t, 64)
        for n in range(0, 65, 4):
            series = _log_i_series(n, t)
            assert series == pytest.approx(table[n], rel=1e-11, abs=1e-11)

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0, 100.0])
    def test_three_term_recurrence(self, t):
        # I_{n-1} - I_{n+1} = (2n/t) I_n, checked in linear space
        for n in range(1, 40):
            a = math.exp(log_bessel_i(n - 1, t))
            b = math.exp(log_bessel_i(n + 1, t))
            c = math.exp(log_bessel_i(n, t))
            assert a - b == pytest.approx(2 * n / t * c, rel=1e-10)

    @pytest.mark.parametrize("t", [0.05, 0.7, 3.0, 30.0, 250.0])
    def test_normalization_identity(self, t):
        # e^{-t} sum_{n in Z} I_n(t) = 1, window by tail bound
        assert abs(normalization_defect(t)) < 1e-10

    @pytest.mark.parametrize("t", [0.2, 2.0, 25.0])
    def test_strictly_decreasing_in_order(self, t):
        vals = [log_bessel_i(n, t) for n in range(0, 120)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestBesselEvaluator:
    def test_table_matches_scalar(self):
        ev = BesselEvaluator(max_order=50, t=3.7)
        for n in (0, 1, 17, 50):
            assert ev.log_i(n) == pytest.approx(log_bessel_i(n, 3.7), abs=1e-12)

    def test_negative_order_lookup(self):
        ev = BesselEvaluator(max_order=10, t=1.5)
        assert ev.log_i(-7) == ev.log_i(7)

    def test_order_beyond_table(self):
        ev = BesselEvaluator(max_order=5, t=1.0)
        with pytest.raises(ValueError):
            ev.log_i(6)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            BesselEvaluator(max_order=5, t=-1.0)
        with pytest.raises(ValueError):
            BesselEvaluator(max_order=-1, t=1.0)


class TestRatioBound:
    def test_d_zero_margin_is_n_over_t(self):
        # both logs cancel exactly; the right side is -(n/t), so the margin
        # is n/t, exactly 0.0 only at n = 0
        assert check_ratio_bound(0, 0, 2.0) == 0.0
        for n, t in ((1, 2.0), (7, 0.5), (40, 9.0)):
            assert check_ratio_bound(n, 0, t) == pytest.approx(n / t, rel=1e-12)

    def test_symmetry_point_margin_exactly_zero(self):
        # n = d/2: I_{d/2} / I_{|d/2 - d|} = 1 and (d - 2n) = 0
        for d in (2, 4, 10, 60):
            for t in (0.1, 1.0, 10.0):
                assert check_ratio_bound(d // 2, d, t) == 0.0

    def test_precondition_violations(self):
        with pytest.raises(ValueError):
            check_ratio_bound(1, 3, 1.0)  # n < d/2
        with pytest.raises(ValueError):
            check_ratio_bound(1, -1, 1.0)
        with pytest.raises(ValueError):
            check_ratio_bound(1, 1, 0.0)

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0, 100.0])
    def test_grid_margins_nonnegative(self, t):
        # subset of the acceptance grid
        for n in range(0, 81, 5):
            for d in range(0, 2 * n + 1, 3):
                assert check_ratio_bound(n, d, t) >= -1e-12

    def test_oracle_spot_values(self):
        # margin recomputed from mpmath directly
        n, d, t = 9, 5, 2.5
        want = (
            mp_log_i(n, t)
            - mp_log_i(abs(n - d), t)
            - (1 + d) * (d - 2 * n) / (2 * t)
        )
        assert check_ratio_bound(n, d, t) == pytest.approx(want, rel=1e-11)


class TestAmosBound:
    @pytest.mark.parametrize("t", [0.1, 0.5, 2.0, 20.0, 100.0])
    def test_grid_margins_nonnegative(self, t):
        for n in range(0, 201, 7):
            assert check_amos_bound(n, t) >= -1e-12

    def test_large_t_margin_vanishes(self):
        assert 0.0 <= check_amos_bound(0, 1e4) < 1e-3

    def test_n0_t1_value(self):
        # I_1(1)/I_0(1) > sqrt(2) - 1
        ratio = math.exp(log_bessel_i(1, 1.0) - log_bessel_i(0, 1.0))
        assert ratio > math.sqrt(2) - 1
        assert check_amos_bound(0, 1.0) > 0

    def test_validation(self):
        with pytest.raises(ValueError):
            check_amos_bound(-1, 1.0)
        with pytest.raises(ValueError):
            check_amos_bound(0, 0.0)


class TestHOddness:
    @pytest.mark.parametrize("d", [2, 4, 8, 20])
    @pytest.mark.parametrize("t", [0.5, 1.0, 10.0])
    def test_odd_about_half_d(self, d, t):
        assert h_oddness_residual(d, t, k_max=30) <= 1e-11

    @pytest.mark.parametrize("d", [2, 6])
    def test_sign_structure(self, d):
        # h(n) <= 0 above the symmetry point (margin >= 0 there)
        t = 1.7
        for n in range(d // 2, d // 2 + 25):
            assert check_ratio_bound(n, d, t) >= -1e-12


class TestFMonotonicity:
    def test_f_limit_at_large_t(self):
        assert abs(f_value(1e6, 0.0)) < 1e-5

    def test_f_closed_form(self):
        # the bracketed difference collapses to -(x+1)/t, so
        # f(t,x) = s - asinh(s) with s = (x+1)/t
        for t, x in ((0.7, 0.0), (3.0, 2.0), (50.0, 12.5)):
            s = (x + 1) / t
            assert f_value(t, x) == pytest.approx(s - math.asinh(s), rel=1e-12)

    def test_no_violations_on_grid(self):
        t_grid = np.geomspace(0.1, 100.0, 25)
        x_grid = np.geomspace(0.5, 50.0, 25)
        report = check_f_monotonicity(t_grid, x_grid)
        assert report.passed
        assert report.dx_violations == []
        assert report.dt_violations == []
        assert report.min_f >= -1e-8

    def test_f_nonnegative_on_grid(self):
        for t in (0.1, 1.0, 10.0, 100.0):
            for x in (0.0, 0.5, 3.0, 50.0):
                assert f_value(t, x) >= -1e-8

    def test_dt_row_checked_at_zero(self):
        report = check_f_monotonicity([0.5, 5.0], [0.0, 1.0])
        assert report.dt_violations == []


class TestUnimodalLaws:
    def test_point_mass(self):
        law = point_mass_law()
        assert law.support.tolist() == [0]
        assert law.probabilities.tolist() == [1.0]

    def test_uniform_window(self):
        law = uniform_window_law(2)
        assert law.support.tolist() == [-2, -1, 0, 1, 2]
        assert np.allclose(law.probabilities, 0.2)

    def test_binomial_symmetric(self):
        law = binomial_law(4)
        assert law.support.tolist() == list(range(-4, 5))
        assert law.probabilities.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(law.probabilities, law.probabilities[::-1])

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            UnimodalSymmetricLaw(
                np.array([-1, 0, 1]), np.array([0.2, 0.5, 0.3])
            )

    def test_rejects_non_unimodal(self):
        with pytest.raises(ValueError):
            UnimodalSymmetricLaw(
                np.array([-1, 0, 1]), np.array([0.4, 0.2, 0.4])
            )

    def test_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            UnimodalSymmetricLaw(np.array([0]), np.array([0.9]))


class TestUnimodalExpectation:
    def test_point_mass_d1_t1(self):
        # E = log(I_0(1)/I_1(1)) and the bound is (1+1)/2 = 1
        margin = check_unimodal_expectation(point_mass_law(), d=1, t=1.0)
        expect = 1.0 - (mp_log_i(0, 1.0) - mp_log_i(1, 1.0))
        assert margin == pytest.approx(expect, rel=1e-11)
        assert margin >= -1e-10

    @pytest.mark.parametrize("t", [0.5, 1.0, 5.0, 20.0])
    def test_uniform_windows(self, t):
        for k in (0, 1, 3, 10, 20):
            for d in (1, 2, 5, 10):
                margin = check_unimodal_expectation(uniform_window_law(k), d, t)
                assert margin >= -1e-10

    @pytest.mark.parametrize("t", [0.5, 2.0, 20.0])
    def test_binomial_laws(self, t):
        for k in (1, 4, 12, 20):
            for d in (1, 3, 8):
                margin = check_unimodal_expectation(binomial_law(k), d, t)
                assert margin >= -1e-10

    def test_oracle_expectation(self):
        # recompute the expectation with mpmath for one window law
        law = uniform_window_law(2)
        d, t = 3, 1.3
        expect_val = sum(
            p * (mp_log_i(abs(m), t) - mp_log_i(abs(m - d), t))
            for m, p in zip(law.support.tolist(), law.probabilities.tolist())
        )
        margin = check_unimodal_expectation(law, d, t)
        assert margin == pytest.approx((d + d * d) / (2 * t) - expect_val, rel=1e-10)

    def test_validation(self):
        with pytest.raises(ValueError):
            check_unimodal_expectation(point_mass_law(), d=0, t=1.0)
        with pytest.raises(ValueError):
            check_unimodal_expectation(point_mass_law(), d=1, t=0.0)
