import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad
from scipy.special import gammaln, jv

from radial_toeplitz.errors import NonIntegrableError, ToleranceNotMetError
from radial_toeplitz.logreal import LogReal
from radial_toeplitz.quadrature import (
    abs_oscillatory_moment, bessel_weighted, moment_compact, moment_gaussian,
    oscillatory_moment,
)
from radial_toeplitz.specfun import bessel_i_log, bessel_l2_ball_log
from radial_toeplitz.symbols import parse_symbol

mp.mp.dps = 30


def rel_log_diff(value: LogReal, reference_log: float) -> float:
    return abs(math.exp(value.log_abs - reference_log) - 1.0)


class TestMomentCompact:
    def test_unit_symbol_cubed(self):
        res = moment_compact(parse_symbol("1"), 3.0, 1.0, 1e-10)
        assert res.value.to_float() == pytest.approx(0.25, rel=1e-12)
        assert res.meets(1e-10)
        assert res.evaluations > 0

    def test_indicator_analytic(self):
        res = moment_compact(parse_symbol("chi(0,0.5)"), 7.0, 1.0, 1e-10)
        assert res.value.to_float() == pytest.approx(0.5 ** 8 / 8, rel=1e-12)

    def test_polynomial_analytic(self):
        res = moment_compact(parse_symbol("r^2"), 5.0, 2.0, 1e-10)
        assert res.value.to_float() == pytest.approx(32.0, rel=1e-12)

    def test_large_power_substitution_path(self):
        res = moment_compact(parse_symbol("chi(0,0.5)"), 999.0, 1.0, 1e-10)
        want_log = 1000 * math.log(0.5) - math.log(1000)
        assert res.value.sign == 1
        assert res.value.log_abs == pytest.approx(want_log, abs=1e-10)

    def test_mixed_sign_deep_cancellation(self):
        V = parse_symbol("chi(0,0.3)-2*chi(0.4,0.6)")
        res = moment_compact(V, 201.0, 1.0, 1e-10)
        want = (0.3 ** 202 - 2 * (0.6 ** 202 - 0.4 ** 202)) / 202
        assert res.value.sign == -1
        assert rel_log_diff(res.value, math.log(abs(want))) < 1e-10

    def test_both_routes_agree(self):
        # s = 64 runs in r space, s = 65 through the exponential substitution
        V = parse_symbol("chi(0.1,0.8)*r^2")
        lo = moment_compact(V, 64.0, 1.0, 1e-11).value
        hi = moment_compact(V, 65.0, 1.0, 1e-11).value
        ref_lo = (0.8 ** 67 - 0.1 ** 67) / 67
        ref_hi = (0.8 ** 68 - 0.1 ** 68) / 68
        assert rel_log_diff(lo, math.log(ref_lo)) < 1e-10
        assert rel_log_diff(hi, math.log(ref_hi)) < 1e-10

    def test_linearity(self):
        V1, V2 = parse_symbol("chi(0,0.5)"), parse_symbol("r^2*chi(0.2,0.9)")
        comb = parse_symbol("3*chi(0,0.5)-2*r^2*chi(0.2,0.9)")
        m1 = moment_compact(V1, 6.0, 1.0, 1e-11).value.to_float()
        m2 = moment_compact(V2, 6.0, 1.0, 1e-11).value.to_float()
        mc = moment_compact(comb, 6.0, 1.0, 1e-11).value.to_float()
        assert mc == pytest.approx(3 * m1 - 2 * m2, rel=1e-9)

    def test_domination(self):
        V = parse_symbol("sin(7*r)*chi(0,1)")
        Vabs = parse_symbol("abs(sin(7*r)*chi(0,1))")
        for s in (0.0, 11.0, 173.0):
            a = moment_compact(V, s, 1.0, 1e-9).value
            b = moment_compact(Vabs, s, 1.0, 1e-9).value
            assert a.log_abs <= b.log_abs + 3e-9

    def test_zero_symbol(self):
        res = moment_compact(parse_symbol("0*chi(0,1)"), 10.0, 1.0, 1e-10)
        assert res.value.is_zero()
        assert res.abs_error_estimate == -math.inf

    def test_validation(self):
        one = parse_symbol("1")
        with pytest.raises(ValueError):
            moment_compact(one, -1.0, 1.0, 1e-10)
        with pytest.raises(ValueError):
            moment_compact(one, 1.0, 1.0, 1e-15)
        with pytest.raises(ValueError):
            moment_compact(one, 1.0, 1.0, 0.5)


class TestMomentGaussian:
    def test_cubic_weight(self):
        res = moment_gaussian(parse_symbol("1"), 3.0, 1e-10)
        assert res.value.to_float() == pytest.approx(0.5, rel=1e-11)

    def test_linear_weight(self):
        res = moment_gaussian(parse_symbol("1"), 1.0, 1e-10)
        assert res.value.to_float() == pytest.approx(0.5, rel=1e-11)

    def test_quartic_decay_closed_form(self):
        # int_0^inf e^{-r^4} r e^{-r^2} dr = (sqrt(pi)/4) e^{1/4} erfc(1/2),
        # frozen after verifying against independent adaptive quadrature
        want = 0.2728206803825235
        ref, err = scipy_quad(lambda r: math.exp(-r ** 4 - r * r) * r, 0, 10)
        assert ref == pytest.approx(want, rel=1e-12)
        res = moment_gaussian(parse_symbol("exp(-r^4)"), 1.0, 1e-11)
        assert res.value.to_float() == pytest.approx(want, rel=1e-10)

    def test_support_far_below_weight_peak(self):
        res = moment_gaussian(parse_symbol("chi(0,0.5)"), 501.0, 1e-10)
        # oracle via r = 0.5 e^{-y/502}; a naive quad misses the edge spike
        g = lambda y: mp.exp(-y) * mp.exp(-(mp.mpf("0.5") * mp.exp(-y / 502)) ** 2)
        ref = mp.quad(g, [0, 10, 60]) * mp.mpf("0.5") ** 502 / 502
        assert rel_log_diff(res.value, float(mp.log(ref))) < 1e-9

    def test_monotone_truncation(self):
        # tightening the tolerance widens the window; the change stays below
        # the first run's reported error estimate
        V = parse_symbol("exp(-r^4)")
        r1 = moment_gaussian(V, 5.0, 1e-6)
        r2 = moment_gaussian(V, 5.0, 1e-12)
        diff = r1.value - r2.value
        assert diff.is_zero() or diff.log_abs <= r1.abs_error_estimate + 1e-12

    def test_growth_detected(self):
        with pytest.raises(NonIntegrableError):
            moment_gaussian(parse_symbol("exp(r^2)*r"), 1.0, 1e-8)

    def test_rapid_decay_symbol(self):
        res = moment_gaussian(parse_symbol("exp(-exp(r))"), 1001.0, 1e-8)
        assert res.value.sign == 1
        # peak of s log r - e^r sits near r = log s; the moment is far below
        # the bare Gaussian moment Gamma(501)/2
        assert res.value.log_abs < gammaln(501.0) - math.log(2.0)


class TestBesselWeighted:
    def test_ball_matches_identity(self):
        one = parse_symbol("1")
        for nu, R in [(1.0, 4.0), (12.5, 7.0), (90.0, 2.0)]:
            got = bessel_weighted(one, nu, "ball", 1e-11, R=R)
            want = bessel_l2_ball_log(nu, R)
            assert rel_log_diff(got.value, want.log_abs) < 1e-9

    def test_zero_symbol(self):
        res = bessel_weighted(parse_symbol("0*chi(0,1)"), 3.0, "gaussian", 1e-10)
        assert res.value.is_zero()

    @pytest.mark.parametrize("nu", [0.0, 0.5, 3.0, 20.0, 75.0, 300.0])
    def test_gaussian_norm_closed_form(self, nu):
        # quadrature is the arbiter for (1/2) e^{-1/2} I_nu(1/2); this grid is
        # the bring-up validation that enables the closed-form fast path
        got = bessel_weighted(parse_symbol("1"), nu, "gaussian", 1e-11)
        want = bessel_i_log(nu, 0.5).scale_log(math.log(0.5) - 0.5)
        assert rel_log_diff(got.value, want.log_abs) < 1e-9

    def test_plain_weight_compact_symbol(self):
        V = parse_symbol("chi(0.2,1.5)")
        got = bessel_weighted(V, 2.0, "plain", 1e-10)
        ref, _ = scipy_quad(lambda r: jv(2.0, r) ** 2 * r, 0.2, 1.5, limit=200)
        assert got.value.to_float() == pytest.approx(ref, rel=1e-9)

    def test_plain_weight_needs_decay(self):
        with pytest.raises(ValueError):
            bessel_weighted(parse_symbol("1"), 2.0, "plain", 1e-8)

    def test_plain_weight_rapid_decay_truncates(self):
        got = bessel_weighted(parse_symbol("exp(-exp(r))"), 1.0, "plain", 1e-8)
        ref, _ = scipy_quad(lambda r: math.exp(-math.exp(r)) * jv(1.0, r) ** 2 * r, 0, 8)
        assert got.value.to_float() == pytest.approx(ref, rel=1e-7)

    def test_ball_requires_radius(self):
        with pytest.raises(ValueError):
            bessel_weighted(parse_symbol("1"), 2.0, "ball", 1e-8)
        with pytest.raises(ValueError):
            bessel_weighted(parse_symbol("1"), 2.0, "sphere", 1e-8)


class TestOscillatoryMoment:
    # frozen from a 40-digit between-zeros summation in the v = t^{1/q} frame
    ORACLE = {0: 0.07585431802870197114,
              3: 0.058140253183310304209,
              10: -0.01124453043957629139}

    @pytest.mark.parametrize("k", sorted(ORACLE))
    @pytest.mark.parametrize("method", ["segments", "rotated"])
    def test_against_frozen_oracle(self, k, method):
        res = oscillatory_moment(2.0, 4.0, k, 1e-9, method=method)
        assert res.value.to_float() == pytest.approx(self.ORACLE[k], rel=1e-9)

    def test_dual_methods_agree(self):
        for k in range(0, 21):
            a = oscillatory_moment(2.0, 4.0, k, 1e-9, method="segments").value
            b = oscillatory_moment(2.0, 4.0, k, 1e-9, method="rotated").value
            assert a.sign == b.sign
            assert a.log_abs == pytest.approx(b.log_abs, abs=1e-9)

    def test_segments_raise_past_cancellation_budget(self):
        with pytest.raises(ToleranceNotMetError) as err:
            oscillatory_moment(2.0, 4.0, 60, 1e-9, method="segments")
        assert err.value.best is not None  # partial sums are reported

    def test_auto_falls_back_to_rotation(self):
        res = oscillatory_moment(2.0, 4.0, 60, 1e-9)
        assert res.meets(1e-9 * 1.001)

    def test_rotation_bound(self):
        # |I(k)| <= Gamma((k+1)/q) / (2q), from rotating the path to i tau
        for k in range(0, 301, 7):
            res = oscillatory_moment(2.0, 4.0, k, 1e-8)
            assert res.value.log_abs <= gammaln((k + 1) / 4.0) - math.log(8.0) + 1e-9

    def test_validation(self):
        with pytest.raises(ValueError):
            oscillatory_moment(1.0, 4.0, 0, 1e-8)
        with pytest.raises(ValueError):
            oscillatory_moment(2.0, 2.0, 0, 1e-8)
        with pytest.raises(ValueError):
            oscillatory_moment(2.0, 4.0, -1, 1e-8)
        with pytest.raises(ValueError):
            oscillatory_moment(2.0, 4.0, 0, 1e-8, method="contour")


class TestAbsOscillatoryMoment:
    @pytest.mark.parametrize("k", [0, 5])
    def test_against_extended_precision(self, k):
        a = (k + 1) / 4.0
        ref = mp.quad(lambda t: t ** (a - 1) * mp.exp(-t ** mp.mpf("0.5")) * abs(mp.sin(t)),
                      [0] + [j * mp.pi for j in range(1, 220)]) / 8
        res = abs_oscillatory_moment(2.0, 4.0, k, 1e-9)
        assert res.value.to_float() == pytest.approx(float(ref), rel=1e-8)

    def test_dominates_signed_moment(self):
        for k in (0, 40, 150):
            signed = oscillatory_moment(2.0, 4.0, k, 1e-8)
            absval = abs_oscillatory_moment(2.0, 4.0, k, 1e-8)
            assert signed.value.log_abs <= absval.value.log_abs + 1e-8

    def test_large_k_matches_gamma_scale(self):
        # the |sin| moment tracks (2/pi) (q/p) Gamma((k+1)/p) / (2q) within O(1)
        k = 240
        res = abs_oscillatory_moment(2.0, 4.0, k, 1e-8)
        scale = gammaln((k + 1) / 2.0) - math.log(8.0)
        assert abs(res.value.log_abs - scale) < 3.0
