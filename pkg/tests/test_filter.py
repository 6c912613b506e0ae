import math

import numpy as np
import pytest

from conftest import random_draws
from optofilter.errors import ZeroMeasurementRate
from optofilter.filter import (
    Susceptibility,
    bare_susceptibility,
    filtered_susceptibility,
    frequency_grid,
    spectrum_conditional,
    spectrum_unconditional,
    wiener_filter,
)
from optofilter.params import MeasurementCoeffs, derive, filter_params, measurement_coeffs


def _chain(p, theta=None):
    d = derive(p, warn=False)
    mc = measurement_coeffs(d, p.theta if theta is None else theta)
    return d, mc, filter_params(d, mc)


def residual_spectra(fp, d, mc, omega):
    """Independent route: build the residuals q - H_q I and p - H_p I from the
    frequency-domain transfer functions and form their cross spectra directly.

    The homodyne current is I = c q + noise, q = omega_m F / chi, p = -i omega q / omega_m,
    with force/noise correlations n_bar, 1 and L.
    """
    H_q, H_p = wiener_filter(fp, d, mc, omega)
    chi = d.omega_m**2 - 1j * d.gamma_m * omega - omega**2
    c = mc.c_theta
    Aq = d.omega_m * (1.0 - H_q * c) / chi
    Bq = -H_q
    Ap = (-1j * omega / d.omega_m) * d.omega_m / chi - H_p * c * d.omega_m / chi
    Bp = -H_p
    L = mc.L_theta
    nb = d.n_bar

    def cross(A1, B1, A2, B2):
        return A1 * np.conj(A2) * nb + B1 * np.conj(B2) + (A1 * np.conj(B2) + B1 * np.conj(A2)) * L

    return cross(Aq, Bq, Aq, Bq).real, cross(Ap, Bp, Ap, Bp).real, cross(Aq, Bq, Ap, Bp).real


class TestSusceptibility:
    def test_on_resonance_is_pure_damping(self):
        s = Susceptibility(2.0, 0.5)
        assert s(2.0) == pytest.approx(-1j * 0.5 * 2.0)

    def test_static_value(self):
        assert Susceptibility(3.0, 0.1)(0.0) == 9.0

    def test_vectorized(self):
        w = np.linspace(-1, 1, 5)
        out = Susceptibility(1.0, 0.2)(w)
        assert out.shape == (5,)
        assert np.allclose(out, 1.0 - 0.2j * w - w**2)


class TestWienerFilter:
    def test_zero_rate_raises(self, fig1):
        d, _, fp = _chain(fig1)
        with pytest.raises(ZeroMeasurementRate):
            wiener_filter(fp, d, MeasurementCoeffs(0.0, 0.0, 0.0, 0.0), 1.0)

    def test_dc_gain(self, fig1):
        d, mc, fp = _chain(fig1)
        H_q, H_p = wiener_filter(fp, d, mc, 0.0)
        ratio = (d.omega_m / fp.omega_theta) ** 2
        assert H_q == pytest.approx((1.0 - ratio) / mc.c_theta, rel=1e-14)
        assert H_p == pytest.approx(-fp.damping_gap * ratio / (mc.c_theta * d.omega_m), rel=1e-14)

    def test_decays_like_inverse_frequency(self, fig1):
        d, mc, fp = _chain(fig1)
        w = 1e6 * d.omega_m
        H_q, _ = wiener_filter(fp, d, mc, w)
        H_q10, _ = wiener_filter(fp, d, mc, 10 * w)
        assert abs(H_q10) == pytest.approx(abs(H_q) / 10, rel=1e-6)
        assert abs(H_q) == pytest.approx(fp.damping_gap / (abs(mc.c_theta) * w), rel=1e-6)

    def test_causal(self):
        # poles of the filter are the roots of the filtered susceptibility, both in the lower half-plane
        for p in random_draws(300, seed=3):
            d, mc, fp = _chain(p)
            if mc.c_theta == 0:
                continue
            roots = np.roots([-1.0, -1j * fp.gamma_theta, fp.omega_theta**2])
            assert np.all(roots.imag < 0)


class TestSpectra:
    def test_unconditional_peak_near_resonance(self, fig1):
        d, _, _ = _chain(fig1)
        w = np.linspace(0.5, 1.5, 20001) * d.omega_m
        S_qq, _ = spectrum_unconditional(d, w)
        peak = w[np.argmax(S_qq)]
        expected = math.sqrt(d.omega_m**2 - d.gamma_m**2 / 2)
        assert peak == pytest.approx(expected, rel=1e-4)

    def test_unconditional_at_dc(self, fig1):
        d, _, _ = _chain(fig1)
        S_qq, S_pp = spectrum_unconditional(d, 0.0)
        assert S_qq == pytest.approx(d.n_bar / d.omega_m**2, rel=1e-15)
        assert S_pp == 0.0

    def test_conditional_matches_residual_construction(self):
        rng = np.random.default_rng(11)
        checked = 0
        for p in random_draws(400, seed=5):
            d, mc, fp = _chain(p)
            if mc.lambda_theta == 0 or fp.damping_gap < 1e-6 * d.gamma_m:
                continue
            w = fp.omega_theta * np.exp(rng.uniform(-4, 4, size=5))
            s = spectrum_conditional(fp, d, mc, w)
            qq, pp, qp = residual_spectra(fp, d, mc, w)
            scale_q = np.max(np.abs(qq))
            assert np.allclose(s.S_qq, qq, rtol=1e-8, atol=1e-10 * scale_q)
            assert np.allclose(s.S_pp, pp, rtol=1e-8, atol=1e-10 * np.max(np.abs(pp)))
            assert np.allclose(s.ReS_qp, qp, rtol=1e-8, atol=1e-8 * math.sqrt(scale_q * np.max(np.abs(pp))))
            checked += 1
            if checked == 100:
                break
        assert checked == 100

    def test_conditional_even_and_non_negative(self, fig1):
        d, mc, fp = _chain(fig1)
        w = frequency_grid(1e-6, 1e2, 400) * d.omega_m
        s_pos = spectrum_conditional(fp, d, mc, w)
        s_neg = spectrum_conditional(fp, d, mc, -w)
        assert np.array_equal(s_pos.S_qq, s_neg.S_qq)
        assert np.array_equal(s_pos.S_pp, s_neg.S_pp)
        assert np.all(s_pos.S_qq >= 0) and np.all(s_pos.S_pp >= 0)

    def test_conditional_below_unconditional_at_resonance(self, fig1):
        d, mc, fp = _chain(fig1)
        s = spectrum_conditional(fp, d, mc, d.omega_m)
        S_qq, _ = spectrum_unconditional(d, d.omega_m)
        assert s.S_qq < S_qq

    def test_conditional_zero_rate_raises(self, fig1):
        d, _, fp = _chain(fig1)
        with pytest.raises(ZeroMeasurementRate):
            spectrum_conditional(fp, d, MeasurementCoeffs(0.0, 0.0, 0.0, 0.0), 1.0)


class TestFrequencyGrid:
    def test_log_only(self):
        w = frequency_grid(1e-3, 1e3, 7)
        assert np.allclose(w, 10.0 ** np.arange(-3, 4))

    def test_patch_and_symmetry(self):
        w = frequency_grid(1.0, 10.0, 3, n_linear=4, symmetric=True)
        assert np.allclose(w, -w[::-1])
        assert np.all(np.diff(w) > 0)
        assert len(w) == 2 * 3 + 4

    def test_half_line_patch_starts_at_zero(self):
        w = frequency_grid(1.0, 10.0, 3, n_linear=4)
        assert w[0] == 0.0 and np.all(np.diff(w) > 0)

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            frequency_grid(2.0, 1.0, 5)


def test_susceptibility_helpers(fig1):
    d, mc, fp = _chain(fig1)
    assert bare_susceptibility(d) == Susceptibility(d.omega_m, d.gamma_m)
    assert filtered_susceptibility(fp) == Susceptibility(fp.omega_theta, fp.gamma_theta)

