import math

import numpy as np
import pytest

import mp_oracle
from conftest import random_draws
from optofilter.covariance import (
    CovMat2,
    conditional_state,
    covariance_appendix,
    covariance_main,
    covariance_quadrature,
    purity,
    unconditional_variances,
)
from optofilter.errors import UnconditionalLimit, UnphysicalState, ZeroMeasurementRate
from optofilter.params import derive, figure1_params, filter_params, measurement_coeffs

# Frozen from tests/mp_oracle.py at the Fig. 1 operating point.
FIG1_COV = dict(V_qq=11.044103472726544, V_qp=4.3705939211741037, V_pp=1.9274965287238558)
FIG1_PURITY = 0.67645129034672382


def _chain(p, theta=None):
    d = derive(p, warn=False)
    mc = measurement_coeffs(d, p.theta if theta is None else theta)
    return d, mc, filter_params(d, mc)


def test_figure1_covariance_oracle(fig1):
    c = conditional_state(fig1).cov
    for key, ref in FIG1_COV.items():
        assert getattr(c, key) == pytest.approx(ref, rel=1e-12)
    assert purity(c) == pytest.approx(FIG1_PURITY, rel=1e-12)


def test_oracle_still_agrees():
    ref = mp_oracle.evaluate(**mp_oracle.figure1_inputs())
    for key, frozen in FIG1_COV.items():
        assert float(ref[key]) == pytest.approx(frozen, rel=1e-15)


def test_two_closed_forms_agree():
    worst = 0.0
    for p in random_draws(1000, seed=2):
        d, mc, fp = _chain(p)
        try:
            a = covariance_main(fp, d, mc)
        except (UnconditionalLimit, ZeroMeasurementRate):
            continue
        b = covariance_appendix(fp, d, mc)
        assert a.V_qq == b.V_qq and a.V_qp == b.V_qp
        worst = max(worst, abs(a.V_pp - b.V_pp) / abs(a.V_pp))
    assert worst < 1e-12


def test_closed_form_is_physical_when_thermally_occupied():
    checked = 0
    for p in random_draws(2000, seed=4):
        d, mc, fp = _chain(p)
        if d.n_th < 5:
            continue
        try:
            c = covariance_main(fp, d, mc)
        except (UnconditionalLimit, ZeroMeasurementRate):
            continue
        assert c.V_qq > 0 and c.V_pp > 0
        assert c.det >= 1.0 - 1e-9
        assert fp.gamma_theta >= d.gamma_m
        checked += 1
    assert checked > 1000


def test_sub_heisenberg_points_are_flagged():
    flagged = 0
    for p in random_draws(2000, seed=4):
        d, mc, fp = _chain(p)
        try:
            c = covariance_main(fp, d, mc)
        except (UnconditionalLimit, ZeroMeasurementRate):
            continue
        if c.det < 1.0 - 1e-9:
            with pytest.raises(UnphysicalState):
                conditional_state(p)
            flagged += 1
    assert flagged > 0


@pytest.mark.parametrize("theta", [-math.pi / 50, -0.3, 0.2, 1.2, -2.5])
def test_quadrature_matches_closed_form(fig1, theta):
    d, mc, fp = _chain(fig1, theta)
    exact = covariance_main(fp, d, mc)
    numeric = covariance_quadrature(fp, d, mc, tol=1e-10)
    assert numeric.V_qq == pytest.approx(exact.V_qq, rel=1e-8)
    assert numeric.V_pp == pytest.approx(exact.V_pp, rel=1e-8)
    assert numeric.V_qp == pytest.approx(exact.V_qp, rel=1e-8, abs=1e-10 * math.sqrt(exact.V_qq * exact.V_pp))


def test_full_line_equals_doubled_half_line(fig1):
    d, mc, fp = _chain(fig1)
    a = covariance_quadrature(fp, d, mc, tol=1e-10)
    b = covariance_quadrature(fp, d, mc, tol=1e-10, full_line=True)
    assert b.V_qq == pytest.approx(a.V_qq, rel=1e-9)
    assert b.V_pp == pytest.approx(a.V_pp, rel=1e-9)


def test_quadrature_random_detuned_points():
    rng = np.random.default_rng(17)
    base = figure1_params()
    for _ in range(10):
        p = base.replace(Delta=rng.uniform(0, 0.4) * base.kappa, theta=rng.uniform(-0.4, 0.4))
        d, mc, fp = _chain(p)
        if mc.lambda_theta == 0:
            continue
        exact = covariance_main(fp, d, mc)
        numeric = covariance_quadrature(fp, d, mc, tol=1e-10)
        assert numeric.V_pp == pytest.approx(exact.V_pp, rel=1e-8)


class TestPurity:
    def test_vacuum(self):
        assert purity(CovMat2(1.0, 0.0, 1.0)) == 1.0

    def test_thermal(self):
        assert purity(CovMat2(3.0, 0.0, 3.0)) == pytest.approx(1 / 3)

    def test_squeezed_vacuum_is_pure(self):
        r = 0.7
        assert purity(CovMat2(math.exp(2 * r), 0.0, math.exp(-2 * r))) == pytest.approx(1.0)

    def test_rejects_sub_heisenberg(self):
        with pytest.raises(UnphysicalState):
            purity(CovMat2(0.5, 0.0, 0.5))

    def test_tolerates_rounding(self):
        assert purity(CovMat2(1.0 - 1e-12, 0.0, 1.0)) == 1.0


def test_matrix_round_trip():
    c = CovMat2(2.0, 0.3, 1.5)
    assert CovMat2.from_matrix(c.matrix()) == c
    assert c.det == pytest.approx(np.linalg.det(c.matrix()))


def test_vanishing_power_approaches_unconditional(fig1):
    errors = []
    for scale in (1e-2, 1e-4, 1e-6, 1e-8):
        p = fig1.replace(P_in=fig1.P_in * scale)
        target = unconditional_variances(derive(p)).V_qq
        errors.append(abs(conditional_state(p).cov.V_qq - target) / target)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-3


def test_amplitude_quadrature_limit_keeps_thermal_part(fig1):
    # theta -> alpha: the rate vanishes but the record stays correlated with the back-action force
    d = derive(fig1)
    V = conditional_state(fig1, d.alpha + 1e-7).cov.V_qq
    assert V == pytest.approx(2 * d.n_th + 1, rel=1e-2)


def test_unconditional_limit_flagged(fig1):
    d = derive(fig1)
    mc = measurement_coeffs(d, d.alpha + 1e-30)
    fp = filter_params(d, mc)
    with pytest.raises((UnconditionalLimit, ZeroMeasurementRate)):
        covariance_main(fp, d, mc)


def test_zero_measurement_rate(fig1):
    with pytest.raises(ZeroMeasurementRate):
        conditional_state(fig1, 0.0)


def test_conditioning_reduces_position_variance(fig1):
    c = conditional_state(fig1).cov
    assert c.V_qq < unconditional_variances(derive(fig1)).V_qq
