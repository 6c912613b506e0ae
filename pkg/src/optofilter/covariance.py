"""Conditional covariance of the filtered mirror.

Covariances are normalized so the vacuum has V = identity; the Heisenberg
bound then reads V_qq V_pp - V_qp^2 >= 1.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import QuadratureError, UnconditionalLimit, UnphysicalState, ZeroMeasurementRate
from .filter import spectrum_conditional
from .params import derive, filter_params, measurement_coeffs

HEISENBERG_TOL = 1e-9
DEGENERATE_GAP = 1e-12


@dataclass(frozen=True)
class CovMat2:
    V_qq: float
    V_qp: float
    V_pp: float

    @property
    def det(self):
        return self.V_qq * self.V_pp - self.V_qp**2

    def matrix(self):
        return np.array([[self.V_qq, self.V_qp], [self.V_qp, self.V_pp]])

    @classmethod
    def from_matrix(cls, a):
        return cls(float(a[0, 0]), float(0.5 * (a[0, 1] + a[1, 0])), float(a[1, 1]))

    def is_physical(self, tol=HEISENBERG_TOL):
        return self.V_qq > 0 and self.V_pp > 0 and self.det >= 1.0 - tol


@dataclass(frozen=True)
class ConditionalState:
    params: object
    derived: object
    coeffs: object
    filter: object
    cov: CovMat2


def _check_defined(fp, d, mc):
    if mc.lambda_theta == 0:
        raise ZeroMeasurementRate("conditional state undefined at zero measurement rate")
    if fp.damping_gap < DEGENERATE_GAP * d.gamma_m:
        raise UnconditionalLimit(
            "gamma_theta - gamma_m below resolution; state is at the unconditional limit",
            damping_gap=fp.damping_gap,
        )


def covariance_main(fp, d, mc):
    _check_defined(fp, d, mc)
    wm = d.omega_m
    gap = fp.damping_gap
    V_qq = gap / mc.lambda_theta
    V_qp = V_qq * gap / (2.0 * wm)
    V_pp = V_qq * ((fp.omega_theta / wm) ** 2 - d.gamma_m * gap / (2.0 * wm**2))
    return CovMat2(V_qq, V_qp, V_pp)


def covariance_appendix(fp, d, mc):
    """Same covariance, with V_pp in the form obtained by integrating the spectra."""
    _check_defined(fp, d, mc)
    wm = d.omega_m
    gap = fp.damping_gap
    V_qq = gap / mc.lambda_theta
    V_qp = V_qq * gap / (2.0 * wm)
    V_pp = V_qq * (1.0 + mc.Lambda_theta / wm + fp.gamma_theta * gap / (2.0 * wm**2))
    return CovMat2(V_qq, V_qp, V_pp)


def _integrate_spectrum(fp, d, mc, which, tol, full_line):
    scale = fp.omega_theta

    def integrand(u):
        c = math.cos(u)
        sample = spectrum_conditional(fp, d, mc, scale * math.tan(u))
        return float(getattr(sample, which)) * scale / (c * c)

    lo = -0.5 * math.pi if full_line else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(integrand, lo, 0.5 * math.pi, epsabs=0.0, epsrel=tol, limit=500)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature of {which} did not converge: {exc}") from exc
    if not abs(err) <= tol * abs(value):
        raise QuadratureError(
            f"quadrature of {which} reached error {err:.3g} > {tol:g} relative", error=err, value=value
        )
    return value / (2.0 * math.pi) * (1.0 if full_line else 2.0)


def covariance_quadrature(fp, d, mc, tol=1e-10, full_line=False):
    """Covariance by direct numerical integration of the conditional spectra.

    The line is mapped onto a finite interval by omega = omega_theta tan(u),
    which absorbs the slow omega^-2 tails. Unless ``full_line`` is set only
    the positive half is integrated and doubled (the spectra are even).
    """
    if mc.lambda_theta == 0:
        raise ZeroMeasurementRate("conditional spectrum undefined at zero measurement rate")
    return CovMat2(
        _integrate_spectrum(fp, d, mc, "S_qq", tol, full_line),
        _integrate_spectrum(fp, d, mc, "ReS_qp", tol, full_line),
        _integrate_spectrum(fp, d, mc, "S_pp", tol, full_line),
    )


def purity(c, tol=HEISENBERG_TOL):
    if not c.is_physical(tol):
        raise UnphysicalState(f"covariance violates the uncertainty bound: det = {c.det:.12g}", det=c.det)
    return 1.0 / math.sqrt(max(c.det, 1.0))


def unconditional_variances(d):
    """Variances of the unfiltered mirror, (n_bar / 2 gamma_m) for both quadratures."""
    v = d.n_bar / (2.0 * d.gamma_m)
    return CovMat2(v, 0.0, v)


def conditional_state(p, theta=None, warn=False, check=True):
    """Run the full chain params -> filter -> covariance at angle ``theta`` (default p.theta).

    With ``check`` a covariance below the uncertainty bound raises
    UnphysicalState. The Brownian noise model acting on momentum alone
    allows this at low thermal occupation, by an amount of order gamma_m / omega_m.
    """
    d = derive(p, warn=warn)
    mc = measurement_coeffs(d, p.theta if theta is None else theta)
    fp = filter_params(d, mc)
    cov = covariance_main(fp, d, mc)
    if check and not cov.is_physical():
        raise UnphysicalState(
            f"conditional covariance violates the uncertainty bound: det = {cov.det:.12g}", det=cov.det
        )
    return ConditionalState(p, d, mc, fp, cov)
