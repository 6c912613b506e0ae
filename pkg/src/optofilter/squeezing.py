"""Optimal homodyne angle and the momentum-squeezing approximations."""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .covariance import conditional_state
from .errors import ApproximationUndefined
from .params import HBAR, K_B, TWO_PI, coupling, derive, normalize_angle

# Reference point at which every ratio in the squeezing-condition factor equals one.
FIDUCIAL = dict(
    T=300.0,
    Gamma_bare=TWO_PI * 1e-7,
    P_in=2e-3,
    kappa=TWO_PI * 1e4,
    Delta_over_kappa=0.05,
    omega_c=TWO_PI * 2.8e14,
    m=0.1,
    ell=0.10,
)


@dataclass(frozen=True)
class SqueezeReport:
    theta_opt: float
    omega_ratio: float
    V_pp_exact: float
    V_qq_exact: float
    V_pp_approx: Optional[float]
    condition_factor: Optional[float]
    squeezed: bool


def omega_ratio_quartic(theta, zeta, xi, alpha):
    """(omega_theta / omega_m)^4 written as a single sinusoid in theta.

    Evaluates 1 + zeta xi / 2 + (xi / 2) sqrt(zeta^2 + 4) sin(2 theta - 2 alpha - atan(zeta / 2))
    after rewriting sin(. - atan(zeta/2)) = -cos(. + atan(2/zeta)) and
    1 - cos = 2 sin^2(./2), which removes the cancellation between the
    two large terms when zeta xi >> 1.
    """
    root = math.sqrt(zeta**2 + 4.0)
    half = theta - alpha + 0.5 * math.atan(2.0 / zeta)
    return 1.0 + 0.5 * xi * (2.0 * root * math.sin(half) ** 2 - 4.0 / (zeta + root))


def optimal_angle(zeta, alpha):
    """Homodyne angle minimizing omega_theta / omega_m."""
    return normalize_angle(alpha - 0.5 * math.atan(2.0 / zeta))


def maximizing_angle(zeta, alpha):
    """The other stationary point of the sinusoid, where omega_theta / omega_m is largest."""
    return normalize_angle(optimal_angle(zeta, alpha) + 0.5 * math.pi)


def quartic_minimum(zeta, xi):
    return 1.0 + 0.5 * zeta * xi - 0.5 * xi * math.sqrt(zeta**2 + 4.0)


def _check_small_detuning(p):
    if p.Delta <= 0:
        raise ApproximationUndefined("approximation undefined at Delta <= 0")
    ratio = p.Delta / p.kappa
    if ratio >= 0.5:
        raise ApproximationUndefined(f"approximation needs Delta/kappa << 1, got {ratio:.3g}")
    if ratio > 0.1:
        warnings.warn(f"Delta/kappa = {ratio:.3g} is not small; approximation is rough", stacklevel=3)


def vpp_approx(p):
    """Thermal-noise-limited V_pp in terms of the bare coupling g."""
    _check_small_detuning(p)
    g = coupling(p)
    k2 = p.kappa**2 + 4.0 * p.Delta**2
    return math.sqrt(K_B * p.T * p.Gamma_bare * k2 / (2.0 * g**2 * HBAR * p.Omega_bare * p.Delta))


def vpp_approx_xi(p):
    """Same estimate before substituting xi ~ kappa / Delta."""
    _check_small_detuning(p)
    d = derive(p, warn=False)
    thermal = 2.0 * p.gamma_m * (2.0 * d.n_th + 1.0)
    return math.sqrt(2.0 * p.kappa / p.Delta) * math.sqrt(thermal / (d.omega_m * d.xi))


def _condition_raw(T, Gamma, kappa, m, ell, omega_c, P_in, Delta):
    return K_B * T * Gamma * kappa**3 * m * ell**2 / (2.0 * HBAR * omega_c * P_in * Delta)


def condition_constant():
    """V_pp^2 implied at the fiducial point, i.e. the normalization hidden in the factor."""
    f = FIDUCIAL
    return _condition_raw(
        f["T"], f["Gamma_bare"], f["kappa"], f["m"], f["ell"], f["omega_c"], f["P_in"],
        f["Delta_over_kappa"] * f["kappa"],
    )


def condition_factor(p):
    """Dimensionless squeezing-condition factor; roughly, squeezing needs it below one."""
    if p.Delta <= 0:
        raise ApproximationUndefined("condition factor undefined at Delta <= 0")
    f = FIDUCIAL
    return (
        (p.T / f["T"])
        * (p.Gamma_bare / f["Gamma_bare"])
        / (p.P_in / f["P_in"])
        * (p.kappa / f["kappa"]) ** 2
        / ((p.Delta / p.kappa) / f["Delta_over_kappa"])
        / (p.omega_c / f["omega_c"])
        * (p.m / f["m"])
        * (p.ell / f["ell"]) ** 2
    )


def squeeze_report(p):
    d = derive(p, warn=False)
    theta = optimal_angle(d.zeta, d.alpha)
    state = conditional_state(p, theta)
    approx = factor = None
    if 0 < p.Delta < 0.5 * p.kappa:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            approx = vpp_approx(p)
        factor = condition_factor(p)
    V_pp = state.cov.V_pp
    return SqueezeReport(
        theta_opt=theta,
        omega_ratio=state.filter.omega_theta / d.omega_m,
        V_pp_exact=V_pp,
        V_qq_exact=state.cov.V_qq,
        V_pp_approx=approx,
        condition_factor=factor,
        squeezed=V_pp < 1.0,
    )
