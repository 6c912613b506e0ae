"""Susceptibilities, causal Wiener filters and spectral densities.

Every function accepts scalar or array frequencies ``omega`` (rad/s).
Spectra are two-sided and even in omega; variances follow from
``(1 / 2 pi) * integral over the whole real line``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ZeroMeasurementRate


@dataclass(frozen=True)
class Susceptibility:
    omega0: float
    gamma: float

    def __call__(self, omega):
        return eval_susceptibility(self, omega)


@dataclass(frozen=True)
class SpectrumSample:
    omega: np.ndarray
    S_qq: np.ndarray
    S_pp: np.ndarray
    ReS_qp: np.ndarray


def eval_susceptibility(s, omega):
    omega = np.asarray(omega, dtype=float)
    return s.omega0**2 - 1j * s.gamma * omega - omega**2


def bare_susceptibility(d):
    return Susceptibility(d.omega_m, d.gamma_m)


def filtered_susceptibility(fp):
    return Susceptibility(fp.omega_theta, fp.gamma_theta)


def wiener_filter(fp, d, mc, omega):
    """Causal Wiener filters (H_q, H_p) estimating q and p from the homodyne current."""
    c = mc.c_theta
    if c == 0:
        raise ZeroMeasurementRate("zero measurement rate: filter undefined")
    omega = np.asarray(omega, dtype=float)
    ratio = eval_susceptibility(bare_susceptibility(d), omega) / eval_susceptibility(
        filtered_susceptibility(fp), omega
    )
    H_q = (1.0 - ratio) / c
    H_p = -(1j * omega + (fp.damping_gap - 1j * omega) * ratio) / (c * d.omega_m)
    return H_q, H_p


def spectrum_unconditional(d, omega):
    omega = np.asarray(omega, dtype=float)
    denom = np.abs(eval_susceptibility(bare_susceptibility(d), omega)) ** 2
    S_qq = d.omega_m**2 * d.n_bar / denom
    S_pp = omega**2 * d.n_bar / denom
    return S_qq, S_pp


def spectrum_conditional(fp, d, mc, omega):
    """Spectra of the estimation residuals q - H_q I and p - H_p I."""
    c = mc.c_theta
    if mc.lambda_theta == 0:
        raise ZeroMeasurementRate("conditional spectrum undefined at zero measurement rate")
    omega = np.asarray(omega, dtype=float)
    w2 = omega**2
    wm = d.omega_m
    nb = d.n_bar
    L = mc.L_theta
    dg = fp.damping_gap
    dw = fp.omega_theta**2 - wm**2
    gm = d.gamma_m
    denom = np.abs(eval_susceptibility(filtered_susceptibility(fp), omega)) ** 2

    S_qq = wm**2 * nb - 2.0 * wm * dw * L / c + (w2 * dg**2 + dw**2) / c**2
    S_pp = (
        (dg**2 + w2) * nb
        - 2.0 * L * (w2 * (dw - dg * gm) - wm**2 * dg**2) / (c * wm)
        + (w2 * (dg * gm - dw) ** 2 + dg**2 * wm**4) / (c**2 * wm**2)
    )
    S_qp = dg * (
        wm * nb
        - (w2 + fp.omega_theta**2 - 2.0 * wm**2) * L / c
        - ((gm * dg - dw) * w2 + dw * wm**2) / (c**2 * wm)
    )
    return SpectrumSample(omega=omega, S_qq=S_qq / denom, S_pp=S_pp / denom, ReS_qp=S_qp / denom)


def frequency_grid(omega_min, omega_max, n_log, n_linear=0, symmetric=False):
    """Log-spaced |omega| grid with an optional linear patch covering (-omega_min, omega_min).

    With ``symmetric`` the log part is mirrored to negative frequencies and
    the patch spans the full interval around zero; otherwise the patch
    covers [0, omega_min).
    """
    if not 0 < omega_min < omega_max:
        raise ValueError("need 0 < omega_min < omega_max")
    log_part = np.geomspace(omega_min, omega_max, n_log)
    if symmetric:
        patch = np.linspace(-omega_min, omega_min, n_linear + 2)[1:-1] if n_linear else np.empty(0)
        return np.concatenate([-log_part[::-1], patch, log_part])
    patch = np.linspace(0.0, omega_min, n_linear + 1)[:-1] if n_linear else np.empty(0)
    return np.concatenate([patch, log_part])
