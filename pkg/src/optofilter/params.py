"""Physical inputs of a single optomechanical mirror and the scalars derived from them.

All angular frequencies are in rad/s.  Use :func:`from_hz` to build a
:class:`SystemParams` from ordinary frequencies f = omega / 2 pi.
"""

import math
import warnings
from dataclasses import dataclass, fields, replace

from .errors import (
    DifferentialModeUnstable,
    NoStableConditionalState,
    OpticalSpringInstability,
)

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
G_NEWTON = 6.67430e-11  # m^3 kg^-1 s^-2
TWO_PI = 2.0 * math.pi

# kappa must exceed omega_m by this factor for the adiabatic elimination of the cavity
ADIABATIC_RATIO = 100.0

# SystemParams fields that are angular frequencies
FREQUENCY_FIELDS = ("Omega_bare", "kappa", "omega_c", "Gamma_bare", "gamma_m", "Delta")


class AdiabaticityWarning(UserWarning):
    pass


def normalize_angle(theta):
    """Map an angle into (-pi, pi]."""
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped == -math.pi:
        return math.pi
    return wrapped


@dataclass(frozen=True)
class SystemParams:
    m: float
    ell: float
    Omega_bare: float
    kappa: float
    omega_c: float
    Gamma_bare: float
    gamma_m: float
    P_in: float
    T: float
    Delta: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        for name in ("m", "ell", "Omega_bare", "kappa", "omega_c", "Gamma_bare", "gamma_m", "P_in"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.T) and self.T >= 0):
            raise ValueError(f"T must be finite and >= 0, got {self.T!r}")
        if not (math.isfinite(self.Delta) and math.isfinite(self.theta)):
            raise ValueError("Delta and theta must be finite")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def replace(self, **changes):
        return replace(self, **changes)


def from_hz(**kwargs):
    """Build SystemParams taking every frequency field as f = omega / 2 pi in Hz."""
    converted = {k: (v * TWO_PI if k in FREQUENCY_FIELDS else v) for k, v in kwargs.items()}
    return SystemParams(**converted)


def figure1_params(**overrides):
    """Parameter set of the single-mirror spectrum figure (theta = -pi/50, Delta = 0)."""
    base = dict(
        m=100e-6,
        ell=0.10,
        gamma_m=1e-6,
        Omega_bare=1e-3,
        kappa=1e8,
        omega_c=2.818e14,
        Gamma_bare=1e-18,
        P_in=1e-8,
        T=1.0,
        Delta=0.0,
        theta=-math.pi / 50,
    )
    p = from_hz(**{k: v for k, v in base.items()})
    return p.replace(**overrides) if overrides else p


@dataclass(frozen=True)
class DerivedParams:
    g: float
    omega_m: float
    g_m: float
    alpha: float
    xi: float
    n_th: float
    n_bar: float
    zeta: float
    Q_m: float
    C_m: float
    gamma_m: float
    kappa: float
    Delta: float

    @property
    def adiabatic(self):
        return self.kappa >= ADIABATIC_RATIO * self.omega_m

    def xi_from_cooperativity(self):
        """The cooperativity form (4 C_m / Q_m) / (1 + 4 Delta^2 / kappa^2)."""
        return 4.0 * self.C_m / self.Q_m / (1.0 + 4.0 * self.Delta**2 / self.kappa**2)


@dataclass(frozen=True)
class MeasurementCoeffs:
    c_theta: float
    L_theta: float
    lambda_theta: float
    Lambda_theta: float


@dataclass(frozen=True)
class FilterParams:
    omega_theta: float
    gamma_theta: float
    # gamma_theta - gamma_m, kept separately because it is the small
    # difference of two close numbers near theta = alpha
    damping_gap: float


def coupling(p):
    denom = p.m * p.Omega_bare * p.ell**2 * (p.kappa**2 + 4.0 * p.Delta**2)
    return math.sqrt(p.omega_c * p.P_in * p.kappa / denom)


def derive(p, warn=True):
    k2 = p.kappa**2 + 4.0 * p.Delta**2
    g = coupling(p)
    radicand = p.Omega_bare**2 + 16.0 * g**2 * p.Omega_bare * p.Delta / k2
    if radicand <= 0:
        raise OpticalSpringInstability(
            f"optical-spring instability: Omega^2 + 16 g^2 Omega Delta / (kappa^2 + 4 Delta^2) = {radicand:.6g} <= 0",
            radicand=radicand,
        )
    omega_m = math.sqrt(radicand)
    g_m = g * math.sqrt(p.Omega_bare / omega_m)
    alpha = math.atan(2.0 * p.Delta / p.kappa)
    xi = 16.0 * g_m**2 * p.kappa / (omega_m * k2)
    n_th = K_B * p.T * p.Gamma_bare / (HBAR * omega_m * p.gamma_m)
    thermal = 2.0 * p.gamma_m * (2.0 * n_th + 1.0)
    d = DerivedParams(
        g=g,
        omega_m=omega_m,
        g_m=g_m,
        alpha=alpha,
        xi=xi,
        n_th=n_th,
        n_bar=thermal + omega_m * xi,
        zeta=thermal / omega_m + xi,
        Q_m=omega_m / p.gamma_m,
        C_m=4.0 * g_m**2 / (p.gamma_m * p.kappa),
        gamma_m=p.gamma_m,
        kappa=p.kappa,
        Delta=p.Delta,
    )
    if warn and not d.adiabatic:
        warnings.warn(
            f"kappa / omega_m = {p.kappa / omega_m:.3g} < {ADIABATIC_RATIO:g}; adiabatic formulas are not trustworthy",
            AdiabaticityWarning,
            stacklevel=2,
        )
    return d


def measurement_coeffs(d, theta):
    amp = math.sqrt(d.omega_m * d.xi)
    phi = theta - d.alpha
    c = amp * math.sin(phi)
    L = amp * math.cos(phi)
    return MeasurementCoeffs(c_theta=c, L_theta=L, lambda_theta=c * c, Lambda_theta=c * L)


def filter_params(d, mc):
    """Resonance and damping of the Wiener-filtered (conditional) oscillator."""
    wm = d.omega_m
    lam, Lam = mc.lambda_theta, mc.Lambda_theta
    inner = wm * (wm + 2.0 * Lam) + d.n_bar * lam
    if inner < 0:
        raise NoStableConditionalState(
            "no stable conditional state at this point: omega_m (omega_m + 2 Lambda) + n_bar lambda < 0",
            radicand_omega=inner,
        )
    root = math.sqrt(inner)
    omega_theta = math.sqrt(wm * root)
    # gamma_theta^2 - gamma_m^2 = 2 (omega_theta^2 - omega_m (omega_m + Lambda)).
    # For omega_m + Lambda > 0 the bracket cancels; rationalize it using
    # root^2 - (omega_m + Lambda)^2 = lambda (n_bar - L^2).
    shift = wm + Lam
    if shift > 0:
        bracket = wm * lam * (d.n_bar - mc.L_theta**2) / (root + shift)
    else:
        bracket = omega_theta**2 - wm * shift
    gap_sq = 2.0 * bracket
    radicand = d.gamma_m**2 + gap_sq
    if radicand < 0:
        raise NoStableConditionalState(
            "no stable conditional state at this point: gamma_theta radicand < 0",
            radicand_omega=inner,
            radicand_gamma=radicand,
        )
    gamma_theta = math.sqrt(radicand)
    gap = gap_sq / (gamma_theta + d.gamma_m)
    return FilterParams(omega_theta=omega_theta, gamma_theta=gamma_theta, damping_gap=gap)


def gravitational_delta(rho, form_factor, Omega):
    """Dimensionless Newtonian coupling 4 G rho Lambda / Omega^2 between two mirrors."""
    if rho < 0 or form_factor <= 0 or Omega <= 0:
        raise ValueError("need rho >= 0, form_factor > 0, Omega > 0")
    delta = 4.0 * G_NEWTON * rho * form_factor / Omega**2
    if delta >= 1.0:
        raise DifferentialModeUnstable(
            f"differential mode unstable: delta = {delta:.6g} >= 1", delta=delta
        )
    return delta


def param_names():
    return tuple(f.name for f in fields(SystemParams))
