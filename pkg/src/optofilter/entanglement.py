"""Gravity-induced entanglement between two identical filtered mirrors.

The Newtonian coupling only shifts the differential mode, so each of the
common (+) and differential (-) modes is an independent single-mirror
problem with bare frequency Omega and Omega sqrt(1 - delta).  The mirror
(A, B) covariance follows by rotating the two mode covariances.
"""

import math
from dataclasses import dataclass

import numpy as np

from .covariance import HEISENBERG_TOL, CovMat2, conditional_state
from .errors import DifferentialModeUnstable, NumericalDegeneracy, UnphysicalState

FRAMES = ("mirror", "mode")

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
SYMPLECTIC_FORM = np.block([[_J, np.zeros((2, 2))], [np.zeros((2, 2)), _J]])


@dataclass(frozen=True)
class TwoModeCovariance:
    V_A: np.ndarray
    V_B: np.ndarray
    V_AB: np.ndarray

    def matrix(self):
        return np.block([[self.V_A, self.V_AB], [self.V_AB.T, self.V_B]])

    @classmethod
    def from_matrix(cls, V):
        V = np.asarray(V, dtype=float)
        return cls(V[:2, :2].copy(), V[2:, 2:].copy(), V[:2, 2:].copy())

    def min_bona_fide_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.matrix() + 1j * SYMPLECTIC_FORM).min())

    def is_bona_fide(self, tol=HEISENBERG_TOL):
        V = self.matrix()
        return np.allclose(V, V.T, rtol=0, atol=1e-12 * np.abs(V).max()) and self.min_bona_fide_eigenvalue() >= -tol


@dataclass(frozen=True)
class NegativityResult:
    nu_minus: float
    E_N: float

    @property
    def entangled(self):
        return self.E_N > 0


def mode_frequencies(Omega, delta):
    if not 0.0 <= delta < 1.0:
        raise DifferentialModeUnstable(f"differential mode unstable: delta = {delta!r} not in [0, 1)", delta=delta)
    return Omega, Omega * math.sqrt(1.0 - delta)


def mode_covariances(p, delta, theta=None):
    """Conditional states of the common and differential modes, each in its own filter frame."""
    theta = p.theta if theta is None else theta
    Om_plus, Om_minus = mode_frequencies(p.Omega_bare, delta)
    plus = conditional_state(p.replace(Omega_bare=Om_plus, theta=theta))
    minus = conditional_state(p.replace(Omega_bare=Om_minus, theta=theta))
    return plus, minus


def to_mirror_frame(state, Omega):
    """Re-express a mode covariance in quadratures normalized at the mirror frequency Omega.

    The filter frame scales q by sqrt(omega_m / Omega_mode) on top of the
    Omega_mode normalization, so q_mirror = q_frame sqrt(Omega / omega_m)
    and p_mirror = p_frame sqrt(omega_m / Omega).
    """
    s = math.sqrt(Omega / state.derived.omega_m)
    c = state.cov
    return CovMat2(c.V_qq * s * s, c.V_qp, c.V_pp / (s * s))


def assemble_two_mode(plus, minus):
    """Mirror-basis covariance from q_A = (q_+ + q_-)/sqrt 2, q_B = (q_+ - q_-)/sqrt 2."""
    Vp = plus.matrix()
    Vm = minus.matrix()
    V_A = 0.5 * (Vp + Vm)
    return TwoModeCovariance(V_A=V_A, V_B=V_A.copy(), V_AB=0.5 * (Vp - Vm))


def _nu_minus_hermitian(V):
    """Smallest partial-transpose symplectic eigenvalue from a Hermitian eigenproblem.

    With V = L L^T the eigenvalues of L^T (i Omega~) L are +-nu, where Omega~
    is the symplectic form with the sign of p_B flipped.  Hermitian
    eigenvalues stay accurate when the two nu coincide, where the
    closed-form root loses half its digits.
    """
    try:
        L = np.linalg.cholesky(V.matrix())
    except np.linalg.LinAlgError as exc:
        raise UnphysicalState("covariance matrix is not positive definite") from exc
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    form = flip @ SYMPLECTIC_FORM @ flip
    eig = np.linalg.eigvalsh(L.T @ (1j * form) @ L)
    return float(eig[eig > 0].min())


def log_negativity(V):
    """Smallest partial-transpose symplectic eigenvalue and E_N = max(0, -log2 nu_minus)."""
    det_V = float(np.linalg.det(V.matrix()))
    if det_V <= 0:
        raise UnphysicalState(f"covariance determinant {det_V:.6g} <= 0", det=det_V)
    sigma = float(np.linalg.det(V.V_A) + np.linalg.det(V.V_B) - 2.0 * np.linalg.det(V.V_AB))
    disc = sigma**2 - 4.0 * det_V
    if disc < -1e-12 * sigma**2:
        raise NumericalDegeneracy(
            f"complex symplectic eigenvalue: Sigma^2 - 4 det V = {disc:.6g}", sigma=sigma, det=det_V
        )
    if sigma <= 0:
        raise UnphysicalState(f"non-positive symplectic invariant Sigma = {sigma:.6g}", sigma=sigma)
    if disc < 1e-6 * sigma**2:
        nu = _nu_minus_hermitian(V)
    else:
        # (sigma - sqrt(disc)) / 2 cancels badly for strong squeezing; the two
        # roots multiply to det_V
        nu = math.sqrt(2.0 * det_V / (sigma + math.sqrt(disc)))
    return NegativityResult(nu_minus=nu, E_N=max(0.0, -math.log2(nu)))


def gie_point(p, delta, theta=None, frame="mirror"):
    """Logarithmic negativity of the two-mirror conditional state.

    ``frame="mirror"`` maps both mode covariances to quadratures normalized
    at the common bare frequency before rotating to (A, B); ``"mode"``
    rotates the filter-frame covariances directly.
    """
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}")
    plus, minus = mode_covariances(p, delta, theta)
    if frame == "mirror":
        cp = to_mirror_frame(plus, p.Omega_bare)
        cm = to_mirror_frame(minus, p.Omega_bare)
    else:
        cp, cm = plus.cov, minus.cov
    for c in (cp, cm):
        if not c.is_physical():
            raise UnphysicalState(f"mode covariance violates the uncertainty bound: det = {c.det:.12g}")
    return log_negativity(assemble_two_mode(cp, cm))
