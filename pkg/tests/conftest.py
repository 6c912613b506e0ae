import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from optofilter.params import from_hz, figure1_params  # noqa: E402

SEED = 20251015


def draw_params(rng):
    """One physical SystemParams draw, log-uniform over broad lab-scale ranges.

    kappa is at least 1e3 times the bare frequency (the optical spring can
    still push a few draws out of the adiabatic regime); Delta/kappa stays in [0, 0.5].
    """
    def logu(lo, hi):
        return 10 ** rng.uniform(math.log10(lo), math.log10(hi))

    Omega = logu(1e-4, 1e2)
    kappa = Omega * logu(1e3, 1e11)
    gamma_m = Omega * logu(1e-6, 1e-1)
    p = from_hz(
        m=logu(1e-6, 1.0),
        ell=logu(1e-2, 1.0),
        Omega_bare=Omega,
        kappa=kappa,
        omega_c=logu(1e14, 1e15),
        Gamma_bare=gamma_m * logu(1e-12, 1.0),
        gamma_m=gamma_m,
        P_in=logu(1e-10, 1e-2),
        T=rng.uniform(0.0, 300.0),
        Delta=kappa * rng.uniform(0.0, 0.5),
        theta=0.0,
    )
    return p.replace(theta=rng.uniform(-math.pi, math.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def fig1():
    return figure1_params()


def random_draws(n, seed=SEED):
    rng = np.random.default_rng(seed)
    return [draw_params(rng) for _ in range(n)]
