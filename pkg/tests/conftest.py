import math

import numpy as np
import pytest
from scipy.integrate import quad

from wpnoma import ConstantPower, DynamicPower, GridSpec, SystemParams

# noise power for -174 dBm/Hz density over 10 MHz: -104 dBm
SIGMA2_W = 10.0 ** ((-104.0 - 30.0) / 10.0)
P_MAX_W = 40.0
XI = 0.5
P_SIC_W = 0.08

# figure parameter sets: d1 = 0.5 or 0.75 m, d2 = 10 or 1.2 m
@pytest.fixture(scope="session")
def fig2_params():
    return SystemParams.from_distances(0.5, 10.0, SIGMA2_W, P_MAX_W, XI)


@pytest.fixture(scope="session")
def fig3_params():
    return SystemParams.from_distances(0.5, 1.2, SIGMA2_W, P_MAX_W, XI)


@pytest.fixture(scope="session")
def fig4_params():
    return SystemParams.from_distances(0.75, 10.0, SIGMA2_W, P_MAX_W, XI)


@pytest.fixture(scope="session")
def const_model():
    return ConstantPower(P_SIC_W)


@pytest.fixture(scope="session")
def dyn_model():
    return DynamicPower(omega=0.044, p_r=0.03)


@pytest.fixture(scope="session")
def ci_grid():
    """4x coarser than the paper's search steps; used for CI-speed sweeps."""
    return GridSpec().coarsened(4.0)


@pytest.fixture(scope="session")
def coarse_grid():
    """Very coarse grid for cheap structural checks."""
    return GridSpec(dt=0.01, drho=0.01, dp_db=1.0)


def q_quadrature(x: float) -> float:
    """Gaussian tail by adaptive quadrature; independent of the erfc path."""
    val, _ = quad(
        lambda u: math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi),
        x,
        np.inf,
        epsabs=1e-15,
        epsrel=1e-13,
    )
    return val


def decode_denominator_quadrature(gamma: float) -> float:
    """sqrt(-log2(2 Q(sqrt(gamma)))) with Q from quadrature; valid while
    Q(sqrt(gamma)) stays representable (sqrt(gamma) <= ~37)."""
    if gamma == 0.0:
        return 0.0
    return math.sqrt(-math.log2(2.0 * q_quadrature(math.sqrt(gamma))))


def decode_denominator_mp(gamma: float) -> float:
    """Same quantity via arbitrary-precision erfc; usable at any SINR."""
    import mpmath

    if gamma == 0.0:
        return 0.0
    with mpmath.workdps(50):
        tail = mpmath.erfc(mpmath.sqrt(mpmath.mpf(gamma) / 2))
        return float(mpmath.sqrt(-mpmath.log(tail, 2)))


def random_params(rng: np.random.Generator) -> SystemParams:
    """Physically plausible random draw with h1 > h2."""
    h1 = 10.0 ** rng.uniform(-4.0, -1.5)
    h2 = h1 * rng.uniform(0.01, 0.99)
    return SystemParams(
        h1_sq=h1,
        h2_sq=h2,
        sigma2=10.0 ** rng.uniform(-14.0, -11.0),
        p_max=rng.uniform(1.0, 100.0),
        xi=rng.uniform(0.1, 0.9),
    )
