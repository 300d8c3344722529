"""Core model of a two-user downlink NOMA link with a wirelessly powered
SIC decoder at the near user.

The base station serves a near user (UE 1) and a far user (UE 2) in the
same band via power-domain superposition. Each slot (length normalized
to 1) splits into two sub-slots: in the first, of length ``t``, UE 1
purely harvests while only UE 2's data is sent; in the second, of length
``1 - t``, UE 1 splits the received power, a fraction ``rho`` to the
harvester and ``1 - rho`` to the decoder. UE 1 must first decode UE 2's
stream (to cancel it) and then its own, and the harvested energy has to
cover the decoder's consumption.

All rates are spectral efficiencies in bits/s/Hz, all powers in watts.
Everything here is a pure function of its inputs; values are immutable
after construction and safe to evaluate from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erfc, erfcx

_LN2 = math.log(2.0)


class NonPositiveDistance(ValueError):
    """Raised when a path-loss distance is not strictly positive."""


class DomainError(ValueError):
    """Raised when a boundary-objective helper is evaluated outside the
    range where its closed form is defined (and concave/monotone)."""


class InfeasibleTargetRate(ValueError):
    """Raised when a target near-user rate exceeds what the channel can
    support regardless of the remaining free variables."""


class Scheme(str, Enum):
    """Receiver operating scheme for the near user.

    TS harvests only in the first sub-slot (``rho = 0``), PS splits power
    within a single slot (``t = 0``), GEN frees both knobs, and TDMA is
    the orthogonal baseline (UE 2 first, then UE 1 alone).
    """

    TS = "ts"
    PS = "ps"
    GEN = "gen"
    TDMA = "tdma"


@dataclass(frozen=True)
class SystemParams:
    """Deterministic link parameters.

    h1_sq, h2_sq : float
        Linear power gains BS->UE1 and BS->UE2 (dimensionless). UE 1 is
        the near user, so ``h1_sq > h2_sq`` is required.
    sigma2 : float
        Noise power at either receiver (watts).
    p_max : float
        Peak BS transmit power (watts), applying per sub-slot.
    xi : float
        RF energy harvesting efficiency, 0 < xi < 1.
    """

    h1_sq: float
    h2_sq: float
    sigma2: float
    p_max: float
    xi: float

    def __post_init__(self):
        if not (self.h1_sq > self.h2_sq > 0.0):
            raise ValueError(
                f"need h1_sq > h2_sq > 0, got h1_sq={self.h1_sq}, h2_sq={self.h2_sq}"
            )
        if self.sigma2 <= 0.0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if self.p_max <= 0.0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")
        if not 0.0 < self.xi < 1.0:
            raise ValueError(f"xi must lie in (0, 1), got {self.xi}")

    @classmethod
    def from_distances(cls, d1_m, d2_m, sigma2, p_max, xi) -> "SystemParams":
        """Build params from user distances via the line-of-sight path loss."""
        return cls(
            h1_sq=pathloss_gain(d1_m),
            h2_sq=pathloss_gain(d2_m),
            sigma2=sigma2,
            p_max=p_max,
            xi=xi,
        )

    def ue1_capacity(self) -> float:
        """Interference-free full-power rate cap of UE 1, log2(1 + h1^2 Pmax / sigma2)."""
        return math.log2(1.0 + self.h1_sq * self.p_max / self.sigma2)

    def ue2_capacity(self) -> float:
        """Interference-free full-power rate cap of UE 2, log2(1 + h2^2 Pmax / sigma2).

        This is the largest far-user rate of any scheme (all power to UE 2).
        """
        return math.log2(1.0 + self.h2_sq * self.p_max / self.sigma2)


@dataclass(frozen=True)
class ConstantPower:
    """Constant decoding-power model: the SIC receiver draws ``p_sic``
    watts whenever the near user is decoding, independent of rates."""

    p_sic: float

    def __post_init__(self):
        if self.p_sic < 0.0:
            raise ValueError(f"p_sic must be nonnegative, got {self.p_sic}")


@dataclass(frozen=True)
class DynamicPower:
    """Rate-dependent decoding-power model.

    Decoding a stream of rate R (bits/s/Hz) at SINR gamma consumes
    ``omega * R / sqrt(-log2(2 Q(sqrt(gamma))))`` watts, on top of a
    constant analog front-end draw ``p_r``. ``omega`` is the circuit /
    block-length coefficient (watts per bit/s/Hz after the dimensionless
    error-exponent factor).
    """

    omega: float
    p_r: float

    def __post_init__(self):
        if self.omega < 0.0:
            raise ValueError(f"omega must be nonnegative, got {self.omega}")
        if self.p_r < 0.0:
            raise ValueError(f"p_r must be nonnegative, got {self.p_r}")


PowerModel = ConstantPower | DynamicPower


@dataclass(frozen=True)
class Allocation:
    """One full operating point of the two-sub-slot schedule.

    t : first sub-slot fraction, 0 <= t < 1
    rho : power-split fraction to the harvester in sub-slot 2, 0 <= rho < 1
    p2_1 : transmit power for UE 2 in sub-slot 1 (watts)
    p1_2, p2_2 : transmit powers for UE 1 / UE 2 in sub-slot 2 (watts)
    r2_1, r1_2, r2_2 : per-sub-slot spectral efficiencies (bits/s/Hz)
    """

    t: float
    rho: float
    p2_1: float
    p1_2: float
    p2_2: float
    r2_1: float
    r1_2: float
    r2_2: float

    def __post_init__(self):
        if not 0.0 <= self.t < 1.0:
            raise ValueError(f"t must lie in [0, 1), got {self.t}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        for name in ("p2_1", "p1_2", "p2_2", "r2_1", "r1_2", "r2_2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @property
    def r1(self) -> float:
        """Slot-average rate of UE 1, (1 - t) * r1_2."""
        return (1.0 - self.t) * self.r1_2

    @property
    def r2(self) -> float:
        """Slot-average rate of UE 2, t * r2_1 + (1 - t) * r2_2."""
        return self.t * self.r2_1 + (1.0 - self.t) * self.r2_2


ZERO_ALLOCATION = Allocation(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RatePoint:
    """One (R1, R2) pair in bits/s/Hz with the allocation achieving it.

    When ``feasible`` the allocation satisfies every schedule constraint
    within tolerance; the single exception is the trivial r1 = 0 corner,
    where the near user decodes nothing and the decoder draws no power.
    """

    r1: float
    r2: float
    alloc: Allocation
    feasible: bool


@dataclass(frozen=True)
class RegionBoundary:
    """Ordered sweep of boundary points for one scheme.

    Points are sorted by r1 ascending; along the feasible portion r2 is
    non-increasing (up to grid tolerance for grid-searched boundaries).
    """

    scheme: Scheme
    points: tuple[RatePoint, ...]
    r1_max: float

    def feasible_points(self) -> list[RatePoint]:
        return [p for p in self.points if p.feasible]

    def validate(self, r2_tol: float = 1e-9) -> None:
        """Check the ordering invariants; raises ValueError on violation."""
        r1s = [p.r1 for p in self.points]
        if any(b <= a for a, b in zip(r1s, r1s[1:])):
            raise ValueError("r1 values must be strictly increasing")
        feas = self.feasible_points()
        for a, b in zip(feas, feas[1:]):
            if b.r2 > a.r2 + r2_tol:
                raise ValueError(
                    f"r2 must be non-increasing along the boundary: "
                    f"r2({b.r1})={b.r2} > r2({a.r1})={a.r2}"
                )


# ---------------------------------------------------------------------------
# channel / energy primitives
# ---------------------------------------------------------------------------

def pathloss_gain(d: float) -> float:
    """Linear power gain of the line-of-sight path-loss law
    PL = 30.8 + 24.2 log10(d) dB at distance d meters."""
    if d <= 0.0:
        raise NonPositiveDistance(f"distance must be positive, got {d}")
    pl_db = 30.8 + 24.2 * math.log10(d)
    return 10.0 ** (-pl_db / 10.0)


def shannon_rate(gain, p_signal, p_interf, sigma2):
    """log2(1 + gain*p_signal / (gain*p_interf + sigma2)) in bits/s/Hz.

    Accepts scalars or broadcastable arrays; non-decreasing in p_signal
    and non-increasing in p_interf.
    """
    return np.log2(1.0 + gain * p_signal / (gain * p_interf + sigma2))


def harvested_energy(params: SystemParams, alloc: Allocation) -> float:
    """Slot-normalized energy captured by UE 1's harvester (watts).

    Sub-slot 1 harvests everything; sub-slot 2 only the rho fraction.
    """
    h1 = params.h1_sq
    xi = params.xi
    return (
        alloc.t * xi * h1 * alloc.p2_1
        + (1.0 - alloc.t) * alloc.rho * xi * h1 * (alloc.p1_2 + alloc.p2_2)
    )


# ---------------------------------------------------------------------------
# Gaussian tail / decoding power
# ---------------------------------------------------------------------------

def q_function(x):
    """Standard normal tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).

    Accurate to ~1e-15 absolute for |x| <= 8; vectorized.
    """
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def decode_denominator(gamma):
    """sqrt(-log2(2 Q(sqrt(gamma)))), the error-exponent factor that
    divides the decoding-power law.

    Computed in log space via the scaled complementary error function,
    -log2(2 Q(x)) = (x^2/2 - ln erfcx(x/sqrt(2))) / ln 2,
    which stays accurate where Q underflows (sqrt(gamma) > ~38). Returns
    0 at gamma = 0; strictly increasing in gamma. A zero return means a
    positive rate would need infinite decoding power.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("gamma must be nonnegative")
    half = 0.5 * g
    val = np.sqrt((half - np.log(erfcx(np.sqrt(half)))) / _LN2)
    if np.isscalar(gamma) or np.ndim(gamma) == 0:
        return float(val)
    return val


def decoding_power_dynamic(model: DynamicPower, r1_2, r2_2, gamma1, gamma2) -> float:
    """Total near-user receive power (watts) under the rate-dependent law:
    omega*r1_2/den(gamma1) + omega*r2_2/den(gamma2) + p_r.

    A zero-rate stream costs nothing regardless of its SINR; a positive
    rate at zero SINR returns math.inf (an ordinary infeasible value, not
    an error, so grid sweeps can include such corners).
    """
    total = model.p_r
    for rate, gamma in ((r1_2, gamma1), (r2_2, gamma2)):
        if rate > 0.0:
            den = decode_denominator(gamma)
            if den == 0.0:
                return math.inf
            total += model.omega * rate / den
    return total


# ---------------------------------------------------------------------------
# feasibility
# ---------------------------------------------------------------------------

#: identifiers reported by check_feasible, in check order
CONSTRAINTS = (
    "p2_1_peak",      # sub-slot 1 power within budget
    "r2_1_cap",       # UE 2 rate within sub-slot-1 capacity
    "p_sum_peak",     # sub-slot 2 total power within budget
    "r1_2_cap",       # UE 1 rate within its split-receiver capacity
    "r2_2_ue2_cap",   # UE 2 rate decodable at UE 2
    "r2_2_sic_cap",   # UE 2 rate decodable at UE 1's SIC stage
    "energy",         # harvested energy covers decoding consumption
)


def check_feasible(
    params: SystemParams,
    model: PowerModel,
    alloc: Allocation,
    tol: float = 1e-9,
) -> tuple[bool, list[str]]:
    """Check every schedule constraint within absolute tolerance ``tol``.

    Returns (ok, violations) where violations lists the identifiers from
    CONSTRAINTS that fail. The energy constraint charges the decoder only
    when the near user actually decodes (r1_2 > 0): an allocation with
    r1_2 = 0 has the whole receive chain off, which makes the all-zero
    allocation (and the trivial r1 = 0 boundary point) feasible.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    h1, h2, s2 = params.h1_sq, params.h2_sq, params.sigma2
    one_rho = 1.0 - alloc.rho
    violations = []

    if alloc.p2_1 > params.p_max + tol:
        violations.append("p2_1_peak")
    if alloc.r2_1 > shannon_rate(h2, alloc.p2_1, 0.0, s2) + tol:
        violations.append("r2_1_cap")
    if alloc.p1_2 + alloc.p2_2 > params.p_max + tol:
        violations.append("p_sum_peak")
    if alloc.r1_2 > shannon_rate(h1 * one_rho, alloc.p1_2, 0.0, s2) + tol:
        violations.append("r1_2_cap")
    if alloc.r2_2 > shannon_rate(h2, alloc.p2_2, alloc.p1_2, s2) + tol:
        violations.append("r2_2_ue2_cap")
    if alloc.r2_2 > shannon_rate(h1 * one_rho, alloc.p2_2, alloc.p1_2, s2) + tol:
        violations.append("r2_2_sic_cap")

    if alloc.r1_2 > 0.0:
        if isinstance(model, ConstantPower):
            demand = (1.0 - alloc.t) * model.p_sic
        else:
            gamma1 = h1 * one_rho * alloc.p1_2 / s2
            gamma2 = h1 * one_rho * alloc.p2_2 / (h1 * one_rho * alloc.p1_2 + s2)
            demand = (1.0 - alloc.t) * decoding_power_dynamic(
                model, alloc.r1_2, alloc.r2_2, gamma1, gamma2
            )
        if harvested_energy(params, alloc) < demand - tol:
            violations.append("energy")

    return (not violations, violations)
