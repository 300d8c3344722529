"""Boundary solvers for the constant decoding-power model.

For a target near-user rate ``r`` the far-user boundary rate is found in
closed form for the time-switching and power-splitting schemes, and via
two one-dimensional concave subproblems for the generalized scheme. At
the optimum every power/rate constraint is tight and the harvested
energy exactly covers the decoder draw (the "most economical" split),
which lets every free variable be written in terms of the sub-slot
fraction ``t`` alone:

    rho(t) = zeta - t / (1 - t),       zeta = p_sic / (xi h1^2 p_max)

The two subproblems split on which receiver limits the far user's rate
in sub-slot 2: its own decoder (when ``h2^2 <= (1 - rho) h1^2``) or the
near user's SIC stage (otherwise). Both reduce to maximizing a concave
function of ``t`` over the interval where the near user's rate cap

    f2(t) = (1 - t) log2(1 + (h1^2 p_max / sigma2) (1/(1-t) - zeta))

stays above ``r``; the interval and the maximizer are located by
bisection on derivative signs, O(log2(1/eps)) evaluations each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional

from .model import Allocation, DomainError, SystemParams, shannon_rate

_LN2 = math.log(2.0)

#: inward clamp for open interval endpoints (rho < 1 and the strict lower
#: t bound of the SIC-limited subproblem); excluded points are measure-zero
EPS_OPEN = 1e-12

#: relative slack when comparing a target rate against a feasibility bound,
#: so that the exact boundary value (computed by any algebraically
#: equivalent expression) still counts as feasible
_REL_SLACK = 1e-13

#: default bisection tolerance on t
DEFAULT_EPS = 1e-9


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE_R1 = "infeasible_r1"
    SCHEME_INFEASIBLE = "scheme_infeasible"


@dataclass(frozen=True)
class BoundaryResult:
    """Outcome of one boundary solve: the best far-user rate, the
    allocation achieving it, and a status.

    r2_star is NaN unless status is OPTIMAL.
    """

    r2_star: float
    alloc: Optional[Allocation]
    status: SolveStatus

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


_INFEASIBLE_R1 = BoundaryResult(math.nan, None, SolveStatus.INFEASIBLE_R1)
_SCHEME_INFEASIBLE = BoundaryResult(math.nan, None, SolveStatus.SCHEME_INFEASIBLE)


class _Derived(NamedTuple):
    """Scalars reused by every objective: alpha is UE 2's full-power rate,
    beta the gain ratio, zeta the decoder demand normalized by the peak
    harvest rate, gsnr = h1^2 p_max / sigma2."""

    alpha: float
    beta: float
    zeta: float
    gsnr: float
    t_u: float
    t_l: float


def _derived(params: SystemParams, p_sic: float) -> _Derived:
    alpha = params.ue2_capacity()
    beta = params.h2_sq / params.h1_sq
    zeta = p_sic / (params.xi * params.h1_sq * params.p_max)
    gsnr = params.h1_sq * params.p_max / params.sigma2
    t_u = zeta / (1.0 + zeta)
    t_l = 1.0 - 1.0 / (beta + zeta)
    return _Derived(alpha, beta, zeta, gsnr, t_u, t_l)


# ---------------------------------------------------------------------------
# objective / constraint functions of t
# ---------------------------------------------------------------------------

def f0(t: float, r: float, params: SystemParams) -> float:
    """Time-switching objective: far-user rate when the near user's rate
    r is squeezed into the 1-t fraction, alpha - (1-t) log2(beta 2^(r/(1-t)) + 1 - beta).

    Non-increasing in t on [0, 1).
    """
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    d = _derived(params, 0.0)
    x = r / (1.0 - t)
    # log2(beta 2^x + 1 - beta) = x + log2(beta + (1-beta) 2^-x), overflow-safe
    return d.alpha - (1.0 - t) * (x + math.log2(d.beta + (1.0 - d.beta) * 2.0 ** (-x)))


def _check_f1_domain(t: float, d: _Derived) -> None:
    if not 0.0 <= t <= d.t_u * (1.0 + _REL_SLACK):
        raise DomainError(f"t={t} outside [0, t_u={d.t_u}]")
    if d.zeta >= 1.0 and t <= 1.0 - 1.0 / d.zeta:
        raise DomainError(
            f"t={t} below the concavity bound 1 - 1/zeta = {1.0 - 1.0 / d.zeta}"
        )


def f1(t: float, r: float, params: SystemParams, p_sic: float) -> float:
    """Objective of the UE2-decoder-limited subproblem at the economical
    split rho(t) = zeta - t/(1-t):

    alpha - (1-t) log2( beta (2^(r/(1-t)) - 1) / (1/(1-t) - zeta) + 1 ).

    Concave on [0, t_u] (on (1 - 1/zeta, t_u] when zeta >= 1).
    """
    d = _derived(params, p_sic)
    _check_f1_domain(t, d)
    u = 1.0 - t
    big_d = 1.0 / u - d.zeta
    rx = r / u
    inv_e = 2.0 ** (-rx)
    log2_g = rx + math.log2(d.beta * (1.0 - inv_e) / big_d + inv_e)
    return d.alpha - u * log2_g


def f1_prime(t: float, r: float, params: SystemParams, p_sic: float) -> float:
    """Analytic derivative of f1 with respect to t (bisection on its sign
    needs noise-free values near the optimum)."""
    d = _derived(params, p_sic)
    _check_f1_domain(t, d)
    u = 1.0 - t
    big_d = 1.0 / u - d.zeta
    rx = r / u
    inv_e = 2.0 ** (-rx)
    log2_g = rx + math.log2(d.beta * (1.0 - inv_e) / big_d + inv_e)
    # d/dt [ -u log2 g ] with every E = 2^(r/u) factor scaled out by 1/E
    num = r * _LN2 * big_d - 1.0 + inv_e
    den = d.beta * big_d * (1.0 - inv_e) + big_d * big_d * inv_e
    if den == 0.0:  # only at r = 0 where num is exactly 0 as well
        return log2_g
    return log2_g - (d.beta / (u * _LN2)) * num / den


def f2(t: float, params: SystemParams, p_sic: float) -> float:
    """Near-user rate cap at the economical split with full sub-slot-2
    power, (1-t) log2(1 + gsnr (1/(1-t) - zeta)).

    Concave wherever the log argument is positive; raises DomainError
    otherwise. Independent of the target rate r.
    """
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    d = _derived(params, p_sic)
    u = 1.0 - t
    arg = 1.0 + d.gsnr * (1.0 / u - d.zeta)
    if arg <= 0.0:
        raise DomainError(f"rate-cap log argument nonpositive at t={t}")
    return u * math.log2(arg)


def f2_prime(t: float, params: SystemParams, p_sic: float) -> float:
    """Analytic derivative of f2 with respect to t."""
    if not 0.0 <= t < 1.0:
        raise DomainError(f"t must lie in [0, 1), got {t}")
    d = _derived(params, p_sic)
    u = 1.0 - t
    arg = 1.0 + d.gsnr * (1.0 / u - d.zeta)
    if arg <= 0.0:
        raise DomainError(f"rate-cap log argument nonpositive at t={t}")
    return (d.gsnr / (u * arg) - math.log(arg)) / _LN2


def f3(t: float, r: float, params: SystemParams, p_sic: float) -> float:
    """Objective of the SIC-limited subproblem, t*alpha + f2(t) - r.

    Concave (linear plus concave) wherever f2 is defined.
    """
    d = _derived(params, p_sic)
    return t * d.alpha + f2(t, params, p_sic) - r


def f3_prime(t: float, r: float, params: SystemParams, p_sic: float) -> float:
    d = _derived(params, p_sic)
    return d.alpha + f2_prime(t, params, p_sic)


# ---------------------------------------------------------------------------
# one-dimensional concave machinery
# ---------------------------------------------------------------------------

def maximize_concave(
    fun: Callable[[float], float],
    dfun: Callable[[float], float],
    t1: float,
    t2: float,
    eps: float = DEFAULT_EPS,
) -> tuple[float, float]:
    """Maximize a concave function on [t1, t2] by bisection on the sign of
    its derivative; O(log2(1/eps)) evaluations.

    Returns (argmax, value). Endpoint derivative signs short-circuit the
    search: dfun(t1) < 0 means the maximum sits at t1, dfun(t2) > 0 at t2.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if t2 < t1:
        raise ValueError(f"empty interval [{t1}, {t2}]")
    if t2 == t1:
        return t1, fun(t1)
    if dfun(t1) < 0.0:
        return t1, fun(t1)
    if dfun(t2) > 0.0:
        return t2, fun(t2)
    lo, hi = t1, t2
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        if dfun(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t_star = 0.5 * (lo + hi)
    return t_star, fun(t_star)


class SubproblemKind(Enum):
    P31C = "ue2_limited"
    P32C = "sic_limited"


@dataclass(frozen=True)
class ConvexSubproblem:
    """One concave-in-t subproblem: maximize its objective subject to
    f2(t) >= r on [t_lower, t_upper]."""

    kind: SubproblemKind
    params: SystemParams
    p_sic: float
    r: float
    t_lower: float
    t_upper: float

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError(f"r must be nonnegative, got {self.r}")
        if not 0.0 <= self.t_lower <= self.t_upper < 1.0:
            raise ValueError(
                f"need 0 <= t_lower <= t_upper < 1, got [{self.t_lower}, {self.t_upper}]"
            )

    @classmethod
    def ue2_limited(cls, params: SystemParams, p_sic: float, r: float) -> "ConvexSubproblem":
        d = _derived(params, p_sic)
        return cls(SubproblemKind.P31C, params, p_sic, r, max(0.0, d.t_l), d.t_u)

    @classmethod
    def sic_limited(cls, params: SystemParams, p_sic: float, r: float) -> "ConvexSubproblem":
        d = _derived(params, p_sic)
        if d.t_l < 0.0:
            raise ValueError("SIC-limited subproblem requires t_l >= 0")
        lo = 0.0 if d.zeta <= 1.0 else 1.0 - 1.0 / d.zeta + EPS_OPEN
        return cls(SubproblemKind.P32C, params, p_sic, r, max(0.0, lo), d.t_l)


def _bisect_crossing(
    fun: Callable[[float], float],
    r: float,
    t_feas: float,
    t_infeas: float,
    eps: float,
) -> float:
    """Locate the boundary of {t : fun(t) >= r} between a feasible and an
    infeasible endpoint; returns a point on the feasible side."""
    while abs(t_infeas - t_feas) > eps:
        mid = 0.5 * (t_feas + t_infeas)
        if fun(mid) >= r:
            t_feas = mid
        else:
            t_infeas = mid
    return t_feas


def feasible_interval(
    sub: ConvexSubproblem, eps: float = DEFAULT_EPS
) -> Optional[tuple[float, float]]:
    """The set {t in [t_lower, t_upper] : f2(t) >= r}, an interval by
    concavity of f2, or None when empty.

    Four endpoint cases; when both endpoints fall below r the interior is
    probed by maximizing f2 (derivative-sign bisection): the concave
    maximum is the canonical witness of nonemptiness.
    """
    params, p_sic, r = sub.params, sub.p_sic, sub.r
    cap = lambda t: f2(t, params, p_sic)
    dcap = lambda t: f2_prime(t, params, p_sic)
    t1, t2 = sub.t_lower, sub.t_upper
    v1, v2 = cap(t1), cap(t2)

    if v1 >= r and v2 >= r:
        return (t1, t2)
    if v1 < r <= v2:
        return (_bisect_crossing(cap, r, t2, t1, eps), t2)
    if v1 >= r > v2:
        return (t1, _bisect_crossing(cap, r, t1, t2, eps))

    t0, v0 = maximize_concave(cap, dcap, t1, t2, eps)
    if v0 < r - 1e-12 * (1.0 + abs(r)):
        return None
    if v0 < r:  # graze within slack: degenerate interval at the maximizer
        return (t0, t0)
    return (
        _bisect_crossing(cap, r, t0, t1, eps),
        _bisect_crossing(cap, r, t0, t2, eps),
    )


# ---------------------------------------------------------------------------
# allocation reconstruction
# ---------------------------------------------------------------------------

def _alloc_from_t(t: float, r: float, rho: float, params: SystemParams) -> Allocation:
    """Rebuild the full operating point from (t, rho): peak power in both
    sub-slots, UE 1's rate constraint tight (minimal p1_2), the remainder
    to UE 2 at the smaller of its two decodability caps."""
    h1, h2, s2, pmax = params.h1_sq, params.h2_sq, params.sigma2, params.p_max
    rho = min(max(rho, 0.0), 1.0 - EPS_OPEN)
    r1_2 = r / (1.0 - t)
    p1_2 = s2 * (2.0 ** r1_2 - 1.0) / ((1.0 - rho) * h1)
    p1_2 = min(p1_2, pmax)  # clears bisection-level overshoot only
    p2_2 = pmax - p1_2
    r2_2 = min(
        float(shannon_rate(h2, p2_2, p1_2, s2)),
        float(shannon_rate(h1 * (1.0 - rho), p2_2, p1_2, s2)),
    )
    return Allocation(
        t=t, rho=rho, p2_1=pmax, p1_2=p1_2, p2_2=p2_2,
        r2_1=params.ue2_capacity(), r1_2=r1_2, r2_2=r2_2,
    )


def _optimal(alloc: Allocation) -> BoundaryResult:
    return BoundaryResult(alloc.r2, alloc, SolveStatus.OPTIMAL)


# ---------------------------------------------------------------------------
# scheme boundaries
# ---------------------------------------------------------------------------

def ts_r1_max(params: SystemParams, p_sic: float) -> float:
    """Largest near-user rate the time-switching scheme supports: beyond
    it no far-user sacrifice helps, because the harvesting sub-slot can
    never shrink to zero (the region's cut-off line)."""
    d = _derived(params, p_sic)
    return (1.0 - d.t_u) * params.ue1_capacity()


def ps_feasible(params: SystemParams, p_sic: float) -> bool:
    """Power splitting supports nonzero rate pairs only when a full-slot
    harvest at peak power can cover the decoder: xi h1^2 p_max > p_sic."""
    return params.h1_sq > p_sic / (params.xi * params.p_max)


def ps_r1_max(params: SystemParams, p_sic: float) -> float:
    """Largest near-user rate of the power-splitting scheme (0.0 when the
    scheme is infeasible)."""
    if not ps_feasible(params, p_sic):
        return 0.0
    num = params.xi * params.h1_sq * params.p_max - p_sic
    return math.log2(1.0 + num / (params.xi * params.sigma2))


def generalized_r1_max(params: SystemParams, p_sic: float, eps: float = DEFAULT_EPS) -> float:
    """Largest near-user rate of the generalized scheme: the maximum of
    the rate cap f2 over the union of both subproblems' t ranges."""
    d = _derived(params, p_sic)
    lo = 0.0 if d.zeta <= 1.0 else 1.0 - 1.0 / d.zeta + EPS_OPEN
    _, val = maximize_concave(
        lambda t: f2(t, params, p_sic),
        lambda t: f2_prime(t, params, p_sic),
        lo,
        d.t_u,
        eps,
    )
    return val


def ts_boundary(r: float, params: SystemParams, p_sic: float) -> BoundaryResult:
    """Closed-form time-switching boundary: the objective is non-increasing
    in t, so the optimum sits at the smallest energy-feasible t, where the
    harvested energy exactly equals the decoder demand."""
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    d = _derived(params, p_sic)
    if r > ts_r1_max(params, p_sic) * (1.0 + _REL_SLACK):
        return _INFEASIBLE_R1
    return _optimal(_alloc_from_t(d.t_u, r, 0.0, params))


def ps_boundary(r: float, params: SystemParams, p_sic: float) -> BoundaryResult:
    """Closed-form power-splitting boundary at the economical split
    rho = zeta; SCHEME_INFEASIBLE when the near-user channel cannot
    harvest the decoder demand even at rho -> 1."""
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if not ps_feasible(params, p_sic):
        return _SCHEME_INFEASIBLE
    d = _derived(params, p_sic)
    if r > ps_r1_max(params, p_sic) * (1.0 + _REL_SLACK):
        return _INFEASIBLE_R1
    return _optimal(_alloc_from_t(0.0, r, d.zeta, params))


def solve_p31c(
    r: float, params: SystemParams, p_sic: float, eps: float = DEFAULT_EPS
) -> BoundaryResult:
    """Maximize f1 over the UE2-decoder-limited subproblem's feasible
    interval; time switching is its t = t_u endpoint."""
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    sub = ConvexSubproblem.ue2_limited(params, p_sic, r)
    interval = feasible_interval(sub, eps)
    if interval is None:
        return _INFEASIBLE_R1
    t_star, _ = maximize_concave(
        lambda t: f1(t, r, params, p_sic),
        lambda t: f1_prime(t, r, params, p_sic),
        interval[0],
        interval[1],
        eps,
    )
    d = _derived(params, p_sic)
    rho = d.zeta - t_star / (1.0 - t_star)
    return _optimal(_alloc_from_t(t_star, r, rho, params))


def solve_p32c(
    r: float, params: SystemParams, p_sic: float, eps: float = DEFAULT_EPS
) -> BoundaryResult:
    """Maximize f3 over the SIC-limited subproblem's feasible interval;
    exists only when h2^2 >= h1^2 - p_sic/(xi p_max) (t_l >= 0)."""
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    d = _derived(params, p_sic)
    if d.t_l < 0.0:
        return _SCHEME_INFEASIBLE
    sub = ConvexSubproblem.sic_limited(params, p_sic, r)
    interval = feasible_interval(sub, eps)
    if interval is None:
        return _INFEASIBLE_R1
    t_star, _ = maximize_concave(
        lambda t: f3(t, r, params, p_sic),
        lambda t: f3_prime(t, r, params, p_sic),
        interval[0],
        interval[1],
        eps,
    )
    rho = d.zeta - t_star / (1.0 - t_star)
    return _optimal(_alloc_from_t(t_star, r, rho, params))


def generalized_boundary(
    r: float, params: SystemParams, p_sic: float, eps: float = DEFAULT_EPS
) -> BoundaryResult:
    """Boundary of the generalized scheme: the better of the two
    subproblems (only the UE2-limited one exists when the gain gap is
    wide); INFEASIBLE_R1 only if both come up empty."""
    d = _derived(params, p_sic)
    res1 = solve_p31c(r, params, p_sic, eps)
    if d.t_l < 0.0:
        return res1
    res2 = solve_p32c(r, params, p_sic, eps)
    if not res2.is_optimal:
        return res1
    if not res1.is_optimal:
        return res2
    return res1 if res1.r2_star >= res2.r2_star else res2
