"""Grid-search solvers for the rate-dependent decoding-power model.

With decoding power proportional to rate (and inversely to the error
exponent of the stream's SINR), the tight-constraint structure of the
constant-power solvers no longer applies: the near user may deliberately
back off a rate to save decoder power. The boundary is found by
discretizing the three free knobs:

  t    : first sub-slot fraction, in [0, t_max]
  rho  : harvester split,          in [0, rho_max(t)]
  p1   : UE 1 transmit power,      in [p_min(t, rho), p_max]

where the ranges come from requiring the target rate ``r`` to stay
decodable. The exhaustive search sweeps all three (p1 on a dB-spaced
lattice anchored at p_max, with the exact p_min always included); the
suboptimal search pins p1 = p_min, dropping the complexity from O(N^3)
to O(N^2) per target rate. At each grid point the far-user sub-slot-2
rate is the smallest of its two decodability caps and the power-budget
cap; a negative power-budget cap marks the point infeasible.

Grid evaluation is a pure map-reduce; the argmax tie-break (smallest t,
then rho, then p1) makes results independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import (
    Allocation,
    DynamicPower,
    InfeasibleTargetRate,
    Scheme,
    SystemParams,
    decode_denominator,
)
from .solver_constant import BoundaryResult, SolveStatus, _INFEASIBLE_R1, _optimal

#: smallest lattice power relative to p_max (dB spacing is undefined at 0)
P_FLOOR_REL = 1e-12

_REL_SLACK = 1e-13


@dataclass(frozen=True)
class GridSpec:
    """Search step sizes: dt and drho are absolute steps on the unit
    interval, dp_db the p1 step in dB."""

    dt: float = 1e-3
    drho: float = 1e-3
    dp_db: float = 0.1

    def __post_init__(self):
        for name in ("dt", "drho", "dp_db"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def coarsened(self, factor: float) -> "GridSpec":
        """Scale every step by ``factor`` (e.g. 4 for quick CI sweeps)."""
        return GridSpec(self.dt * factor, self.drho * factor, self.dp_db * factor)


def search_ranges(
    r: float, params: SystemParams, t: float = 0.0, rho: float = 0.0
) -> tuple[float, float, float]:
    """Search-range bounds (t_max, rho_max, p_min) for target rate r.

    The bounds are consumed progressively: t_max needs only r, rho_max
    additionally t, p_min additionally rho. Raises InfeasibleTargetRate
    when r exceeds the near user's capacity or the given (t, rho) leave
    no feasible p1.
    """
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if not 0.0 <= t < 1.0 or not 0.0 <= rho < 1.0:
        raise ValueError("t and rho must lie in [0, 1)")
    c1 = params.ue1_capacity()
    if r > c1 * (1.0 + _REL_SLACK):
        raise InfeasibleTargetRate(f"r={r} exceeds near-user capacity {c1}")
    t_max = 1.0 - r / c1
    h1, s2, pmax = params.h1_sq, params.sigma2, params.p_max
    snr_needed = 2.0 ** (r / (1.0 - t)) - 1.0
    rho_max = 1.0 - s2 * snr_needed / (h1 * pmax)
    if rho_max < 0.0:
        raise InfeasibleTargetRate(f"no rho supports r={r} at t={t}")
    p_min = s2 * snr_needed / (h1 * (1.0 - rho))
    if p_min > pmax * (1.0 + _REL_SLACK):
        raise InfeasibleTargetRate(f"no p1 supports r={r} at t={t}, rho={rho}")
    return t_max, rho_max, p_min


def r2_candidates(
    t: float,
    rho: float,
    p1: float,
    r: float,
    params: SystemParams,
    model: DynamicPower,
) -> tuple[float, float, float]:
    """The three caps on the far user's sub-slot-2 rate at one grid point:
    (SIC-stage cap at UE 1, UE 2's own cap, power-budget cap).

    The power-budget cap may be negative (the point cannot even fund the
    near user's own stream) or +inf (no power limit when omega = 0); a
    zero-SINR far-user stream caps at exactly 0 when the remaining budget
    is nonnegative and -inf otherwise.
    """
    h1, h2, s2, pmax = params.h1_sq, params.h2_sq, params.sigma2, params.p_max
    if p1 > pmax * (1.0 + _REL_SLACK):
        raise ValueError(f"p1={p1} exceeds p_max={pmax}")
    p2 = max(pmax - p1, 0.0)
    one_rho = 1.0 - rho
    gamma1 = h1 * one_rho * p1 / s2
    gamma2 = h1 * one_rho * p2 / (h1 * one_rho * p1 + s2)
    r2_1cap = math.log2(1.0 + gamma2)
    r2_2cap = math.log2(1.0 + h2 * p2 / (h2 * p1 + s2))

    budget = params.xi * h1 * pmax * (t / (1.0 - t) + rho) - model.p_r
    if r > 0.0:
        den1 = decode_denominator(gamma1)
        budget = -math.inf if den1 == 0.0 else budget - model.omega * r / ((1.0 - t) * den1)
    if model.omega == 0.0:
        r2_p = math.inf if budget >= 0.0 else -math.inf
    else:
        den2 = decode_denominator(gamma2)
        if den2 == 0.0:
            r2_p = 0.0 if budget >= 0.0 else -math.inf
        else:
            r2_p = den2 * budget / model.omega
    return r2_1cap, r2_2cap, r2_p


# ---------------------------------------------------------------------------
# vectorized internals
# ---------------------------------------------------------------------------

def _axis_values(step: float, upper: float) -> np.ndarray:
    """{0, step, ..., floor(upper/step)*step}, clipped to [0, 1)."""
    if upper < 0.0:
        return np.empty(0)
    n = int(math.floor(upper / step * (1.0 + 1e-12)))
    vals = step * np.arange(n + 1)
    return vals[vals < 1.0]


def _p_lattice(p_max: float, dp_db: float) -> np.ndarray:
    """dB-spaced p1 lattice anchored at p_max, descending to the relative
    floor; returned ascending."""
    n_db = int(math.ceil(10.0 * math.log10(1.0 / P_FLOOR_REL) / dp_db))
    k = np.arange(n_db, -1, -1, dtype=float)
    return p_max * 10.0 ** (-dp_db * k / 10.0)


def _t_values(r: float, params: SystemParams, grid: GridSpec, scheme: Scheme) -> np.ndarray:
    t_max = 1.0 - r / params.ue1_capacity()
    if scheme is Scheme.PS:
        return np.zeros(1)
    return _axis_values(grid.dt, t_max)


def _rho_base(grid: GridSpec, scheme: Scheme) -> np.ndarray:
    if scheme is Scheme.TS:
        return np.zeros(1)
    return _axis_values(grid.drho, 1.0)


def _budget_cap(d2, budget, omega):
    """Vectorized power-budget rate cap with the zero-SINR convention."""
    if omega == 0.0:
        return np.where(budget >= 0.0, np.inf, -np.inf)
    with np.errstate(invalid="ignore"):
        raw = d2 * budget / omega
    return np.where(d2 > 0.0, raw, np.where(budget >= 0.0, 0.0, -np.inf))


def _suboptimal_scan(r, params, model, grid, scheme):
    """Best grid point with p1 pinned at p_min; returns
    (value, t, rho, p1, r2_2) or None when no point is feasible."""
    h1, h2, s2, pmax = params.h1_sq, params.h2_sq, params.sigma2, params.p_max
    xi = params.xi
    alpha = params.ue2_capacity()
    if r > params.ue1_capacity() * (1.0 + _REL_SLACK):
        return None

    t_vals = _t_values(r, params, grid, scheme)
    rho_vals = _rho_base(grid, scheme)
    if t_vals.size == 0 or rho_vals.size == 0:
        return None
    u = 1.0 - t_vals
    with np.errstate(over="ignore"):
        snr_needed = np.exp2(r / u) - 1.0  # target SINR for UE 1 at p_min
    rho_max = 1.0 - s2 * snr_needed / (h1 * pmax)
    ok = rho_vals[None, :] <= rho_max[:, None] * (1.0 + 1e-15) + 1e-300

    one_rho = 1.0 - rho_vals
    p_min = s2 * snr_needed[:, None] / (h1 * one_rho[None, :])
    gamma2 = (h1 * one_rho[None, :] * pmax / s2 - snr_needed[:, None]) / (
        1.0 + snr_needed[:, None]
    )
    gamma2 = np.where(ok, gamma2, 0.0)
    d2 = decode_denominator(gamma2)
    r2_1cap = np.log2(1.0 + gamma2)
    p_min_ok = np.where(ok, p_min, 0.0)
    r2_2cap = np.log2(1.0 + h2 * (pmax - p_min_ok) / (h2 * p_min_ok + s2))

    budget = xi * h1 * pmax * ((t_vals / u)[:, None] + rho_vals[None, :]) - model.p_r
    if r > 0.0:
        d1 = decode_denominator(snr_needed)
        with np.errstate(divide="ignore"):
            budget = budget - model.omega * r / (u * d1)[:, None]
    r2_p = _budget_cap(d2, budget, model.omega)

    r2_eff = np.minimum(np.minimum(r2_1cap, r2_2cap), r2_p)
    obj = np.where(
        ok & (r2_p >= 0.0), t_vals[:, None] * alpha + u[:, None] * r2_eff, -np.inf
    )
    flat = int(np.argmax(obj))
    best = obj.flat[flat]
    if best == -np.inf:
        return None
    i, j = np.unravel_index(flat, obj.shape)
    return (
        float(best),
        float(t_vals[i]),
        float(rho_vals[j]),
        float(p_min[i, j]),
        float(r2_eff[i, j]),
    )


@lru_cache(maxsize=4)
def _lattice_tables(params: SystemParams, grid: GridSpec):
    """Per-(params, grid) tables over the full (rho, p1-lattice) plane:
    decode denominators of both streams and the two decodability caps.
    These are target-rate independent, hence cached."""
    h1, h2, s2, pmax = params.h1_sq, params.h2_sq, params.sigma2, params.p_max
    rho = _axis_values(grid.drho, 1.0)
    p1 = _p_lattice(pmax, grid.dp_db)
    one_rho = (1.0 - rho)[:, None]
    p2 = pmax - p1
    gamma1 = h1 * one_rho * p1[None, :] / s2
    gamma2 = h1 * one_rho * p2[None, :] / (h1 * one_rho * p1[None, :] + s2)
    d1 = decode_denominator(gamma1)
    d2 = decode_denominator(gamma2)
    caps = np.minimum(np.log2(1.0 + gamma2), np.log2(1.0 + h2 * p2 / (h2 * p1 + s2)))
    return rho, p1, d1, d2, caps


def _chunk_size(n_rho: int, n_p: int, target: int = 1 << 22) -> int:
    return max(1, target // max(1, n_rho * n_p))


def suboptimal_search(
    r: float,
    params: SystemParams,
    model: DynamicPower,
    grid: GridSpec,
    scheme: Scheme = Scheme.GEN,
) -> BoundaryResult:
    """O(N^2) boundary search with p1 pinned at its minimum: assumes the
    near user's rate constraint holds with equality, as it does in every
    constant-power optimum. Matches the exhaustive optimum whenever that
    assumption is harmless; can be infeasible where it is not.
    """
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if scheme is Scheme.TDMA:
        raise ValueError("TDMA is a baseline, not a searchable NOMA scheme")
    hit = _suboptimal_scan(r, params, model, grid, scheme)
    if hit is None:
        return _INFEASIBLE_R1
    _, t, rho, p1, r2_2 = hit
    return _optimal(_assemble(t, rho, p1, r2_2, r, params))


def exhaustive_search(
    r: float,
    params: SystemParams,
    model: DynamicPower,
    grid: GridSpec,
    scheme: Scheme = Scheme.GEN,
) -> BoundaryResult:
    """Full 3-D grid search: the (t, rho) sweep of the suboptimal search
    plus a dB-spaced p1 lattice, with p1 = p_min kept as an explicit grid
    point so the result never falls below the suboptimal one."""
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if scheme is Scheme.TDMA:
        raise ValueError("TDMA is a baseline, not a searchable NOMA scheme")
    h1, s2, pmax, xi = params.h1_sq, params.sigma2, params.p_max, params.xi
    alpha = params.ue2_capacity()

    best = _suboptimal_scan(r, params, model, grid, scheme)
    best_val = best[0] if best is not None else -np.inf

    if r <= params.ue1_capacity() * (1.0 + _REL_SLACK):
        rho_all, p1, d1, d2, caps = _lattice_tables(params, grid)
        if scheme is Scheme.TS:
            rho_all, d1, d2, caps = rho_all[:1], d1[:1], d2[:1], caps[:1]
        t_vals = _t_values(r, params, grid, scheme)
        n_rho, n_p = d2.shape
        step = _chunk_size(n_rho, n_p)
        for start in range(0, t_vals.size, step):
            t = t_vals[start : start + step][:, None, None]
            u = 1.0 - t
            with np.errstate(over="ignore"):
                snr_needed = np.exp2(r / u) - 1.0
            rho_ok = rho_all[None, :, None] <= (
                1.0 - s2 * snr_needed / (h1 * pmax)
            ) * (1.0 + 1e-15) + 1e-300
            p_needed = s2 * snr_needed / (h1 * (1.0 - rho_all[None, :, None]))
            p_ok = p1[None, None, :] >= p_needed * (1.0 - 1e-15)
            budget = xi * h1 * pmax * (t / u + rho_all[None, :, None]) - model.p_r
            if r > 0.0:
                budget = budget - model.omega * r / (u * d1[None, :, :])
            r2_p = _budget_cap(d2[None, :, :], budget, model.omega)
            obj = np.where(
                rho_ok & p_ok & (r2_p >= 0.0),
                t * alpha + u * np.minimum(caps[None, :, :], r2_p),
                -np.inf,
            )
            flat = int(np.argmax(obj))
            val = obj.flat[flat]
            if val > best_val:
                i, j, k = np.unravel_index(flat, obj.shape)
                best_val = float(val)
                best = (
                    best_val,
                    float(t[i, 0, 0]),
                    float(rho_all[j]),
                    float(p1[k]),
                    None,
                )

    if best is None:
        return _INFEASIBLE_R1
    _, t, rho, p1_star, r2_2 = best
    if r2_2 is None:
        caps_and_budget = r2_candidates(t, rho, p1_star, r, params, model)
        r2_2 = float(min(caps_and_budget))
    return _optimal(_assemble(t, rho, p1_star, r2_2, r, params))


def _assemble(t, rho, p1, r2_2, r, params: SystemParams) -> Allocation:
    """Operating point from a winning grid point: peak power in both
    sub-slots (always optimal under this model), the remainder to UE 2."""
    return Allocation(
        t=t,
        rho=rho,
        p2_1=params.p_max,
        p1_2=min(p1, params.p_max),
        p2_2=max(params.p_max - p1, 0.0),
        r2_1=params.ue2_capacity(),
        r1_2=r / (1.0 - t),
        r2_2=max(r2_2, 0.0),
    )
