"""Independent brute-force validation of the boundary solvers, plus the
two comparison constructs used alongside them: the orthogonal TDMA
baseline and the time-sharing (upper concave envelope) hull.

The brute-force optimizer enumerates the full (t, rho, p1) grid and
checks every schedule constraint as a literal inequality; it makes no
use of the tight-constraint or branch structure the solvers exploit.
Within each grid cell only exact monotone algebra is applied (the
far-user rate is capped by the smaller of its decodability caps, a
suffix-maximum table turns the p1 sweep into a lookup), so the returned
value is exactly the maximum the literal triple loop would find, at a
small fraction of its cost. For the rate-dependent power model the
far-user rate is additionally swept downward over M discrete levels
between 0 and its cap, since backing it off can restore energy
feasibility.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .model import (
    Allocation,
    ConstantPower,
    InfeasibleTargetRate,
    PowerModel,
    RatePoint,
    RegionBoundary,
    Scheme,
    SystemParams,
    decode_denominator,
)
from .solver_constant import BoundaryResult, _INFEASIBLE_R1, _optimal
from .solver_dynamic import GridSpec, _axis_values, _p_lattice

#: far-user rate levels swept by the dynamic-model oracle
DEFAULT_RATE_LEVELS = 64

_REL_SLACK = 1e-13


@dataclass(frozen=True)
class OracleResult:
    """Best value found by a grid enumeration and the size of the grid."""

    r2_best: float
    alloc: Allocation
    points_evaluated: int


@lru_cache(maxsize=4)
def _grid_tables(params: SystemParams, grid: GridSpec):
    """(rho, p1, caps, suffix_max) over the full (rho, p1) plane, with
    p1 = 0 prepended to the dB lattice; target-rate independent."""
    h1, h2, s2, pmax = params.h1_sq, params.h2_sq, params.sigma2, params.p_max
    rho = _axis_values(grid.drho, 1.0)
    p1 = np.concatenate(([0.0], _p_lattice(pmax, grid.dp_db)))
    p2 = pmax - p1
    one_rho = (1.0 - rho)[:, None]
    cap_ue2 = np.log2(1.0 + h2 * p2 / (h2 * p1 + s2))
    cap_sic = np.log2(1.0 + h1 * one_rho * p2 / (h1 * one_rho * p1 + s2))
    caps = np.minimum(cap_ue2[None, :], cap_sic)
    suffix_max = np.flip(np.maximum.accumulate(np.flip(caps, axis=1), axis=1), axis=1)
    return rho, p1, caps, suffix_max


def _oracle_axes(r, params, grid, scheme):
    t_vals = np.zeros(1) if scheme is Scheme.PS else _axis_values(grid.dt, 1.0)
    rho_all, p1, caps, suffix_max = _grid_tables(params, grid)
    if scheme is Scheme.TS:
        rho_all, caps, suffix_max = rho_all[:1], caps[:1], suffix_max[:1]
    return t_vals, rho_all, p1, caps, suffix_max


def _brute_force_constant(r, params, p_sic, grid, scheme):
    h1, s2, pmax, xi = params.h1_sq, params.sigma2, params.p_max, params.xi
    alpha = params.ue2_capacity()
    t_vals, rho_all, p1, caps, suffix_max = _oracle_axes(r, params, grid, scheme)
    n_points = t_vals.size * rho_all.size * p1.size

    u = 1.0 - t_vals
    with np.errstate(over="ignore"):
        p_needed = (
            s2 * (np.exp2(r / u) - 1.0)[:, None] / (h1 * (1.0 - rho_all)[None, :])
        )
    j0 = np.searchsorted(p1, p_needed * (1.0 - 1e-15), side="left")
    ok = j0 < p1.size
    if r > 0.0:
        # energy demand applies only while the near user decodes
        zeta = p_sic / (xi * h1 * pmax)
        ok &= ((t_vals / u)[:, None] + rho_all[None, :]) >= zeta * (1.0 - 1e-15)
    val = suffix_max[np.arange(rho_all.size)[None, :], np.minimum(j0, p1.size - 1)]
    obj = np.where(ok, t_vals[:, None] * alpha + u[:, None] * val, -np.inf)

    flat = int(np.argmax(obj))
    if obj.flat[flat] == -np.inf:
        raise InfeasibleTargetRate(f"no grid point supports r={r}")
    i, j = np.unravel_index(flat, obj.shape)
    k = int(j0[i, j]) + int(np.argmax(caps[j, j0[i, j] :]))
    alloc = Allocation(
        t=float(t_vals[i]),
        rho=float(rho_all[j]),
        p2_1=pmax,
        p1_2=float(p1[k]),
        p2_2=float(pmax - p1[k]),
        r2_1=alpha,
        r1_2=r / float(u[i]),
        r2_2=float(caps[j, k]),
    )
    return OracleResult(float(obj.flat[flat]), alloc, n_points)


def _brute_force_dynamic(r, params, model, grid, scheme, m_levels):
    h1, s2, pmax, xi = params.h1_sq, params.sigma2, params.p_max, params.xi
    alpha = params.ue2_capacity()
    t_vals, rho_all, p1, caps, _ = _oracle_axes(r, params, grid, scheme)
    n_points = t_vals.size * rho_all.size * p1.size * m_levels

    one_rho = (1.0 - rho_all)[:, None]
    gamma1 = h1 * one_rho * p1[None, :] / s2
    gamma2 = h1 * one_rho * (pmax - p1)[None, :] / (h1 * one_rho * p1[None, :] + s2)
    d1 = decode_denominator(gamma1)
    d2 = decode_denominator(gamma2)

    best_val, best_idx, best_rate = -np.inf, None, 0.0
    for i, t in enumerate(t_vals):
        u = 1.0 - t
        with np.errstate(over="ignore"):
            snr_needed = 2.0 ** (r / u) - 1.0
        p_needed = s2 * snr_needed / (h1 * (1.0 - rho_all))
        ok = p1[None, :] >= p_needed[:, None] * (1.0 - 1e-15)
        budget = xi * h1 * pmax * (t / u + rho_all)[:, None] - model.p_r
        if r > 0.0:
            with np.errstate(divide="ignore"):
                budget = budget - model.omega * r / (u * d1)
        if model.omega == 0.0:
            r2_p = np.where(budget >= 0.0, np.inf, -np.inf)
        else:
            with np.errstate(invalid="ignore"):
                r2_p = np.where(
                    d2 > 0.0,
                    d2 * budget / model.omega,
                    np.where(budget >= 0.0, 0.0, -np.inf),
                )
        # best of the m discrete rate levels {0, cap/(m-1), ..., cap}
        # not exceeding the budget cap: exact grid max by monotonicity
        with np.errstate(invalid="ignore", divide="ignore"):
            k_best = np.floor(np.minimum(r2_p / caps, 1.0) * (m_levels - 1))
        k_best = np.where(caps > 0.0, k_best, 0.0)
        rate = np.where(r2_p >= 0.0, k_best * caps / (m_levels - 1), -np.inf)
        obj = np.where(ok & (rate >= 0.0), t * alpha + u * rate, -np.inf)
        flat = int(np.argmax(obj))
        if obj.flat[flat] > best_val:
            best_val = float(obj.flat[flat])
            j, k = np.unravel_index(flat, obj.shape)
            best_idx = (i, int(j), int(k))
            best_rate = float(rate[j, k])

    if best_idx is None:
        raise InfeasibleTargetRate(f"no grid point supports r={r}")
    i, j, k = best_idx
    alloc = Allocation(
        t=float(t_vals[i]),
        rho=float(rho_all[j]),
        p2_1=pmax,
        p1_2=float(p1[k]),
        p2_2=float(pmax - p1[k]),
        r2_1=alpha,
        r1_2=r / (1.0 - float(t_vals[i])),
        r2_2=best_rate,
    )
    return OracleResult(best_val, alloc, n_points)


def brute_force_p0(
    r: float,
    params: SystemParams,
    model: PowerModel,
    grid: GridSpec,
    scheme: Scheme = Scheme.GEN,
    m_levels: int = DEFAULT_RATE_LEVELS,
) -> OracleResult:
    """Maximize the slot-average far-user rate over the full grid with
    every constraint checked literally.

    Per grid point: UE 2 gets peak power in sub-slot 1 and whatever p1
    leaves in sub-slot 2; the near user's rate r/(1-t) must fit its
    capacity at (rho, p1), else the point is skipped; the far user's
    sub-slot-2 rate is the smaller decodability cap (swept downward over
    ``m_levels`` levels for the rate-dependent power model); the energy
    inequality is then checked as stated. Raises InfeasibleTargetRate
    when no grid point survives.
    """
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if scheme is Scheme.TDMA:
        raise ValueError("use tdma_baseline for the TDMA comparison")
    if isinstance(model, ConstantPower):
        return _brute_force_constant(r, params, model.p_sic, grid, scheme)
    return _brute_force_dynamic(r, params, model, grid, scheme, m_levels)


# ---------------------------------------------------------------------------
# TDMA baseline
# ---------------------------------------------------------------------------

def tdma_baseline(
    r: float, params: SystemParams, model: PowerModel, grid: GridSpec
) -> BoundaryResult:
    """Orthogonal baseline: a fraction tau of the slot serves UE 2 alone
    at peak power while UE 1 harvests; the rest serves UE 1 alone, which
    splits off just enough received power to run its decoder (the same
    decoder cost model as in the NOMA schedule, single stream).

    Sweeps tau and the phase-2 split on the (dt, drho) grid and returns
    the largest feasible far-user rate tau * ue2_capacity.
    """
    if r < 0.0:
        raise ValueError(f"r must be nonnegative, got {r}")
    h1, s2, pmax, xi = params.h1_sq, params.sigma2, params.p_max, params.xi
    alpha = params.ue2_capacity()
    tau = _axis_values(grid.dt, 1.0)[1:]  # tau in (0, 1)
    rho = _axis_values(grid.drho, 1.0)
    if tau.size == 0:
        return _INFEASIBLE_R1

    one_tau = (1.0 - tau)[:, None]
    gamma = h1 * (1.0 - rho)[None, :] * pmax / s2
    feasible = one_tau * np.log2(1.0 + gamma) >= r * (1.0 - 1e-15)
    if r > 0.0:
        harvested = xi * h1 * pmax * (tau[:, None] + one_tau * rho[None, :])
        if isinstance(model, ConstantPower):
            demand = one_tau * model.p_sic
        else:
            with np.errstate(divide="ignore"):
                demand = one_tau * (
                    model.omega * (r / one_tau) / decode_denominator(gamma) + model.p_r
                )
        feasible &= harvested >= demand * (1.0 - 1e-15)

    obj = np.where(feasible, tau[:, None] * alpha, -np.inf)
    flat = int(np.argmax(obj))
    if obj.flat[flat] == -np.inf:
        return _INFEASIBLE_R1
    i, j = np.unravel_index(flat, obj.shape)
    alloc = Allocation(
        t=float(tau[i]),
        rho=float(rho[j]),
        p2_1=pmax,
        p1_2=pmax,
        p2_2=0.0,
        r2_1=alpha,
        r1_2=r / (1.0 - float(tau[i])),
        r2_2=0.0,
    )
    return _optimal(alloc)


# ---------------------------------------------------------------------------
# time-sharing hull
# ---------------------------------------------------------------------------

def upper_hull_indices(r1s, r2s, rel_tol: float = 1e-12) -> list[int]:
    """Indices of the points on the upper concave envelope of the curve
    (r1s, r2s), r1s sorted ascending.

    Points within ``rel_tol`` (scaled by the plot extent) of a chord are
    kept, so exactly-collinear runs survive; only genuine dips are
    dropped. Of duplicate r1 values the larger r2 wins.
    """
    r1s = np.asarray(r1s, dtype=float)
    r2s = np.asarray(r2s, dtype=float)
    if r1s.size == 0:
        return []
    span = (r1s[-1] - r1s[0]) * (float(np.max(r2s)) - float(np.min(r2s)))
    tol = rel_tol * (1.0 + span)

    def cross(a: int, b: int, c: int) -> float:
        return (r1s[b] - r1s[a]) * (r2s[c] - r2s[a]) - (r2s[b] - r2s[a]) * (
            r1s[c] - r1s[a]
        )

    hull: list[int] = []
    for i in range(r1s.size):
        if hull and r1s[i] == r1s[hull[-1]]:
            if r2s[i] <= r2s[hull[-1]]:
                continue
            hull.pop()
        while len(hull) >= 2 and cross(hull[-2], hull[-1], i) > tol:
            hull.pop()
        hull.append(i)
    return hull


def time_sharing_hull(boundary: RegionBoundary, rel_tol: float = 1e-12) -> RegionBoundary:
    """Upper concave envelope of a boundary: the region achievable by
    alternating between operating points over time.

    Keeps every input point on the envelope (collinear runs survive, so a
    concave input passes through unchanged), drops points strictly below
    a chord, and anchors the envelope at the axes: (0, r2(0)) on the left
    and (r1_max, 0) closing the right end (a vertical edge down to the
    axis), synthesized from the edge allocations with the discarded
    stream's rate zeroed when not already present.
    """
    pts = sorted(boundary.feasible_points(), key=lambda p: p.r1)
    if not pts:
        return RegionBoundary(boundary.scheme, (), boundary.r1_max)

    if pts[0].r1 > 0.0:
        a = pts[0].alloc
        pts.insert(0, RatePoint(0.0, pts[0].r2, replace(a, r1_2=0.0), True))

    keep = upper_hull_indices([p.r1 for p in pts], [p.r2 for p in pts], rel_tol)
    hull = [pts[i] for i in keep]
    if hull[-1].r2 > 0.0:
        a = hull[-1].alloc
        hull.append(RatePoint(hull[-1].r1, 0.0, replace(a, r2_1=0.0, r2_2=0.0), True))
    return RegionBoundary(boundary.scheme, tuple(hull), boundary.r1_max)
