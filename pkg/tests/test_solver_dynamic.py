import math

import numpy as np
import pytest
from scipy.optimize import brentq

from wpnoma import (
    DynamicPower,
    GridSpec,
    InfeasibleTargetRate,
    Scheme,
    SolveStatus,
    check_feasible,
    exhaustive_search,
    ps_feasible,
    r2_candidates,
    search_ranges,
    suboptimal_search,
)
from conftest import P_SIC_W, decode_denominator_mp
from wpnoma.solver_dynamic import _axis_values, _p_lattice


def _candidates_reference(t, rho, p1, r, params, model):
    """Longhand re-composition of the three rate caps with the
    quadrature-based decoding denominator."""
    h1, h2, s2, pmax = params.h1_sq, params.h2_sq, params.sigma2, params.p_max
    p2 = pmax - p1
    g1 = h1 * (1 - rho) * p1 / s2
    g2 = h1 * (1 - rho) * p2 / (h1 * (1 - rho) * p1 + s2)
    cap_sic = math.log2(1 + g2)
    cap_ue2 = math.log2(1 + h2 * p2 / (h2 * p1 + s2))
    budget = params.xi * h1 * pmax * (t / (1 - t) + rho) - model.p_r
    if r > 0:
        budget -= model.omega * r / ((1 - t) * decode_denominator_mp(g1))
    cap_power = decode_denominator_mp(g2) * budget / model.omega
    return cap_sic, cap_ue2, cap_power


class TestSearchRanges:
    def test_zero_rate(self, fig2_params):
        assert search_ranges(0.0, fig2_params) == (1.0, 1.0, 0.0)

    def test_capacity_rate(self, fig2_params):
        c1 = fig2_params.ue1_capacity()
        t_max, rho_max, p_min = search_ranges(c1, fig2_params)
        assert t_max == pytest.approx(0.0, abs=1e-12)
        assert rho_max == pytest.approx(0.0, abs=1e-9)
        assert p_min == pytest.approx(fig2_params.p_max, rel=1e-9)

    def test_fig5_values(self, fig2_params):
        t_max, rho_max, p_min = search_ranges(20.0, fig2_params, t=0.2, rho=0.1)
        assert t_max == pytest.approx(1.0 - 20.0 / fig2_params.ue1_capacity(), rel=1e-13)
        assert rho_max == pytest.approx(0.9999924976504007, rel=1e-10)
        assert p_min == pytest.approx(0.0003334377599708894, rel=1e-10)
        # cross-check p_min by numerically inverting the rate constraint
        p = fig2_params

        def rate_gap(p1):
            return math.log2(1 + p.h1_sq * 0.9 * p1 / p.sigma2) - 20.0 / 0.8

        assert p_min == pytest.approx(brentq(rate_gap, 1e-9, 40.0, xtol=1e-15), rel=1e-6)

    def test_infeasible_rates(self, fig2_params):
        c1 = fig2_params.ue1_capacity()
        with pytest.raises(InfeasibleTargetRate):
            search_ranges(c1 * 1.001, fig2_params)
        with pytest.raises(InfeasibleTargetRate):
            search_ranges(30.0, fig2_params, t=0.5)  # needs more than capacity
        with pytest.raises(InfeasibleTargetRate):
            search_ranges(35.0, fig2_params, t=0.0, rho=0.999)  # p_min > p_max


class TestR2Candidates:
    def test_no_power_left_for_far_user(self, fig2_params, dyn_model):
        cap_sic, cap_ue2, _ = r2_candidates(0.1, 0.05, 40.0, 1.0, fig2_params, dyn_model)
        assert cap_sic == 0.0 and cap_ue2 == 0.0

    def test_rho_max_pins_near_user_rate(self, fig2_params, dyn_model):
        r, t = 12.0, 0.25
        _, rho_max, _ = search_ranges(r, fig2_params, t=t)
        g1 = fig2_params.h1_sq * (1 - rho_max) * 40.0 / fig2_params.sigma2
        assert (1 - t) * math.log2(1 + g1) == pytest.approx(r, rel=1e-9)

    def test_fig5_point_against_reference(self, fig2_params, dyn_model):
        r, t, rho = 20.0, 0.3, 0.1
        _, _, p_min = search_ranges(r, fig2_params, t=t, rho=rho)
        got = r2_candidates(t, rho, p_min, r, fig2_params, dyn_model)
        ref = _candidates_reference(t, rho, p_min, r, fig2_params, dyn_model)
        for g, e in zip(got, ref):
            assert g == pytest.approx(e, rel=1e-9)

    def test_negative_budget_cap_signals_infeasibility(self, fig4_params):
        model = DynamicPower(omega=0.044, p_r=0.03)
        _, _, p_min = search_ranges(10.0, fig4_params, t=0.0, rho=0.0)
        _, _, cap_power = r2_candidates(0.0, 0.0, p_min, 10.0, fig4_params, model)
        assert cap_power < 0.0

    def test_free_decoder_gives_unbounded_budget_cap(self, fig2_params):
        model = DynamicPower(omega=0.0, p_r=0.0)
        _, _, cap_power = r2_candidates(0.2, 0.1, 1.0, 5.0, fig2_params, model)
        assert cap_power == math.inf


class TestSuboptimalSearch:
    def test_free_decoder_zero_rate_takes_everything(self, fig2_params, coarse_grid):
        model = DynamicPower(omega=0.0, p_r=0.0)
        res = suboptimal_search(0.0, fig2_params, model, coarse_grid)
        assert res.is_optimal
        assert res.r2_star == pytest.approx(fig2_params.ue2_capacity(), rel=1e-12)

    def test_never_above_exhaustive(self, fig2_params, dyn_model, coarse_grid):
        for r in (0.0, 5.0, 15.0, 30.0):
            sub = suboptimal_search(r, fig2_params, dyn_model, coarse_grid)
            exh = exhaustive_search(r, fig2_params, dyn_model, coarse_grid)
            if sub.is_optimal:
                assert exh.is_optimal
                assert exh.r2_star >= sub.r2_star - 1e-12

    def test_beyond_capacity_infeasible(self, fig2_params, dyn_model, coarse_grid):
        r = fig2_params.ue1_capacity() * 1.01
        assert suboptimal_search(r, fig2_params, dyn_model, coarse_grid).status is (
            SolveStatus.INFEASIBLE_R1
        )

    def test_allocations_feasible_and_tight(self, fig2_params, dyn_model, ci_grid):
        for r in (0.0, 8.0, 25.0):
            res = suboptimal_search(r, fig2_params, dyn_model, ci_grid)
            assert res.is_optimal
            a = res.alloc
            assert a.p2_1 == fig2_params.p_max
            assert a.r2_1 == pytest.approx(fig2_params.ue2_capacity(), rel=1e-12)
            assert a.p1_2 + a.p2_2 == pytest.approx(fig2_params.p_max, rel=1e-12)
            ok, violations = check_feasible(fig2_params, dyn_model, a)
            assert ok, (r, violations)

    def test_tdma_rejected(self, fig2_params, dyn_model, coarse_grid):
        with pytest.raises(ValueError):
            suboptimal_search(1.0, fig2_params, dyn_model, coarse_grid, Scheme.TDMA)


class TestExhaustiveSearch:
    def test_degenerate_grid_matches_direct_enumeration(self, fig2_params, dyn_model):
        grid = GridSpec(dt=0.34, drho=0.3, dp_db=40.0)
        r = 6.0
        got = exhaustive_search(r, fig2_params, dyn_model, grid)

        alpha = fig2_params.ue2_capacity()
        best = -math.inf
        t_max, _, _ = search_ranges(r, fig2_params)
        for t in _axis_values(grid.dt, t_max):
            t = float(t)
            try:
                _, rho_max, _ = search_ranges(r, fig2_params, t=t)
            except InfeasibleTargetRate:
                continue
            for rho in _axis_values(grid.drho, 1.0):
                rho = float(rho)
                if rho > rho_max:
                    continue
                _, _, p_min = search_ranges(r, fig2_params, t=t, rho=rho)
                lattice = [p for p in _p_lattice(40.0, grid.dp_db) if p >= p_min]
                for p1 in list(lattice) + [p_min]:
                    caps = r2_candidates(t, rho, float(p1), r, fig2_params, dyn_model)
                    if caps[2] < 0.0:
                        continue
                    best = max(best, t * alpha + (1 - t) * min(caps))
        assert got.is_optimal
        assert got.r2_star == pytest.approx(best, rel=1e-12)

    def test_grid_refinement_never_hurts(self, fig2_params, dyn_model):
        base = GridSpec(dt=0.02, drho=0.02, dp_db=2.0)
        fine = base.coarsened(0.5)
        for r in (5.0, 20.0):
            v0 = exhaustive_search(r, fig2_params, dyn_model, base).r2_star
            v1 = exhaustive_search(r, fig2_params, dyn_model, fine).r2_star
            assert v1 >= v0 - 1e-12

    def test_fig6_dynamic_power_splitting_feasible(self, fig4_params, ci_grid):
        # the constant-power gate fails here, yet rate backoff restores it
        model = DynamicPower(omega=0.044, p_r=0.03)
        assert not ps_feasible(fig4_params, P_SIC_W)
        res = exhaustive_search(5.0, fig4_params, model, ci_grid, Scheme.PS)
        assert res.is_optimal and res.r2_star > 0.0
        ok, violations = check_feasible(fig4_params, model, res.alloc)
        assert ok, violations

    def test_fig6_suboptimal_gap_region_nonempty(self, fig4_params, ci_grid):
        # pinning p1 at its minimum locks the near user's SINR to the target,
        # so the decoder cannot be made cheaper: small targets become
        # infeasible even though the full search finds a point
        model = DynamicPower(omega=0.044, p_r=0.03)
        r = 10.0
        sub = suboptimal_search(r, fig4_params, model, ci_grid, Scheme.PS)
        exh = exhaustive_search(r, fig4_params, model, ci_grid, Scheme.PS)
        assert sub.status is SolveStatus.INFEASIBLE_R1
        assert exh.is_optimal

    def test_scheme_restriction(self, fig2_params, dyn_model, coarse_grid):
        r = 10.0
        ts = exhaustive_search(r, fig2_params, dyn_model, coarse_grid, Scheme.TS)
        ps = exhaustive_search(r, fig2_params, dyn_model, coarse_grid, Scheme.PS)
        gen = exhaustive_search(r, fig2_params, dyn_model, coarse_grid, Scheme.GEN)
        assert ts.alloc.rho == 0.0
        assert ps.alloc.t == 0.0
        assert gen.r2_star >= max(ts.r2_star, ps.r2_star) - 1e-12

    def test_determinism(self, fig2_params, dyn_model, coarse_grid):
        a = exhaustive_search(12.0, fig2_params, dyn_model, coarse_grid)
        b = exhaustive_search(12.0, fig2_params, dyn_model, coarse_grid)
        assert a == b

    def test_allocations_feasible(self, fig2_params, dyn_model, ci_grid):
        for r in (0.0, 12.0, 33.0):
            res = exhaustive_search(r, fig2_params, dyn_model, ci_grid)
            assert res.is_optimal
            ok, violations = check_feasible(fig2_params, dyn_model, res.alloc)
            assert ok, (r, violations)
