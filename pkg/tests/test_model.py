import math

import numpy as np
import pytest
from scipy.stats import norm

from wpnoma import (
    Allocation,
    ConstantPower,
    DynamicPower,
    NonPositiveDistance,
    SystemParams,
    check_feasible,
    decode_denominator,
    decoding_power_dynamic,
    harvested_energy,
    pathloss_gain,
    q_function,
    shannon_rate,
    ts_boundary,
)
from conftest import (
    P_SIC_W,
    SIGMA2_W,
    decode_denominator_quadrature,
    q_quadrature,
    random_params,
)


class TestPathlossGain:
    def test_one_meter(self):
        # log10(1) = 0, so the loss is 30.8 dB exactly
        assert pathloss_gain(1.0) == pytest.approx(10.0 ** -3.08, rel=1e-15)

    def test_ten_meters(self):
        assert pathloss_gain(10.0) == pytest.approx(10.0 ** -5.5, rel=1e-15)

    def test_half_meter(self):
        assert pathloss_gain(0.5) == pytest.approx(4.451358673724288e-3, rel=1e-12)

    @pytest.mark.parametrize("d", [0.0, -1.0])
    def test_nonpositive_distance(self, d):
        with pytest.raises(NonPositiveDistance):
            pathloss_gain(d)


class TestShannonRate:
    def test_zero_signal(self):
        assert shannon_rate(0.5, 0.0, 3.0, 1e-9) == 0.0

    def test_unit_snr(self):
        assert shannon_rate(1.0, 2.5e-13, 0.0, 2.5e-13) == pytest.approx(1.0, abs=1e-15)

    def test_fig2_far_user_cap(self):
        # with the rounded gains quoted alongside the figure parameters
        val = shannon_rate(3.162e-6, 40.0, 0.0, 3.981e-14)
        assert val == pytest.approx(
            math.log2(1.0 + 3.162e-6 * 40.0 / 3.981e-14), rel=1e-15
        )
        assert val == pytest.approx(31.57, abs=0.01)

    def test_monotonicity(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            gain = 10.0 ** rng.uniform(-6, -2)
            s2 = 10.0 ** rng.uniform(-14, -10)
            p, q = sorted(rng.uniform(0.0, 50.0, size=2))
            interf = rng.uniform(0.0, 50.0)
            assert shannon_rate(gain, q, interf, s2) >= shannon_rate(gain, p, interf, s2)
            i, j = sorted(rng.uniform(0.0, 50.0, size=2))
            assert shannon_rate(gain, p, i, s2) >= shannon_rate(gain, p, j, s2)


class TestHarvestedEnergy:
    def test_no_first_subslot(self, fig2_params):
        alloc = Allocation(0.0, 0.3, 17.0, 4.0, 8.0, 0.0, 0.0, 0.0)
        expected = 0.3 * fig2_params.xi * fig2_params.h1_sq * 12.0
        assert harvested_energy(fig2_params, alloc) == pytest.approx(expected, rel=1e-14)

    def test_pure_time_switching(self, fig2_params):
        alloc = Allocation(0.25, 0.0, 40.0, 5.0, 35.0, 0.0, 0.0, 0.0)
        expected = 0.25 * fig2_params.xi * fig2_params.h1_sq * 40.0
        assert harvested_energy(fig2_params, alloc) == pytest.approx(expected, rel=1e-14)

    def test_fig2_value(self, fig2_params):
        alloc = Allocation(0.4733, 0.0, 40.0, 0.0, 40.0, 0.0, 0.0, 0.0)
        assert harvested_energy(fig2_params, alloc) == pytest.approx(
            0.04213656120547411, rel=1e-12
        )

    def test_bilinearity(self, fig2_params):
        # linear in t*p2_1 at rho = 0 and in rho*(p1_2 + p2_2) at t = 0
        a = Allocation(0.2, 0.0, 10.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        b = Allocation(0.4, 0.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        assert harvested_energy(fig2_params, b) == pytest.approx(
            4.0 * harvested_energy(fig2_params, a), rel=1e-12
        )
        c = Allocation(0.0, 0.1, 0.0, 3.0, 5.0, 0.0, 0.0, 0.0)
        d = Allocation(0.0, 0.3, 0.0, 9.0, 15.0, 0.0, 0.0, 0.0)
        assert harvested_energy(fig2_params, d) == pytest.approx(
            9.0 * harvested_energy(fig2_params, c), rel=1e-12
        )


class TestQFunction:
    def test_at_zero(self):
        assert q_function(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_against_quadrature(self):
        for x in np.linspace(-8.0, 8.0, 33):
            assert q_function(float(x)) == pytest.approx(
                q_quadrature(float(x)), abs=1e-12
            )

    def test_symmetry_and_monotonicity(self):
        xs = np.linspace(-8.0, 8.0, 101)
        vals = q_function(xs)
        assert np.all(np.abs(vals + q_function(-xs) - 1.0) <= 1e-12)
        assert np.all(np.diff(vals) < 0.0)

    def test_tail_limit(self):
        assert q_function(40.0) == 0.0  # underflows cleanly


class TestDecodeDenominator:
    def test_at_zero(self):
        assert decode_denominator(0.0) == 0.0

    def test_unit_value_at_quarter_tail(self):
        # Q(sqrt(gamma)) = 1/4 makes -log2(2Q) = 1
        gamma = norm.isf(0.25) ** 2
        assert decode_denominator(gamma) == pytest.approx(1.0, abs=1e-12)

    def test_gamma_one(self):
        # frozen from the quadrature oracle
        assert decode_denominator(1.0) == pytest.approx(1.28686937854007, abs=1e-12)

    def test_against_quadrature(self):
        for gamma in np.linspace(0.0, 8.0, 17):
            assert decode_denominator(float(gamma)) == pytest.approx(
                decode_denominator_quadrature(float(gamma)), abs=1e-10
            )

    def test_strictly_increasing(self):
        gammas = np.unique(
            np.concatenate([np.linspace(0.0, 10.0, 200), np.logspace(1.01, 12, 60)])
        )
        vals = decode_denominator(gammas)
        assert np.all(np.diff(vals) > 0.0)

    def test_large_gamma_stays_finite_and_accurate(self):
        # far beyond the underflow point of Q itself
        g = 1e10
        expected = math.sqrt((g / 2.0 + math.log(math.sqrt(2.0 * math.pi * g / 2.0))) / math.log(2.0))
        assert decode_denominator(g) == pytest.approx(expected, rel=1e-6)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            decode_denominator(-0.1)


class TestDecodingPowerDynamic:
    def test_idle_decoder_costs_circuit_only(self):
        model = DynamicPower(omega=0.044, p_r=0.03)
        assert decoding_power_dynamic(model, 0.0, 0.0, 5.0, 5.0) == 0.03

    def test_positive_rate_zero_sinr_is_infinite(self):
        model = DynamicPower(omega=0.044, p_r=0.03)
        assert decoding_power_dynamic(model, 1.0, 0.0, 0.0, 3.0) == math.inf
        assert decoding_power_dynamic(model, 0.0, 2.0, 3.0, 0.0) == math.inf

    def test_composed_value(self):
        # 0.03 + 0.044 / decode_denominator(1), frozen via the quadrature oracle
        model = DynamicPower(omega=0.044, p_r=0.03)
        got = decoding_power_dynamic(model, 1.0, 0.0, 1.0, 7.0)
        assert got == pytest.approx(0.06419150438556336, rel=1e-12)

    def test_nonincreasing_in_gamma(self):
        model = DynamicPower(omega=0.044, p_r=0.01)
        gammas = np.linspace(0.1, 50.0, 40)
        vals = [decoding_power_dynamic(model, 2.0, 1.0, g, g) for g in gammas]
        assert np.all(np.diff(vals) < 0.0)


class TestCheckFeasible:
    def test_all_zero_allocation_feasible(self, fig2_params):
        zero = Allocation(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        ok, violations = check_feasible(fig2_params, ConstantPower(0.08), zero, 1e-9)
        assert ok and violations == []

    def test_no_harvest_while_decoding_is_infeasible(self, fig2_params):
        # t = rho = 0 harvests nothing, yet the near user decodes
        alloc = Allocation(0.0, 0.0, 40.0, 1.0, 39.0, 0.0, 1.0, 0.0)
        ok, violations = check_feasible(fig2_params, ConstantPower(0.08), alloc, 1e-9)
        assert not ok and violations == ["energy"]

    def test_ts_boundary_alloc_is_tight(self, fig2_params, const_model):
        res = ts_boundary(10.0, fig2_params, P_SIC_W)
        ok, violations = check_feasible(fig2_params, const_model, res.alloc, 1e-9)
        assert ok, violations
        slack = harvested_energy(fig2_params, res.alloc) - (1.0 - res.alloc.t) * P_SIC_W
        assert abs(slack) <= 1e-9

    def test_each_violation_reported(self, fig2_params):
        pmax = fig2_params.p_max
        big = Allocation(0.1, 0.1, pmax * 2, 0.0, 0.0, 0.0, 0.0, 0.0)
        assert "p2_1_peak" in check_feasible(fig2_params, ConstantPower(0.0), big)[1]
        chatty = Allocation(0.1, 0.0, pmax, 0.0, pmax, 50.0, 0.0, 0.0)
        assert "r2_1_cap" in check_feasible(fig2_params, ConstantPower(0.0), chatty)[1]
        overloaded = Allocation(0.1, 0.0, pmax, pmax, pmax, 0.0, 0.0, 0.0)
        assert "p_sum_peak" in check_feasible(fig2_params, ConstantPower(0.0), overloaded)[1]
        greedy = Allocation(0.1, 0.0, pmax, 1e-6, 0.0, 0.0, 50.0, 0.0)
        assert "r1_2_cap" in check_feasible(fig2_params, ConstantPower(0.0), greedy)[1]
        # r2_2 between the far user's own cap (~alpha) and the roomier SIC cap
        loud = Allocation(0.1, 0.0, pmax, 0.0, pmax, 0.0, 0.0, 35.0)
        bad = check_feasible(fig2_params, ConstantPower(0.0), loud)[1]
        assert "r2_2_ue2_cap" in bad and "r2_2_sic_cap" not in bad

    def test_dynamic_energy_uses_rate_dependent_demand(self, fig2_params):
        model = DynamicPower(omega=0.044, p_r=0.03)
        # generous harvesting via t: feasible even at a high rate
        alloc = Allocation(0.5, 0.0, 40.0, 1.0, 39.0, 0.0, 5.0, 0.0)
        assert check_feasible(fig2_params, model, alloc)[0]
        # same point with a tiny split and no first sub-slot: infeasible
        alloc = Allocation(0.0, 1e-6, 40.0, 1.0, 39.0, 0.0, 5.0, 0.0)
        ok, violations = check_feasible(fig2_params, model, alloc)
        assert not ok and violations == ["energy"]

    def test_tol_must_be_positive(self, fig2_params, const_model):
        zero = Allocation(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            check_feasible(fig2_params, const_model, zero, tol=0.0)


class TestValidation:
    def test_system_params_ordering(self):
        with pytest.raises(ValueError):
            SystemParams(1e-6, 1e-3, 1e-13, 40.0, 0.5)
        with pytest.raises(ValueError):
            SystemParams(1e-3, 1e-6, 1e-13, 40.0, 1.0)
        with pytest.raises(ValueError):
            SystemParams(1e-3, 1e-6, -1e-13, 40.0, 0.5)

    def test_allocation_ranges(self):
        with pytest.raises(ValueError):
            Allocation(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            Allocation(0.0, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            Allocation(0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def test_power_models(self):
        with pytest.raises(ValueError):
            ConstantPower(-0.01)
        with pytest.raises(ValueError):
            DynamicPower(omega=-1.0, p_r=0.0)
        # zero coefficients are legal (free decoding)
        assert ConstantPower(0.0).p_sic == 0.0
        assert DynamicPower(omega=0.0, p_r=0.0).omega == 0.0

    def test_slot_average_rates(self):
        alloc = Allocation(0.25, 0.1, 40.0, 2.0, 38.0, 8.0, 4.0, 6.0)
        assert alloc.r1 == pytest.approx(0.75 * 4.0)
        assert alloc.r2 == pytest.approx(0.25 * 8.0 + 0.75 * 6.0)


def test_check_feasible_matches_random_draws(fig2_params):
    # random allocations: checker agrees with a literal re-statement of the
    # inequalities written out longhand here
    rng = np.random.default_rng(11)
    p = fig2_params
    model = ConstantPower(P_SIC_W)
    for _ in range(300):
        alloc = Allocation(
            t=rng.uniform(0.0, 0.99),
            rho=rng.uniform(0.0, 0.99),
            p2_1=rng.uniform(0.0, 1.2 * p.p_max),
            p1_2=rng.uniform(0.0, 0.7 * p.p_max),
            p2_2=rng.uniform(0.0, 0.7 * p.p_max),
            r2_1=rng.uniform(0.0, 40.0),
            r1_2=rng.uniform(0.0, 50.0),
            r2_2=rng.uniform(0.0, 40.0),
        )
        ok, _ = check_feasible(p, model, alloc, 1e-9)
        one_rho = 1.0 - alloc.rho
        literal = (
            alloc.p2_1 <= p.p_max + 1e-9
            and alloc.r2_1 <= math.log2(1.0 + p.h2_sq * alloc.p2_1 / p.sigma2) + 1e-9
            and alloc.p1_2 + alloc.p2_2 <= p.p_max + 1e-9
            and alloc.r1_2
            <= math.log2(1.0 + p.h1_sq * one_rho * alloc.p1_2 / p.sigma2) + 1e-9
            and alloc.r2_2
            <= math.log2(
                1.0 + p.h2_sq * alloc.p2_2 / (p.h2_sq * alloc.p1_2 + p.sigma2)
            )
            + 1e-9
            and alloc.r2_2
            <= math.log2(
                1.0
                + p.h1_sq * one_rho * alloc.p2_2 / (p.h1_sq * one_rho * alloc.p1_2 + p.sigma2)
            )
            + 1e-9
            and (
                alloc.r1_2 == 0.0
                or alloc.t * p.xi * p.h1_sq * alloc.p2_1
                + (1.0 - alloc.t) * alloc.rho * p.xi * p.h1_sq * (alloc.p1_2 + alloc.p2_2)
                >= (1.0 - alloc.t) * model.p_sic - 1e-9
            )
        )
        assert ok == literal
