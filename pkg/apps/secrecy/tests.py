"""
Tests for the analytical ergodic capacities and the secrecy lower bound
"""
import math

import numpy as np
import pytest
from scipy import special

from apps.fading.services import sample_batch
from apps.montecarlo.services import secrecy_mode_a, secrecy_mode_a_std_err, simulate
from apps.sinr.services import compute_sinrs
from apps.system_model.factories import FadingProfileFactory, SystemParamsFactory

from .services import (
    LN2,
    RateParams,
    _gamma_eve_capacity_quadrature,
    analyze,
    cdf_eff_d1,
    cdf_eff_d2,
    ergodic_capacity_d1,
    ergodic_capacity_d1_quadrature,
    ergodic_capacity_d2,
    ergodic_eve_capacity_d1,
    ergodic_eve_capacity_d2_ub,
    ergodic_secrecy_lower_bound,
    ergodic_sum_capacity,
    gamma_eve_capacity,
)

SWEEP_A_S = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)


def make_rates(**overrides):
    fields = dict(
        pi_sr=1.0, pi_rd1=1.0, pi_se=1.0, pi_re=2.0,
        lambda_sr=1.0, lambda_rd1=1.0, lambda_rd2=1.0, lambda_rr=1.0,
        lambda_se=1.0, lambda_re=2.0, rho_si=1.0, a_min=0.2,
    )
    fields.update(overrides)
    return RateParams(**fields)


def within_mc(value, estimate, n_se=4.0, rel=0.01):
    return abs(value - estimate.mean) <= max(rel * abs(estimate.mean), n_se * estimate.std_err)


class TestRateParams:
    """Test rate construction from SystemParams"""

    def test_rates_and_constants(self, fig2_params):
        rp = RateParams.from_params(fig2_params(a_s=0.2, a_r=0.14))
        assert rp.pi_sr == pytest.approx(5.0)
        assert rp.pi_rd1 == pytest.approx(1 / 0.14)
        assert rp.s == pytest.approx(5.0 + 1 / 0.14)
        assert rp.beta == pytest.approx(0.5)
        assert rp.c1 == pytest.approx(1 / rp.s)
        assert rp.c2 == pytest.approx(rp.beta / (rp.lambda_rr * rp.s))
        assert rp.a_min == 0.14

    def test_zero_allocation_gives_infinite_rate(self, fig2_params):
        rp = RateParams.from_params(fig2_params(a_s=0.0))
        assert math.isinf(rp.pi_sr) and math.isinf(rp.pi_se)
        assert rp.c1 == 0.0


class TestCdfEffD1:
    """Test the strong-user effective SINR distribution"""

    def test_origin(self):
        assert cdf_eff_d1(0.0, make_rates()) == 0.0

    def test_hand_value(self):
        # s = 2, lambda_rr = 1, beta = 1
        assert cdf_eff_d1(1.0, make_rates()) == pytest.approx(1 - math.exp(-2) / 2, rel=1e-12)
        assert cdf_eff_d1(1.0, make_rates()) == pytest.approx(0.93233, abs=1e-5)

    def test_tends_to_one(self):
        assert cdf_eff_d1(1e3, make_rates()) == pytest.approx(1.0)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_matches_empirical_cdf(self, fig2_params):
        params = fig2_params(a_s=0.2)
        rp = RateParams.from_params(params)
        n = 1_000_000
        eff = compute_sinrs(params, sample_batch(params.profile, seed=101, count=n)).eff_d1
        for x in (0.5, 2.0, 8.0):
            p = cdf_eff_d1(x, rp)
            empirical = np.mean(eff <= x)
            assert abs(empirical - p) <= 3 * math.sqrt(p * (1 - p) / n)


class TestCdfEffD2:
    """Test the weak-user effective SINR distribution"""

    def test_origin(self, fig2_params):
        params = fig2_params()
        assert cdf_eff_d2(0.0, RateParams.from_params(params), params) == 0.0

    def test_support_boundary(self, fig2_params):
        params = fig2_params(a_s=0.2, a_r=0.3)
        rp = RateParams.from_params(params)
        x_max = min((1 - 0.2) / 0.2, (1 - 0.3) / 0.3)
        assert cdf_eff_d2(x_max, rp, params) == 1.0
        assert cdf_eff_d2(x_max + 1.0, rp, params) == 1.0
        assert cdf_eff_d2(0.99 * x_max, rp, params) < 1.0

    def test_non_decreasing(self, fig2_params):
        params = fig2_params()
        rp = RateParams.from_params(params)
        values = [cdf_eff_d2(x, rp, params) for x in np.linspace(0.0, 5.0, 200)]
        assert np.all(np.diff(values) >= 0)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_matches_empirical_cdf(self, fig2_params):
        params = fig2_params(a_s=0.2)
        rp = RateParams.from_params(params)
        n = 1_000_000
        eff = compute_sinrs(params, sample_batch(params.profile, seed=102, count=n)).eff_d2
        p = cdf_eff_d2(1.0, rp, params)
        assert abs(np.mean(eff <= 1.0) - p) <= 3 * math.sqrt(p * (1 - p) / n)


class TestErgodicCapacityD1:
    """Test the closed form against quadrature and its limits"""

    def test_no_self_interference(self):
        rp = make_rates(pi_sr=0.5, pi_rd1=0.5, rho_si=0.0)
        expected = math.e * special.exp1(1.0) / math.log(2.0)
        assert ergodic_capacity_d1(rp) == pytest.approx(expected, rel=1e-10)
        assert ergodic_capacity_d1(rp) == pytest.approx(0.86035, abs=1e-4)

    @pytest.mark.parametrize('a_s', SWEEP_A_S)
    def test_closed_form_matches_quadrature(self, fig2_params, a_s):
        rp = RateParams.from_params(fig2_params(a_s=a_s))
        assert ergodic_capacity_d1(rp) == pytest.approx(ergodic_capacity_d1_quadrature(rp), rel=1e-6)

    @pytest.mark.parametrize('rho_si_db', [-30.0, 0.0, 10.0])
    def test_closed_form_across_self_interference(self, fig2_params, rho_si_db):
        rp = RateParams.from_params(fig2_params(rho_si_db=rho_si_db))
        assert ergodic_capacity_d1(rp) == pytest.approx(ergodic_capacity_d1_quadrature(rp), rel=1e-6)

    def test_degenerate_beta_is_continuous(self):
        # beta = rho_si * pi_sr equals lambda_rr = 1 when rho_si = 0.2
        at = RateParams.from_params(SystemParamsFactory(rho_si=0.2))
        near = RateParams.from_params(SystemParamsFactory(rho_si=0.2 * (1 + 1e-4)))
        assert at.beta == pytest.approx(at.lambda_rr)
        assert ergodic_capacity_d1(at) == pytest.approx(ergodic_capacity_d1(near), rel=1e-3)

    def test_zero_allocation(self, fig2_params):
        assert ergodic_capacity_d1(RateParams.from_params(fig2_params(a_s=0.0))) == 0.0

    def test_decreasing_in_self_interference(self, fig2_params):
        values = [
            ergodic_capacity_d1(RateParams.from_params(fig2_params(rho_si_db=db)))
            for db in (-30.0, -10.0, 0.0, 10.0)
        ]
        assert np.all(np.diff(values) < 0)


class TestErgodicCapacityD2:
    """Test the weak-user capacity"""

    def test_dead_links(self):
        dead = FadingProfileFactory(var_sr=1e-9, var_rd1=1e-9, var_rd2=1e-9)
        params = SystemParamsFactory(profile=dead)
        assert ergodic_capacity_d2(RateParams.from_params(params), params) < 1e-5

    def test_bounded_by_support(self, fig2_params):
        params = fig2_params(a_s=0.2, a_r=0.14)
        value = ergodic_capacity_d2(RateParams.from_params(params), params)
        assert 0 < value < math.log2(1 + (1 - 0.2) / 0.2)

    def test_decreasing_in_relay_allocation(self, fig2_params):
        values = []
        for a_r in (0.1, 0.2, 0.3, 0.4):
            params = fig2_params(a_r=a_r)
            values.append(ergodic_capacity_d2(RateParams.from_params(params), params))
        assert np.all(np.diff(values) < 0)


class TestErgodicEveCapacityD1:
    """Test the eavesdropper's capacity on the strong user's message"""

    def test_hypoexponential_value(self):
        rp = make_rates(pi_se=1.0, pi_re=2.0)
        expected = (2 * math.e * special.exp1(1.0) - math.e ** 2 * special.exp1(2.0)) / math.log(2.0)
        assert ergodic_eve_capacity_d1(rp) == pytest.approx(expected, rel=1e-10)
        assert ergodic_eve_capacity_d1(rp) == pytest.approx(1.1994, abs=1e-4)

    def test_symmetric_in_rates(self):
        assert ergodic_eve_capacity_d1(make_rates(pi_se=1.0, pi_re=2.0)) == pytest.approx(
            ergodic_eve_capacity_d1(make_rates(pi_se=2.0, pi_re=1.0)), rel=1e-12
        )

    def test_equal_rates_use_gamma_expectation(self):
        value = ergodic_eve_capacity_d1(make_rates(pi_se=1.0, pi_re=1.0))
        assert value == pytest.approx(gamma_eve_capacity(1.0), rel=1e-8)
        assert value == pytest.approx(ergodic_eve_capacity_d1(make_rates(pi_se=1.0, pi_re=1.001)), rel=1e-3)

    @pytest.mark.parametrize('pi', [0.01, 0.5, 1.0, 3.0, 40.0])
    def test_gamma_closed_form_matches_quadrature(self, pi):
        assert gamma_eve_capacity(pi) == pytest.approx(_gamma_eve_capacity_quadrature(pi), rel=1e-8)

    @pytest.mark.slow
    def test_gamma_matches_monte_carlo(self):
        rng = np.random.default_rng(7)
        samples = np.log2(1.0 + rng.exponential(size=1_000_000) + rng.exponential(size=1_000_000))
        std_err = samples.std(ddof=1) / math.sqrt(samples.size)
        assert abs(gamma_eve_capacity(1.0) - samples.mean()) <= 4 * std_err

    def test_eavesdropper_at_infinity(self):
        rp = make_rates(pi_se=1e12, pi_re=2e12)
        assert ergodic_eve_capacity_d1(rp) < 1e-11

    def test_increasing_in_eve_variance(self, fig2_params):
        values = [
            ergodic_eve_capacity_d1(RateParams.from_params(fig2_params(d_se=d, d_re=0.75 * d)))
            for d in (80.0, 40.0, 20.0, 10.0)
        ]
        assert np.all(np.diff(values) > 0)


class TestErgodicEveCapacityD2:
    """Test the upper bound on Eve's capacity for the weak user's message"""

    def test_eavesdropper_at_infinity(self, fig2_params):
        params = fig2_params(d_se=1e4, d_re=1e4)
        assert ergodic_eve_capacity_d2_ub(RateParams.from_params(params), params) < 1e-6

    def test_equal_eve_variances(self, fig2_params):
        params = fig2_params(d_se=30.0, d_re=30.0)
        nearby = fig2_params(d_se=30.0, d_re=30.0001)
        rp, rp_near = RateParams.from_params(params), RateParams.from_params(nearby)
        assert ergodic_eve_capacity_d2_ub(rp, params) == pytest.approx(
            ergodic_eve_capacity_d2_ub(rp_near, nearby), rel=1e-3
        )

    @pytest.mark.slow
    @pytest.mark.integration
    @pytest.mark.parametrize('a_s', [0.05, 0.2, 0.45])
    def test_bounds_monte_carlo(self, fig2_params, a_s):
        params = fig2_params(a_s=a_s)
        result = simulate(params, n=1_000_000, seed=201)
        bound = ergodic_eve_capacity_d2_ub(RateParams.from_params(params), params)
        assert bound >= result.terms.ce_d2.mean - 2 * result.terms.ce_d2.std_err

    @pytest.mark.slow
    @pytest.mark.integration
    def test_tight_for_equal_allocations(self, fig2_params):
        params = fig2_params(a_s=0.2, a_r=0.2)
        result = simulate(params, n=1_000_000, seed=202)
        bound = ergodic_eve_capacity_d2_ub(RateParams.from_params(params), params)
        assert within_mc(bound, result.ce_d2_bound)


class TestSecrecyLowerBound:
    """Test the composition into the secrecy sum-rate lower bound"""

    def test_clipping(self):
        report = ergodic_secrecy_lower_bound(c_d1=1.0, c_d2=0.5, ce_d1=2.0, ce_d2_ub=0.7)
        assert report.sec_lb == 0.0

    def test_eve_free(self):
        report = ergodic_secrecy_lower_bound(c_d1=1.2, c_d2=0.8, ce_d1=0.0, ce_d2_ub=0.0)
        assert report.sec_lb == pytest.approx(2.0)
        assert report.sum_capacity == pytest.approx(2.0)

    def test_analyze_is_consistent(self, fig2_params):
        params = fig2_params()
        report = analyze(params)
        assert report.sec_lb == pytest.approx(
            max(report.c_d1 - report.ce_d1, 0) + max(report.c_d2 - report.ce_d2_ub, 0)
        )
        assert report.sum_capacity == pytest.approx(ergodic_sum_capacity(params))
        assert min(report.c_d1, report.c_d2, report.ce_d1, report.ce_d2_ub) >= 0

    def test_continuous_in_allocation(self, fig2_params):
        grid = np.arange(0.02, 0.49, 0.01)
        values = np.array([analyze(fig2_params(a_s=float(a))).sec_lb for a in grid])
        assert np.all(np.abs(np.diff(values)) < 0.5)

    def test_zero_relay_allocation(self, fig2_params):
        report = analyze(fig2_params(a_r=0.0))
        assert report.c_d1 == 0.0
        assert math.isfinite(report.c_d2)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_monte_carlo_sweep(self, fig2_params):
        """Closed forms agree with 10^6 draws; bound ordering holds along the a_s sweep"""
        gaps = []
        for a_s in SWEEP_A_S:
            params = fig2_params(a_s=a_s)
            report = analyze(params)
            result = simulate(params, n=1_000_000, seed=301)
            terms = result.terms
            assert within_mc(report.c_d1, terms.c_d1)
            assert within_mc(report.c_d2, terms.c_d2)
            assert within_mc(report.ce_d1, terms.ce_d1)
            mode_a = secrecy_mode_a(terms)
            assert report.sec_lb <= mode_a + 2 * secrecy_mode_a_std_err(terms)
            assert result.mode_b.mean >= mode_a - 2 * result.mode_b.std_err
            gaps.append((mode_a, report.sec_lb))
        best_mode_a, best_lb = max(gaps)
        assert (best_mode_a - best_lb) / best_mode_a <= 0.10


@pytest.mark.integration
class TestLowSnrQuadrature:
    """Test the finite-support integrals where the survival function collapses next to 0"""

    @pytest.mark.parametrize('rho_db', [0.0, 2.0, 4.0, 6.0])
    @pytest.mark.parametrize('d_se,d_re', [(40.0, 30.0), (25.0, 20.0)])
    def test_against_monte_carlo(self, fig2_params, rho_db, d_se, d_re):
        params = fig2_params(a_s=0.2, a_r=0.2, rho_db=rho_db, d_se=d_se, d_re=d_re)
        report = analyze(params)
        terms = simulate(params, 200_000, seed=3).terms
        assert within_mc(report.c_d2, terms.c_d2)
        assert report.ce_d2_ub >= terms.ce_d2.mean - 2 * terms.ce_d2.std_err

    def test_bound_stays_positive_below_zero_db(self, fig2_params):
        report = analyze(fig2_params(a_s=0.2, a_r=0.2, rho_db=-5.0))
        assert report.c_d2 > 0
        assert report.ce_d2_ub > 0
