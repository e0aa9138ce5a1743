"""
Tests for the Monte Carlo estimator
"""
import math

import numpy as np
import pytest

from apps.secrecy.services import RateParams, ergodic_capacity_d1
from apps.system_model.factories import FadingProfileFactory, SystemParamsFactory

from .services import (
    ErgodicTerms,
    McEstimate,
    Moments,
    estimate_ergodic_terms,
    secrecy_mode_a,
    secrecy_mode_a_std_err,
    secrecy_mode_b,
    simulate,
)


def terms(c_d1, c_d2, ce_d1, ce_d2, std_err=0.0):
    return ErgodicTerms(*(McEstimate(mean, std_err, 100) for mean in (c_d1, c_d2, ce_d1, ce_d2)))


class TestMoments:
    """Test the chunk merge"""

    def test_merge_matches_direct(self):
        values = np.random.default_rng(3).exponential(size=1001)
        merged = Moments.of(values[:317]).merge(Moments.of(values[317:]))
        direct = Moments.of(values)
        assert merged.n == direct.n
        assert merged.mean == pytest.approx(direct.mean, rel=1e-12)
        assert merged.m2 == pytest.approx(direct.m2, rel=1e-10)

    def test_estimate(self):
        estimate = Moments.of(np.array([1.0, 2.0, 3.0, 4.0])).estimate()
        assert estimate.mean == 2.5
        assert estimate.std_err == pytest.approx(math.sqrt(5.0 / 3.0) / 2.0)


class TestSimulate:
    """Test the seeded estimator"""

    def test_dead_channels(self):
        profile = FadingProfileFactory(
            var_sr=1e-12, var_rd1=1e-12, var_rd2=1e-12, var_se=1e-12, var_re=1e-12,
        )
        result = simulate(SystemParamsFactory(profile=profile), 5000, seed=1)
        for estimate in (*vars(result.terms).values(), result.mode_b):
            assert estimate.mean < 1e-6

    @pytest.mark.parametrize('workers,chunk_size', [(1, 1000), (4, 1000), (2, 999)])
    def test_independent_of_workers(self, workers, chunk_size):
        params = SystemParamsFactory()
        baseline = simulate(params, 10_000, seed=11, workers=1, chunk_size=1000)
        result = simulate(params, 10_000, seed=11, workers=workers, chunk_size=chunk_size)
        if chunk_size == 1000:
            assert result == baseline
        else:
            assert result.mode_b.mean == pytest.approx(baseline.mode_b.mean, rel=1e-12)

    def test_too_few_realizations(self):
        with pytest.raises(ValueError):
            simulate(SystemParamsFactory(), 1, seed=1)

    def test_std_err_shrinks(self):
        params = SystemParamsFactory()
        small = estimate_ergodic_terms(params, 20_000, seed=5)
        large = estimate_ergodic_terms(params, 40_000, seed=5)
        assert 0.6 <= large.c_d2.std_err / small.c_d2.std_err <= 0.8

    def test_closed_form_agreement(self):
        params = SystemParamsFactory()
        estimate = simulate(params, 200_000, seed=2).terms.c_d1
        analytical = ergodic_capacity_d1(RateParams.from_params(params))
        assert abs(estimate.mean - analytical) <= max(0.01 * analytical, 4 * estimate.std_err)

    def test_eve_bound_dominates(self):
        result = simulate(SystemParamsFactory(a_s=0.3, a_r=0.1), 20_000, seed=4)
        assert result.ce_d2_bound.mean >= result.terms.ce_d2.mean


class TestSecrecyModes:
    """Test mode A and mode B secrecy"""

    def test_mode_a_clips_each_user(self):
        assert secrecy_mode_a(terms(1.0, 0.5, 2.0, 0.2)) == pytest.approx(0.3)

    def test_mode_a_without_eve(self):
        assert secrecy_mode_a(terms(1.0, 0.5, 0.0, 0.0)) == 1.5

    def test_mode_a_std_err(self):
        assert secrecy_mode_a_std_err(terms(1.0, 0.5, 0.1, 0.1, std_err=0.01)) == pytest.approx(0.02)

    def test_mode_b_not_below_mode_a(self):
        params = SystemParamsFactory()
        result = simulate(params, 20_000, seed=8)
        assert result.mode_b.mean >= secrecy_mode_a(result.terms) - 2 * result.mode_b.std_err
        assert secrecy_mode_b(params, 20_000, seed=8) == result.mode_b

    @pytest.mark.slow
    def test_far_eve_fixed_allocation_is_secure(self):
        assert secrecy_mode_b(SystemParamsFactory(), 10_000, seed=1).mean > 0
