"""
Tests for instantaneous SINRs and rates
"""
import math

import numpy as np
import pytest

from apps.fading.services import ChannelRealization, sample_batch
from apps.system_model.factories import FadingProfileFactory, SystemParamsFactory

from .services import compute_sinrs, instantaneous_rates, instantaneous_secrecy


class TestComputeSinrs:
    """Test the relay, destination and eavesdropper SINRs"""

    def test_worked_example(self, worked_params, worked_realization):
        sinrs = compute_sinrs(worked_params, worked_realization)
        assert sinrs.g_r_d1 == pytest.approx(1.0)
        assert sinrs.g_r_d2 == pytest.approx(2.0)
        assert sinrs.g_d1_d1 == pytest.approx(1.25)
        assert sinrs.g_d1_d2 == pytest.approx(5 / 3)
        assert sinrs.g_d2_d2 == pytest.approx(1.0)
        assert sinrs.g_e_d1 == pytest.approx(0.45)
        assert sinrs.g_e_d2 == pytest.approx(1.55 / 1.45)
        assert sinrs.eff_d1 == pytest.approx(1.0)
        assert sinrs.eff_d2 == pytest.approx(1.0)

    def test_zero_source_power_for_d1(self, worked_params, worked_realization):
        sinrs = compute_sinrs(worked_params.with_allocation(0.0, 0.25), worked_realization)
        assert sinrs.g_r_d1 == 0.0
        assert sinrs.eff_d1 == 0.0

    def test_dead_source_relay_link(self, worked_params):
        ch = ChannelRealization(g_sr=0.0, g_rd1=0.5, g_rd2=0.2, g_se=0.1, g_re=0.1, g_si=0.0)
        sinrs = compute_sinrs(worked_params, ch)
        assert sinrs.g_r_d1 == 0.0
        assert sinrs.g_r_d2 == 0.0

    def test_monotone_in_allocation(self, worked_params, worked_realization):
        low = compute_sinrs(worked_params.with_allocation(0.1, 0.1), worked_realization)
        high = compute_sinrs(worked_params.with_allocation(0.3, 0.3), worked_realization)
        assert high.g_r_d1 > low.g_r_d1
        assert high.g_r_d2 < low.g_r_d2
        assert high.g_d1_d1 > low.g_d1_d1
        assert high.g_d2_d2 < low.g_d2_d2
        assert high.g_d1_d2 < low.g_d1_d2

    def test_weak_user_bounds(self):
        params = SystemParamsFactory(a_s=0.2, a_r=0.3)
        batch = sample_batch(params.profile, seed=3, count=2000)
        sinrs = compute_sinrs(params, batch)
        assert np.all(sinrs.g_r_d2 < (1 - 0.2) / 0.2)
        assert np.all(sinrs.g_d2_d2 < (1 - 0.3) / 0.3)

    def test_effective_sinr_is_minimum(self):
        params = SystemParamsFactory()
        batch = sample_batch(params.profile, seed=8, count=2000)
        sinrs = compute_sinrs(params, batch)
        assert np.all(sinrs.eff_d1 <= sinrs.g_r_d1)
        assert np.all(sinrs.eff_d1 <= sinrs.g_d1_d1)
        for branch in (sinrs.g_r_d2, sinrs.g_d2_d2, sinrs.g_d1_d2):
            assert np.all(sinrs.eff_d2 <= branch)

    def test_snr_gain_scaling(self, worked_realization):
        """Scaling rho up and every gain down by the same factor leaves SINRs unchanged"""
        params = SystemParamsFactory(rho=10.0, rho_si=0.0, a_s=0.2, a_r=0.25)
        factor = 8.0
        scaled_ch = ChannelRealization(
            *(getattr(worked_realization, name) / factor for name in
              ('g_sr', 'g_rd1', 'g_rd2', 'g_se', 'g_re', 'g_si'))
        )
        base = compute_sinrs(params, worked_realization)
        scaled = compute_sinrs(SystemParamsFactory(rho=80.0, rho_si=0.0, a_s=0.2, a_r=0.25), scaled_ch)
        for name in ('g_r_d1', 'g_r_d2', 'g_d1_d1', 'g_d1_d2', 'g_d2_d2', 'g_e_d1', 'g_e_d2'):
            assert getattr(scaled, name) == pytest.approx(getattr(base, name), rel=1e-12)


class TestInstantaneousRates:
    """Test rates and per-user clipping"""

    def test_worked_example(self, worked_params, worked_realization):
        rates = instantaneous_rates(compute_sinrs(worked_params, worked_realization))
        assert rates.r_d1 == pytest.approx(1.0)
        assert rates.r_d2 == pytest.approx(1.0)
        assert rates.re_d1 == pytest.approx(math.log2(1.45))
        assert rates.re_d1 == pytest.approx(0.5361, abs=1e-4)
        assert rates.re_d2 == pytest.approx(1.0489, abs=1e-4)
        assert rates.s_d1 == pytest.approx(0.4639, abs=1e-4)
        assert rates.s_d2 == 0.0
        assert rates.s_sum == pytest.approx(rates.s_d1)

    def test_all_zero(self):
        ch = ChannelRealization(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        rates = instantaneous_secrecy(SystemParamsFactory(), ch)
        assert rates.r_d1 == rates.r_d2 == rates.re_d1 == rates.re_d2 == rates.s_sum == 0.0

    def test_eavesdropper_dominates(self):
        params = SystemParamsFactory(rho=1.0, rho_si=0.0, a_s=0.5, a_r=0.5)
        # eff_d1 = 1, gamma^E_D1 = 3
        ch = ChannelRealization(g_sr=2.0, g_rd1=2.0, g_rd2=1.0, g_se=3.0, g_re=3.0, g_si=0.0)
        rates = instantaneous_secrecy(params, ch)
        assert rates.r_d1 == pytest.approx(1.0)
        assert rates.re_d1 == pytest.approx(2.0)
        assert rates.s_d1 == 0.0

    def test_batch_rates_non_negative(self):
        params = SystemParamsFactory(profile=FadingProfileFactory(var_se=1e-2, var_re=1e-2))
        rates = instantaneous_secrecy(params, sample_batch(params.profile, seed=4, count=5000))
        assert np.all(rates.s_d1 >= 0) and np.all(rates.s_d2 >= 0)
        np.testing.assert_allclose(rates.s_sum, rates.s_d1 + rates.s_d2)
