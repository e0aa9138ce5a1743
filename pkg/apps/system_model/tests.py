"""
Tests for the system model
"""
import math

import pytest

from .exceptions import InvalidConfigurationError
from .factories import FadingProfileFactory, SystemParamsFactory, TopologyFactory
from .services import (
    build_params,
    db_to_linear,
    linear_to_db,
    validate_params,
    variances_from_topology,
)


class TestVariancesFromTopology:
    """Test distance to variance conversion"""

    def test_unit_distance(self):
        profile = variances_from_topology(TopologyFactory(d_sr=1.0), nu=3.0, var_si=1.0)
        assert profile.var_sr == 1.0

    def test_baseline_geometry(self):
        """d_sr = d_rd1 = 10 m and d_rd2 = 15 m at nu = 3"""
        profile = variances_from_topology(TopologyFactory(), nu=3.0, var_si=1.0)
        assert profile.var_sr == pytest.approx(1e-3, rel=1e-12)
        assert profile.var_rd1 == pytest.approx(1e-3, rel=1e-12)
        assert profile.var_rd2 == pytest.approx(1 / 3375, rel=1e-12)
        assert profile.var_rd2 == pytest.approx(2.9630e-4, rel=1e-4)

    def test_var_si_passed_through(self):
        profile = variances_from_topology(TopologyFactory(), nu=3.0, var_si=0.25)
        assert profile.var_si == 0.25

    def test_decreasing_in_distance_and_nu(self):
        near = variances_from_topology(TopologyFactory(d_se=20.0), nu=3.0)
        far = variances_from_topology(TopologyFactory(d_se=40.0), nu=3.0)
        steep = variances_from_topology(TopologyFactory(d_se=20.0), nu=3.5)
        assert far.var_se < near.var_se
        assert steep.var_se < near.var_se

    def test_non_positive_distance_rejected(self):
        with pytest.raises(InvalidConfigurationError) as excinfo:
            variances_from_topology(TopologyFactory(d_re=0.0), nu=3.0)
        assert 'd_re' in excinfo.value.errors

    def test_non_positive_nu_rejected(self):
        with pytest.raises(InvalidConfigurationError) as excinfo:
            variances_from_topology(TopologyFactory(), nu=0.0)
        assert 'nu' in excinfo.value.errors


class TestValidateParams:
    """Test SystemParams invariants"""

    def test_valid_params_returned_unchanged(self):
        params = SystemParamsFactory(a_s=0.2, a_r=0.2, rho=1000.0)
        assert validate_params(params) is params

    def test_boundary_allocations_admitted(self):
        params = SystemParamsFactory(a_s=0.0, a_r=0.5)
        assert validate_params(params) is params

    def test_allocation_above_half_rejected(self):
        with pytest.raises(InvalidConfigurationError) as excinfo:
            validate_params(SystemParamsFactory(a_s=0.6))
        assert list(excinfo.value.errors) == ['a_s']

    def test_zero_snr_rejected(self):
        with pytest.raises(InvalidConfigurationError) as excinfo:
            validate_params(SystemParamsFactory(rho=0.0))
        assert 'rho' in excinfo.value.errors

    def test_negative_si_rejected(self):
        with pytest.raises(InvalidConfigurationError) as excinfo:
            validate_params(SystemParamsFactory(rho_si=-1.0))
        assert 'rho_si' in excinfo.value.errors

    def test_every_violation_reported(self):
        params = SystemParamsFactory(
            a_s=0.7, a_r=-0.1, profile=FadingProfileFactory(var_se=0.0)
        )
        with pytest.raises(InvalidConfigurationError) as excinfo:
            validate_params(params)
        assert {'a_s', 'a_r', 'profile.var_se'} <= set(excinfo.value.errors)


class TestDecibels:
    """Test dB helpers and the dB constructor"""

    def test_round_trip(self):
        assert db_to_linear(30.0) == pytest.approx(1000.0)
        assert linear_to_db(0.1) == pytest.approx(-10.0)
        assert linear_to_db(db_to_linear(7.5)) == pytest.approx(7.5)

    def test_build_params(self):
        params = build_params(30.0, -10.0, TopologyFactory(), a_s=0.2, a_r=0.14)
        assert params.rho == pytest.approx(1000.0)
        assert params.rho_si == pytest.approx(0.1)
        assert params.k_r == pytest.approx(1e-4)
        assert params.profile.var_se == pytest.approx(40.0 ** -3)
        assert math.isclose(params.a_r, 0.14)
