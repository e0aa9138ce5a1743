"""
Tests for the exponential integral and quadrature
"""
import math

import numpy as np
import pytest
from scipy import special

from .exceptions import NumericalDomainError, QuadratureError
from .services import (
    _e1_series,
    _scaled_e1_continued_fraction,
    exp_integral_e1,
    quad_finite,
    quad_semi_infinite,
    scaled_exp_integral_e1,
)


class TestExpIntegralE1:
    """Test E1 against reference values and scipy"""

    def test_reference_values(self):
        assert exp_integral_e1(1.0) == pytest.approx(0.21938393439552, rel=1e-12)
        assert exp_integral_e1(0.5) == pytest.approx(0.55977359477617, rel=1e-12)

    def test_bracketing_bound(self):
        for z in (1.0, 10.0, 100.0):
            scaled = scaled_exp_integral_e1(z)
            assert 1.0 / (z + 1.0) < scaled < 1.0 / z

    def test_against_scipy_on_log_grid(self):
        for z in np.logspace(-6, math.log10(50.0), 200):
            assert exp_integral_e1(float(z)) == pytest.approx(special.exp1(z), rel=1e-10)

    def test_scaled_against_scipy(self):
        for z in (1e-3, 0.7, 1.0, 2.0, 30.0, 600.0):
            assert scaled_exp_integral_e1(z) == pytest.approx(math.exp(z) * special.exp1(z), rel=1e-10)

    def test_scaled_large_argument(self):
        z = 1e5
        assert scaled_exp_integral_e1(z) == pytest.approx(1.0 / z, rel=1e-4)

    def test_series_and_fraction_agree_at_switch(self):
        via_series = _e1_series(1.0)
        via_fraction = _scaled_e1_continued_fraction(1.0) * math.exp(-1.0)
        assert via_series == pytest.approx(via_fraction, rel=1e-12)

    def test_underflow_returns_zero(self):
        assert exp_integral_e1(800.0) == 0.0

    def test_decreasing_and_convex(self):
        grid = np.linspace(0.05, 20.0, 400)
        values = np.array([exp_integral_e1(float(z)) for z in grid])
        assert np.all(np.diff(values) < 0)
        assert np.all(np.diff(values, 2) > 0)

    @pytest.mark.parametrize('z', [0.0, -1.0])
    def test_domain(self, z):
        with pytest.raises(NumericalDomainError):
            exp_integral_e1(z)


class TestQuadrature:
    """Test finite and semi-infinite adaptive quadrature"""

    def test_linear(self):
        assert quad_finite(lambda x: x, 0.0, 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_pi(self):
        assert quad_finite(lambda x: 4.0 / (1.0 + x * x), 0.0, 1.0) == pytest.approx(math.pi, rel=1e-10)

    def test_near_singular_endpoint(self):
        value = quad_finite(lambda x: 1.0 / (1.0 - x), 0.0, 0.999999)
        assert value == pytest.approx(-math.log(1e-6), rel=1e-8)
        assert value == pytest.approx(13.8155, abs=1e-4)

    def test_semi_infinite_exponential(self):
        assert quad_semi_infinite(lambda x: math.exp(-x)) == pytest.approx(1.0, rel=1e-9)

    def test_semi_infinite_against_e1(self):
        value = quad_semi_infinite(lambda x: math.exp(-x) / (1.0 + x))
        assert value == pytest.approx(math.e * exp_integral_e1(1.0), rel=1e-8)
        assert value == pytest.approx(0.59634736, rel=1e-7)

    def test_semi_infinite_gamma_two(self):
        assert quad_semi_infinite(lambda x: x * math.exp(-x)) == pytest.approx(1.0, rel=1e-9)

    def test_failure_carries_best_estimate(self):
        with pytest.raises(QuadratureError) as excinfo:
            quad_finite(lambda x: math.sin(200.0 * x), 0.0, 100.0, limit=1)
        assert math.isfinite(excinfo.value.best_estimate)

    def test_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            quad_finite(lambda x: x, 1.0, 1.0)

    def test_breakpoints_resolve_narrow_feature(self):
        width = 1e-4
        breakpoints = [width, 10 * width, 100 * width]
        value = quad_finite(lambda x: math.exp(-x / width), 0.0, 40.0, breakpoints=breakpoints)
        assert value == pytest.approx(width, rel=1e-7)

    def test_breakpoints_outside_interval_ignored(self):
        value = quad_finite(lambda x: x, 0.0, 1.0, breakpoints=[-1.0, 0.0, 0.5, 2.0])
        assert value == pytest.approx(0.5, rel=1e-12)

    def test_semi_infinite_breakpoints(self):
        rate = 1e6
        breakpoints = [1 / rate, 10 / rate, 100 / rate]
        value = quad_semi_infinite(lambda x: rate * math.exp(-rate * x), breakpoints=breakpoints)
        assert value == pytest.approx(1.0, rel=1e-8)
