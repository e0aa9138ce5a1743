"""
Tests for the DC-programming secrecy sum-rate optimizer
"""
import math

import numpy as np
import pytest

from apps.fading.services import ChannelRealization, sample_batch
from apps.sinr.services import instantaneous_rates, instantaneous_secrecy, compute_sinrs
from apps.system_model.factories import FadingProfileFactory, SystemParamsFactory

from .factories import DcCoefficientsFactory, random_coefficients
from .services import (
    AffineLog,
    _run_start,
    build_surrogate,
    compare_allocations,
    dc_coefficients,
    fpapt_baseline,
    grid_oracle,
    sca_optimize,
    solve_subproblem,
    true_ssr,
)


def true_differences(coeffs, a_s, a_r):
    """Rate minus eavesdropping rate for each of the five decoding stages"""
    eve_d1 = np.log2(1 + a_s * coeffs.C + a_r * coeffs.D)
    eve_d2 = np.log2(coeffs.C + coeffs.D + 1) - np.log2(a_s * coeffs.C + a_r * coeffs.D + 1)
    return {
        'relay_d1': np.log2(1 + a_s * coeffs.A / coeffs.B) - eve_d1,
        'own_d1': np.log2(1 + a_r * coeffs.E1v) - eve_d1,
        'relay_d2': np.log2(coeffs.A + coeffs.B) - np.log2(a_s * coeffs.A + coeffs.B) - eve_d2,
        'own_d2': np.log2(coeffs.E2v + 1) - np.log2(a_r * coeffs.E2v + 1) - eve_d2,
        'sic_d2': np.log2(coeffs.E1v + 1) - np.log2(a_r * coeffs.E1v + 1) - eve_d2,
    }


def far_eve_coefficients(count, seed=17):
    params = SystemParamsFactory()
    batch = sample_batch(params.profile, seed=seed, count=count)
    return [dc_coefficients(params, batch[i]) for i in range(count)]


class TestDcCoefficients:
    """Test the channel constants"""

    def test_worked_realization(self, worked_params, worked_realization):
        coeffs = dc_coefficients(worked_params, worked_realization)
        assert coeffs == DcCoefficientsFactory()

    def test_no_self_interference(self, worked_realization):
        coeffs = dc_coefficients(SystemParamsFactory(rho=10.0, rho_si=0.0), worked_realization)
        assert coeffs.B == 1.0
        assert coeffs.A == pytest.approx(10.0)


class TestTrueSsr:
    """Test the secrecy sum rate in the DC basis"""

    def test_matches_instantaneous_secrecy(self):
        rng = np.random.default_rng(5)
        params = SystemParamsFactory(profile=FadingProfileFactory(var_se=1e-3, var_re=1e-3))
        batch = sample_batch(params.profile, seed=11, count=1000)
        for i, (a_s, a_r) in enumerate(rng.uniform(0.0, 0.5, size=(1000, 2))):
            ch = batch[i]
            expected = instantaneous_secrecy(params.with_allocation(a_s, a_r), ch).s_sum
            assert true_ssr(dc_coefficients(params, ch), a_s, a_r) == pytest.approx(expected, abs=1e-12)

    def test_no_eavesdropper(self, worked_params):
        ch = ChannelRealization(g_sr=1.0, g_rd1=0.5, g_rd2=0.2, g_se=0.0, g_re=0.0, g_si=1.0)
        rates = instantaneous_rates(compute_sinrs(worked_params.with_allocation(0.3, 0.1), ch))
        coeffs = dc_coefficients(worked_params, ch)
        assert true_ssr(coeffs, 0.3, 0.1) == pytest.approx(rates.r_d1 + rates.r_d2, abs=1e-12)

    def test_zero_allocation_leaves_weak_user_only(self):
        coeffs = DcCoefficientsFactory(C=0.5, D=0.5)
        weak = min(math.log2(1 + 10 / 2), math.log2(1 + 2), math.log2(1 + 5)) - 1.0
        assert true_ssr(coeffs, 0.0, 0.0) == pytest.approx(max(weak, 0.0), abs=1e-12)

    def test_vectorized(self):
        coeffs = DcCoefficientsFactory()
        grid = np.linspace(0.0, 0.5, 11)
        values = true_ssr(coeffs, grid[:, None], grid[None, :])
        assert values.shape == (11, 11)
        assert values[4, 4] == pytest.approx(true_ssr(coeffs, 0.2, 0.2))


class TestBuildSurrogate:
    """Test tangency, conservativeness and gradients of the surrogate constraints"""

    def test_exact_at_anchor(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            coeffs = random_coefficients(rng)
            anchor = tuple(rng.uniform(0.0, 0.5, size=2))
            model = build_surrogate(coeffs, anchor)
            truth = true_differences(coeffs, *anchor)
            for constraint in model.constraints:
                assert constraint.rhs(*anchor) == pytest.approx(truth[constraint.name], abs=1e-12)
            assert model.objective(*anchor) == pytest.approx(true_ssr(coeffs, *anchor), abs=1e-12)

    def test_conservative_on_grid(self):
        rng = np.random.default_rng(22)
        axis = np.linspace(0.0, 0.5, 51)
        grid_s, grid_r = np.meshgrid(axis, axis, indexing='ij')
        for _ in range(100):
            coeffs = random_coefficients(rng)
            model = build_surrogate(coeffs, tuple(rng.uniform(0.0, 0.5, size=2)))
            truth = true_differences(coeffs, grid_s, grid_r)
            for constraint in model.constraints:
                assert np.all(constraint.rhs(grid_s, grid_r) <= truth[constraint.name] + 1e-12)

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(23)
        h = 1e-6
        for _ in range(20):
            coeffs = random_coefficients(rng)
            a_s, a_r = rng.uniform(0.05, 0.45, size=2)
            for term in (
                AffineLog(1.0, coeffs.C, coeffs.D),
                AffineLog(coeffs.B, coeffs.A, 0.0),
                AffineLog(1.0, 0.0, coeffs.E2v),
                AffineLog(1.0, 0.0, coeffs.E1v),
            ):
                grad_s, grad_r = term.gradient(a_s, a_r)
                fd_s = (term.value(a_s + h, a_r) - term.value(a_s - h, a_r)) / (2 * h)
                fd_r = (term.value(a_s, a_r + h) - term.value(a_s, a_r - h)) / (2 * h)
                assert grad_s == pytest.approx(fd_s, rel=1e-6, abs=1e-9)
                assert grad_r == pytest.approx(fd_r, rel=1e-6, abs=1e-9)


class TestSolveSubproblem:
    """Test the two-variable surrogate maximization"""

    @staticmethod
    def grid_reference(model, step=1e-3):
        axis = np.linspace(0.0, 0.5, int(round(0.5 / step)) + 1)
        return float(np.max(model.objective(axis[:, None], axis[None, :])))

    def test_worked_coefficients(self):
        model = build_surrogate(DcCoefficientsFactory(), (0.25, 0.25))
        a_s, a_r, t1, t2 = solve_subproblem(model)
        assert 0.0 <= a_s <= 0.5 and 0.0 <= a_r <= 0.5
        assert t1 + t2 == pytest.approx(float(model.objective(a_s, a_r)), abs=1e-12)
        assert t1 + t2 >= self.grid_reference(model) - 1e-4
        assert t1 + t2 >= float(model.objective(0.25, 0.25))

    def test_no_eavesdropper_improves_on_anchor(self):
        model = build_surrogate(DcCoefficientsFactory(C=0.0, D=0.0), (0.45, 0.05))
        _, _, t1, t2 = solve_subproblem(model)
        assert t1 + t2 >= float(model.objective(0.45, 0.05))

    def test_dead_links(self):
        model = build_surrogate(DcCoefficientsFactory(A=0.0, E1v=0.0, E2v=0.0), (0.2, 0.2))
        a_s, a_r, t1, t2 = solve_subproblem(model)
        assert t1 == t2 == 0.0
        assert (a_s, a_r) == (0.2, 0.2)

    def test_random_against_grid(self):
        rng = np.random.default_rng(24)
        for _ in range(10):
            model = build_surrogate(random_coefficients(rng), tuple(rng.uniform(0.0, 0.5, size=2)))
            _, _, t1, t2 = solve_subproblem(model)
            assert t1 + t2 >= self.grid_reference(model) - 1e-4


class TestScaOptimize:
    """Test the multi-start SCA iteration"""

    def test_no_eavesdropper_matches_grid(self):
        coeffs = DcCoefficientsFactory(C=0.0, D=0.0)
        trace = sca_optimize(coeffs)
        assert trace.ssr == pytest.approx(grid_oracle(coeffs, 0.001).ssr, abs=1e-3)

    def test_trace_is_monotone(self):
        for coeffs in far_eve_coefficients(10):
            trace = sca_optimize(coeffs, seed=3)
            ssrs = [step.true_ssr for step in trace.steps]
            assert np.all(np.diff(ssrs) >= -1e-9)
            assert trace.ssr == pytest.approx(max(ssrs))
            assert trace.ssr >= fpapt_baseline(coeffs)

    def test_stalled_start_is_fixpoint_or_ascends(self):
        coeffs = DcCoefficientsFactory(C=50.0, D=50.0)
        trace = sca_optimize(coeffs, starts=[(0.5, 0.5)], random_starts=0)
        assert trace.ssr >= true_ssr(coeffs, 0.5, 0.5)

    def test_max_iter_reached(self):
        trace = _run_start(DcCoefficientsFactory(), (0.01, 0.45), eps=1e-12, max_iter=1)
        assert not trace.converged
        assert trace.iterations == 1

    def test_deterministic(self):
        coeffs = DcCoefficientsFactory()
        first = sca_optimize(coeffs, seed=9)
        second = sca_optimize(coeffs, seed=9)
        assert (first.a_s, first.a_r, first.ssr) == (second.a_s, second.a_r, second.ssr)

    @pytest.mark.parametrize('eps', [-1.0, 0.0])
    def test_rejects_non_positive_eps(self, eps):
        with pytest.raises(ValueError):
            sca_optimize(DcCoefficientsFactory(), eps=eps)

    def test_rejects_zero_iteration_cap(self):
        with pytest.raises(ValueError):
            sca_optimize(DcCoefficientsFactory(), max_iter=0)

    @pytest.mark.slow
    def test_far_eve_realizations(self):
        """Ascent, FPAPT dominance and oracle gap over 100 realizations"""
        close_to_oracle = 0
        coefficient_sets = far_eve_coefficients(100, seed=31)
        for coeffs in coefficient_sets:
            trace = sca_optimize(coeffs, seed=5)
            ssrs = [step.true_ssr for step in trace.steps]
            assert np.all(np.diff(ssrs) >= -1e-9)
            assert trace.ssr >= fpapt_baseline(coeffs)
            if trace.ssr >= grid_oracle(coeffs, 0.005).ssr - 0.02:
                close_to_oracle += 1
        assert close_to_oracle >= 95


class TestGridOracle:
    """Test the brute-force reference"""

    def test_eavesdropper_dominates(self):
        assert grid_oracle(DcCoefficientsFactory(C=1e6, D=1e6), 0.01).ssr == 0.0

    def test_dominates_fpapt(self):
        coeffs = DcCoefficientsFactory(C=0.0, D=0.0, B=1.0)
        assert grid_oracle(coeffs, 0.01).ssr >= true_ssr(coeffs, 0.2, 0.2)

    def test_refinement_self_check(self):
        for coeffs in far_eve_coefficients(20, seed=25):
            assert grid_oracle(coeffs, 0.005).ssr == pytest.approx(grid_oracle(coeffs, 0.0005).ssr, abs=0.01)

    @pytest.mark.parametrize('step', [0.0, 0.02])
    def test_rejects_step(self, step):
        with pytest.raises(ValueError):
            grid_oracle(DcCoefficientsFactory(), step)


class TestFpaptBaseline:
    """Test the fixed-allocation baseline"""

    def test_no_eavesdropper_hand_value(self):
        # r_d1 = 1, r_d2 = log2(3 / 1.4)
        coeffs = DcCoefficientsFactory(C=0.0, D=0.0)
        assert fpapt_baseline(coeffs) == pytest.approx(1.0 + math.log2(15 / 7), abs=1e-12)

    def test_eavesdropper_dominates(self):
        assert fpapt_baseline(DcCoefficientsFactory(C=1e6, D=1e6)) == 0.0


class TestCompareAllocations:
    """Test SSROT against FPAPT on sampled realizations"""

    def test_rows(self):
        rows = compare_allocations(SystemParamsFactory(), n=5, seed=41, random_starts=1)
        assert [row.index for row in rows] == list(range(5))
        assert all(row.ssrot >= row.fpapt for row in rows)

    def test_reproducible(self):
        first = compare_allocations(SystemParamsFactory(), n=3, seed=42, random_starts=1)
        second = compare_allocations(SystemParamsFactory(), n=3, seed=42, random_starts=1)
        assert first == second

    def test_independent_of_workers(self):
        params = SystemParamsFactory()
        serial = compare_allocations(params, n=9, seed=43, workers=1, random_starts=1)
        pooled = compare_allocations(params, n=9, seed=43, workers=2, random_starts=1)
        assert [row.index for row in pooled] == list(range(9))
        assert pooled == serial

    def test_rejects_empty_run(self):
        with pytest.raises(ValueError):
            compare_allocations(SystemParamsFactory(), n=0, seed=1)
