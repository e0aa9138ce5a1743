"""
Fast numerical self-checks: special functions, closed forms against
quadrature, the DC-basis identity, Monte Carlo determinism and a small-n
Monte Carlo oracle.
"""
import math

import numpy as np
from django.core.management.base import BaseCommand, CommandError
from scipy import special

from apps.fading.services import sample_batch
from apps.montecarlo.services import simulate
from apps.numerics.services import exp_integral_e1, quad_semi_infinite
from apps.optimizer.services import build_surrogate, dc_coefficients, true_ssr
from apps.secrecy.services import (
    RateParams,
    _gamma_eve_capacity_quadrature,
    ergodic_capacity_d1,
    ergodic_capacity_d1_quadrature,
    gamma_eve_capacity,
)
from apps.sinr.services import instantaneous_secrecy
from apps.system_model.services import Topology, build_params

SELFTEST_SEED = 1


def _fig2_params(a_s=0.2, a_r=0.14):
    return build_params(30.0, -10.0, Topology(10.0, 10.0, 15.0, 40.0, 30.0), a_s=a_s, a_r=a_r)


def check_e1():
    grid = np.logspace(-6, math.log10(50.0), 100)
    worst = max(abs(exp_integral_e1(float(z)) / special.exp1(z) - 1.0) for z in grid)
    return worst < 1e-10, f'max relative error {worst:.2e}'


def check_quadrature():
    value = quad_semi_infinite(lambda x: math.exp(-x) / (1.0 + x))
    error = abs(value / (math.e * exp_integral_e1(1.0)) - 1.0)
    return error < 1e-8, f'relative error {error:.2e}'


def check_closed_forms():
    worst = 0.0
    for a_s in (0.05, 0.2, 0.45):
        rp = RateParams.from_params(_fig2_params(a_s=a_s))
        worst = max(worst, abs(ergodic_capacity_d1(rp) / ergodic_capacity_d1_quadrature(rp) - 1.0))
    for pi in (0.1, 1.0, 10.0):
        worst = max(worst, abs(gamma_eve_capacity(pi) / _gamma_eve_capacity_quadrature(pi) - 1.0))
    return worst < 1e-6, f'max relative error {worst:.2e}'


def check_identity():
    params = _fig2_params()
    batch = sample_batch(params.profile, SELFTEST_SEED, 200)
    allocations = np.random.default_rng(SELFTEST_SEED).uniform(0.0, 0.5, size=(200, 2))
    worst = 0.0
    for i, (a_s, a_r) in enumerate(allocations):
        expected = instantaneous_secrecy(params.with_allocation(a_s, a_r), batch[i]).s_sum
        worst = max(worst, abs(true_ssr(dc_coefficients(params, batch[i]), a_s, a_r) - expected))
    return worst < 1e-12, f'max absolute error {worst:.2e}'


def check_surrogate():
    params = _fig2_params()
    batch = sample_batch(params.profile, SELFTEST_SEED, 20)
    axis = np.linspace(0.0, 0.5, 26)
    grid_s, grid_r = np.meshgrid(axis, axis, indexing='ij')
    for i in range(len(batch)):
        coeffs = dc_coefficients(params, batch[i])
        model = build_surrogate(coeffs, (0.2, 0.2))
        if np.any(model.objective(grid_s, grid_r) > true_ssr(coeffs, grid_s, grid_r) + 1e-12):
            return False, f'surrogate exceeds true SSR on realization {i}'
    return True, 'conservative on 20 realizations'


def check_determinism():
    params = _fig2_params()
    single = simulate(params, 20_000, SELFTEST_SEED, workers=1, chunk_size=4096)
    pooled = simulate(params, 20_000, SELFTEST_SEED, workers=3, chunk_size=4096)
    return single == pooled, 'worker count does not change estimates'


def check_monte_carlo():
    params = _fig2_params()
    estimate = simulate(params, 200_000, SELFTEST_SEED).terms.c_d1
    analytical = ergodic_capacity_d1(RateParams.from_params(params))
    gap = abs(analytical - estimate.mean)
    tolerance = max(0.01 * estimate.mean, 4 * estimate.std_err)
    return gap <= tolerance, f'|closed form - MC| = {gap:.2e} (tolerance {tolerance:.2e})'


CHECKS = (
    ('exponential integral', check_e1),
    ('quadrature', check_quadrature),
    ('closed forms', check_closed_forms),
    ('secrecy identity', check_identity),
    ('surrogate bound', check_surrogate),
    ('determinism', check_determinism),
    ('monte carlo', check_monte_carlo),
)


class Command(BaseCommand):
    help = 'Run the numerical self-checks'

    def handle(self, *args, **kwargs):
        failed = 0
        for name, check in CHECKS:
            ok, detail = check()
            if ok:
                self.stdout.write(self.style.SUCCESS(f'PASS {name}: {detail}'))
            else:
                failed += 1
                self.stdout.write(self.style.ERROR(f'FAIL {name}: {detail}'))
        if failed:
            raise CommandError(f'{failed} self-check(s) failed', returncode=2)
        self.stdout.write(self.style.SUCCESS(f'All {len(CHECKS)} self-checks passed'))
