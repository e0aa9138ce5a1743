"""
Secrecy sum-rate optimization over the power-allocation pair (a_s, a_r).

With instantaneous CSI folded into DcCoefficients every rate difference is
a difference of concave functions of the allocation, each of the form
log2(c0 + cs*a_s + cr*a_r). One SCA step replaces the subtracted concave
term of every constraint by its tangent at the current point; since a
tangent over-estimates a concave function, every surrogate constraint
under-estimates its true rate difference and is exact at the anchor, so
the true SSR never decreases from one iterate to the next.

Linearized terms:
    g_E  = log2(1 + a_s C + a_r D)   both D1 constraints
    g_SR = log2(a_s A + B)           relay decode of D2
    g_2  = log2(a_r E2v + 1)         D2 decode
    g_1  = log2(a_r E1v + 1)         SIC stage at D1
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence, Tuple

import django
import numpy as np
from django.conf import settings

from apps.fading.services import sample_block
from apps.system_model.services import FPAPT_ALLOCATION, SystemParams

logger = logging.getLogger(__name__)

A_MAX = 0.5

# Coarse candidates refined by the subproblem zoom
_REFINED_CANDIDATES = 3
_ZOOM_POINTS = 21
_ZOOM_SHRINK = 5.0
_MAX_ZOOM_STEPS = 200

# Realization blocks handed to each optimizer worker
_BLOCKS_PER_WORKER = 4


@dataclass(frozen=True)
class DcCoefficients:
    """Channel-dependent constants of the rate differences (noise power 1)"""

    A: float
    B: float
    E1v: float
    E2v: float
    C: float
    D: float


@dataclass(frozen=True)
class AffineLog:
    """log2(c0 + cs * a_s + cr * a_r)"""

    c0: float
    cs: float
    cr: float

    def value(self, a_s, a_r):
        return np.log2(self.c0 + self.cs * a_s + self.cr * a_r)

    def gradient(self, a_s: float, a_r: float) -> Tuple[float, float]:
        scale = 1.0 / ((self.c0 + self.cs * a_s + self.cr * a_r) * math.log(2.0))
        return self.cs * scale, self.cr * scale

    def tangent(self, a_s: float, a_r: float) -> 'Tangent':
        grad_s, grad_r = self.gradient(a_s, a_r)
        return Tangent(
            value=float(self.value(a_s, a_r)),
            grad_s=grad_s,
            grad_r=grad_r,
            anchor=(a_s, a_r),
        )


@dataclass(frozen=True)
class Tangent:
    value: float
    grad_s: float
    grad_r: float
    anchor: Tuple[float, float]

    def __call__(self, a_s, a_r):
        return self.value + self.grad_s * (a_s - self.anchor[0]) + self.grad_r * (a_r - self.anchor[1])


@dataclass(frozen=True)
class SurrogateConstraint:
    """t_user <= kappa + kept(a) - tangent(a)"""

    name: str
    user: int
    kappa: float
    kept: AffineLog
    tangent: Tangent

    def rhs(self, a_s, a_r):
        return self.kappa + self.kept.value(a_s, a_r) - self.tangent(a_s, a_r)


@dataclass(frozen=True)
class SurrogateModel:
    coeffs: DcCoefficients
    anchor: Tuple[float, float]
    constraints: Tuple[SurrogateConstraint, ...]

    def user_bounds(self, a_s, a_r):
        """Unclipped (t1, t2): the tightest surrogate bound of each user"""
        t1 = t2 = None
        for constraint in self.constraints:
            value = constraint.rhs(a_s, a_r)
            if constraint.user == 1:
                t1 = value if t1 is None else np.minimum(t1, value)
            else:
                t2 = value if t2 is None else np.minimum(t2, value)
        return t1, t2

    def objective(self, a_s, a_r):
        t1, t2 = self.user_bounds(a_s, a_r)
        return np.maximum(t1, 0.0) + np.maximum(t2, 0.0)


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    a_s: float
    a_r: float
    surrogate_objective: float
    true_ssr: float
    step_norm: float
    unclipped_t1: float
    unclipped_t2: float


@dataclass
class OptimizerTrace:
    """Iterates of one SCA start; ``ssr`` is the best true SSR recorded"""

    start: Tuple[float, float]
    steps: List[TraceStep] = field(default_factory=list)
    a_s: float = 0.0
    a_r: float = 0.0
    ssr: float = 0.0
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.steps) - 1


@dataclass(frozen=True)
class GridOptimum:
    a_s: float
    a_r: float
    ssr: float


@dataclass(frozen=True)
class AllocationComparison:
    """SSROT against FPAPT on one channel realization"""

    index: int
    ssrot: float
    fpapt: float
    a_s: float
    a_r: float
    iterations: int
    converged: bool


def _as_output(value):
    return float(value) if np.ndim(value) == 0 else value


def dc_coefficients(params: SystemParams, ch) -> DcCoefficients:
    """Allocation-free constants of one realization; the allocation in ``params`` is ignored"""
    return DcCoefficients(
        A=params.rho * ch.g_sr,
        B=params.rho_si * ch.g_si + 1.0,
        E1v=params.rho * ch.g_rd1,
        E2v=params.rho * ch.g_rd2,
        C=params.rho * ch.g_se,
        D=params.rho * ch.g_re,
    )


def _eve_d1(coeffs: DcCoefficients) -> AffineLog:
    return AffineLog(1.0, coeffs.C, coeffs.D)


def _kappas(coeffs: DcCoefficients) -> Tuple[float, float, float]:
    eve_full = math.log2(coeffs.C + coeffs.D + 1.0)
    return (
        math.log2(coeffs.A + coeffs.B) - eve_full,
        math.log2(coeffs.E2v + 1.0) - eve_full,
        math.log2(coeffs.E1v + 1.0) - eve_full,
    )


def true_ssr(coeffs: DcCoefficients, a_s, a_r):
    """
    Per-realization secrecy sum rate at (a_s, a_r), clipped per user.

    Accepts scalars or broadcastable arrays of allocations.
    """
    eve_d1 = _eve_d1(coeffs).value(a_s, a_r)
    r_d1 = np.minimum(
        np.log2(1.0 + a_s * coeffs.A / coeffs.B),
        np.log2(1.0 + a_r * coeffs.E1v),
    )
    kappa_sr, kappa_2, kappa_1 = _kappas(coeffs)
    # every D2 difference shares + log2(a_s C + a_r D + 1)
    r_d2 = eve_d1 + np.minimum(
        np.minimum(
            kappa_sr - np.log2(a_s * coeffs.A + coeffs.B),
            kappa_2 - np.log2(a_r * coeffs.E2v + 1.0),
        ),
        kappa_1 - np.log2(a_r * coeffs.E1v + 1.0),
    )
    return _as_output(np.maximum(r_d1 - eve_d1, 0.0) + np.maximum(r_d2, 0.0))


def build_surrogate(coeffs: DcCoefficients, anchor: Tuple[float, float]) -> SurrogateModel:
    a_s, a_r = anchor
    kappa_sr, kappa_2, kappa_1 = _kappas(coeffs)
    eve = _eve_d1(coeffs)
    eve_tangent = eve.tangent(a_s, a_r)
    constraints = (
        SurrogateConstraint('relay_d1', 1, 0.0, AffineLog(1.0, coeffs.A / coeffs.B, 0.0), eve_tangent),
        SurrogateConstraint('own_d1', 1, 0.0, AffineLog(1.0, 0.0, coeffs.E1v), eve_tangent),
        SurrogateConstraint('relay_d2', 2, kappa_sr, eve, AffineLog(coeffs.B, coeffs.A, 0.0).tangent(a_s, a_r)),
        SurrogateConstraint('own_d2', 2, kappa_2, eve, AffineLog(1.0, 0.0, coeffs.E2v).tangent(a_s, a_r)),
        SurrogateConstraint('sic_d2', 2, kappa_1, eve, AffineLog(1.0, 0.0, coeffs.E1v).tangent(a_s, a_r)),
    )
    return SurrogateModel(coeffs=coeffs, anchor=(a_s, a_r), constraints=constraints)


def _axis(lo: float, hi: float, count: int) -> np.ndarray:
    return np.linspace(max(lo, 0.0), min(hi, A_MAX), count)


def _best_on_grid(model: SurrogateModel, axis_s: np.ndarray, axis_r: np.ndarray) -> Tuple[float, float, float]:
    grid_s, grid_r = np.meshgrid(axis_s, axis_r, indexing='ij')
    values = model.objective(grid_s, grid_r)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    return float(grid_s[i, j]), float(grid_r[i, j]), float(values[i, j])


def _on_interior_edge(value: float, axis: np.ndarray) -> bool:
    """True when ``value`` sits on a window end that is not a box boundary"""
    return (value == axis[0] and axis[0] > 0.0) or (value == axis[-1] and axis[-1] < A_MAX)


def solve_subproblem(model: SurrogateModel, coarse_step: float = None, tol: float = None) -> Tuple[float, float, float, float]:
    """
    Maximize the clipped surrogate objective t1 + t2 over [0, 1/2]^2.

    A coarse grid locates the best few cells; each is refined by shrinking
    windows until their half-width drops below ``tol``. The anchor is
    returned whenever nothing strictly better is found.

    Returns:
        (a_s, a_r, t1, t2) with t1, t2 clipped at zero
    """
    coarse_step = coarse_step or settings.SUBPROBLEM_COARSE_STEP
    tol = tol or settings.SUBPROBLEM_TOL

    coarse = np.linspace(0.0, A_MAX, int(round(A_MAX / coarse_step)) + 1)
    grid_s, grid_r = np.meshgrid(coarse, coarse, indexing='ij')
    values = model.objective(grid_s, grid_r).ravel()
    order = np.argsort(values, kind='stable')[::-1][:_REFINED_CANDIDATES]

    best = model.anchor + (float(model.objective(*model.anchor)),)
    anchor_value = best[2]
    for flat in order:
        c_s, c_r = float(grid_s.flat[flat]), float(grid_r.flat[flat])
        value = float(values[flat])
        half = coarse_step
        for _ in range(_MAX_ZOOM_STEPS):
            if half <= tol:
                break
            axis_s = _axis(c_s - half, c_s + half, _ZOOM_POINTS)
            axis_r = _axis(c_r - half, c_r + half, _ZOOM_POINTS)
            z_s, z_r, z_value = _best_on_grid(model, axis_s, axis_r)
            if z_value <= value:
                half /= _ZOOM_SHRINK
                continue
            c_s, c_r, value = z_s, z_r, z_value
            # a best point on an interior window edge moves the window instead of shrinking it
            if not (_on_interior_edge(c_s, axis_s) or _on_interior_edge(c_r, axis_r)):
                half /= _ZOOM_SHRINK
        if value > best[2]:
            best = (c_s, c_r, value)

    a_s, a_r = (best[0], best[1]) if best[2] > anchor_value else model.anchor
    t1, t2 = model.user_bounds(a_s, a_r)
    return a_s, a_r, max(float(t1), 0.0), max(float(t2), 0.0)


def _run_start(coeffs: DcCoefficients, start: Tuple[float, float], eps: float, max_iter: int) -> OptimizerTrace:
    a_s, a_r = start
    ssr = true_ssr(coeffs, a_s, a_r)
    trace = OptimizerTrace(start=start, a_s=a_s, a_r=a_r, ssr=ssr)
    t1, t2 = build_surrogate(coeffs, start).user_bounds(a_s, a_r)
    trace.steps.append(TraceStep(0, a_s, a_r, ssr, ssr, 0.0, float(t1), float(t2)))

    for iteration in range(1, max_iter + 1):
        model = build_surrogate(coeffs, (a_s, a_r))
        next_s, next_r, t1, t2 = solve_subproblem(model)
        unclipped_t1, unclipped_t2 = model.user_bounds(next_s, next_r)
        ssr = true_ssr(coeffs, next_s, next_r)
        delta_s, delta_r = next_s - a_s, next_r - a_r
        trace.steps.append(TraceStep(
            iteration=iteration,
            a_s=next_s,
            a_r=next_r,
            surrogate_objective=t1 + t2,
            true_ssr=ssr,
            step_norm=math.hypot(delta_s, delta_r),
            unclipped_t1=float(unclipped_t1),
            unclipped_t2=float(unclipped_t2),
        ))
        logger.debug('sca %d: a=(%.6f, %.6f) ssr=%.9f', iteration, next_s, next_r, ssr)
        if ssr > trace.ssr:
            trace.a_s, trace.a_r, trace.ssr = next_s, next_r, ssr
        a_s, a_r = next_s, next_r
        if abs(delta_s) < eps and abs(delta_r) < eps:
            trace.converged = True
            break
    return trace


def sca_optimize(
    coeffs: DcCoefficients,
    eps: float = None,
    max_iter: int = None,
    starts: Optional[Sequence[Tuple[float, float]]] = None,
    random_starts: int = None,
    seed=None,
) -> OptimizerTrace:
    """
    Multi-start DC-programming SCA.

    Args:
        coeffs: Channel constants of one realization
        eps: Stop once both allocation deltas fall below eps
        max_iter: Iteration cap per start
        starts: Explicit start points; the FPAPT point is always appended
        random_starts: Additional uniform starts on [0, 1/2]^2
        seed: Seed (int or sequence of ints) for the random starts

    Returns:
        Trace of the start that reached the highest true SSR
    """
    eps = settings.SCA_EPS if eps is None else eps
    max_iter = settings.SCA_MAX_ITER if max_iter is None else max_iter
    random_starts = settings.SCA_RANDOM_STARTS if random_starts is None else random_starts
    if not eps > 0:
        raise ValueError('eps must be positive')
    if max_iter < 1:
        raise ValueError('max_iter must be at least 1')

    points = list(starts or [])
    if random_starts:
        rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
        points.extend((float(s), float(r)) for s, r in rng.uniform(0.0, A_MAX, size=(random_starts, 2)))
    points.append((FPAPT_ALLOCATION, FPAPT_ALLOCATION))

    best = None
    for start in points:
        trace = _run_start(coeffs, start, eps, max_iter)
        if not trace.converged:
            logger.warning('SCA from %r stopped at max_iter=%d without converging', start, max_iter)
        if best is None or trace.ssr > best.ssr:
            best = trace
    return best


def grid_oracle(coeffs: DcCoefficients, step: float) -> GridOptimum:
    """Brute-force argmax of true_ssr over the regular grid of spacing ``step``"""
    if not 0 < step <= 0.01:
        raise ValueError('grid step must lie in (0, 0.01]')
    axis = np.linspace(0.0, A_MAX, int(round(A_MAX / step)) + 1)
    grid_s, grid_r = np.meshgrid(axis, axis, indexing='ij')
    values = true_ssr(coeffs, grid_s, grid_r)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    return GridOptimum(a_s=float(grid_s[i, j]), a_r=float(grid_r[i, j]), ssr=float(values[i, j]))


def fpapt_baseline(coeffs: DcCoefficients) -> float:
    return true_ssr(coeffs, FPAPT_ALLOCATION, FPAPT_ALLOCATION)


def _compare_block(params: SystemParams, seed: int, sca_kwargs: dict, span) -> List[AllocationComparison]:
    start, count = span
    batch = sample_block(params.profile, seed, start, count)
    rows = []
    for offset in range(count):
        index = start + offset
        coeffs = dc_coefficients(params, batch[offset])
        trace = sca_optimize(coeffs, seed=[seed, index], **sca_kwargs)
        rows.append(AllocationComparison(
            index=index,
            ssrot=trace.ssr,
            fpapt=fpapt_baseline(coeffs),
            a_s=trace.a_s,
            a_r=trace.a_r,
            iterations=trace.iterations,
            converged=trace.converged,
        ))
    return rows


def compare_allocations(
    params: SystemParams,
    n: int,
    seed: int,
    workers: int = None,
    **sca_kwargs,
) -> List[AllocationComparison]:
    """
    Run SSROT and FPAPT on realizations 0 .. n-1 of ``seed``.

    Random starts of realization i are seeded with (seed, i), so every row
    is reproducible on its own and the rows do not depend on ``workers``.
    Blocks of realizations go to a process pool when ``workers`` > 1
    (default MC_WORKERS); rows come back ordered by index.
    """
    if n < 1:
        raise ValueError('n must be at least 1')
    workers = workers or settings.MC_WORKERS
    block = max(1, math.ceil(n / (_BLOCKS_PER_WORKER * workers)))
    spans = [(start, min(block, n - start)) for start in range(0, n, block)]
    job = partial(_compare_block, params, seed, sca_kwargs)

    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=django.setup) as pool:
            blocks = list(pool.map(job, spans))
    else:
        blocks = [job(span) for span in spans]

    logger.info('optimized %d realizations in %d blocks (seed=%d)', n, len(spans), seed)
    return [row for rows in blocks for row in rows]
