"""
Seeded Monte Carlo estimation of ergodic rates.

The realization index space is cut into fixed chunks of ``chunk_size``;
each chunk is reduced to (n, mean, M2) moments and chunks are merged with
Chan's pairwise update in a fixed tree order. Chunk boundaries never depend
on the worker count, so estimates are bit-identical for any ``workers``.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from django.conf import settings

from apps.fading.services import sample_block
from apps.sinr.services import compute_sinrs, instantaneous_rates
from apps.system_model.services import SystemParams

logger = logging.getLogger(__name__)

QUANTITIES = ('c_d1', 'c_d2', 'ce_d1', 'ce_d2', 'ce_d2_bound', 's_sum')


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    n: int


@dataclass(frozen=True)
class ErgodicTerms:
    """Sample means of log2(1 + SINR) for both users and Eve"""

    c_d1: McEstimate
    c_d2: McEstimate
    ce_d1: McEstimate
    ce_d2: McEstimate


@dataclass(frozen=True)
class SimulationResult:
    terms: ErgodicTerms
    mode_b: McEstimate
    # E[log2(1 + delta)], Eve's D2 SINR with both allocations set to min(a_s, a_r)
    ce_d2_bound: McEstimate


@dataclass(frozen=True)
class Moments:
    """Running count, mean and sum of squared deviations"""

    n: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: np.ndarray) -> 'Moments':
        mean = float(np.mean(values))
        return cls(n=int(values.size), mean=mean, m2=float(np.sum((values - mean) ** 2)))

    def merge(self, other: 'Moments') -> 'Moments':
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return Moments(n=n, mean=mean, m2=m2)

    def estimate(self) -> McEstimate:
        std = math.sqrt(self.m2 / (self.n - 1)) if self.n > 1 else 0.0
        return McEstimate(mean=self.mean, std_err=std / math.sqrt(self.n), n=self.n)


def _tree_reduce(parts):
    while len(parts) > 1:
        merged = [a.merge(b) for a, b in zip(parts[::2], parts[1::2])]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def _eve_bound_sinr(params: SystemParams, ch) -> np.ndarray:
    a = min(params.a_s, params.a_r)
    eve = params.rho * (ch.g_se + ch.g_re)
    return (1.0 - a) * eve / (a * eve + 1.0)


def _chunk_moments(params: SystemParams, seed: int, span) -> dict:
    start, count = span
    batch = sample_block(params.profile, seed, start, count)
    rates = instantaneous_rates(compute_sinrs(params, batch))
    samples = {
        'c_d1': rates.r_d1,
        'c_d2': rates.r_d2,
        'ce_d1': rates.re_d1,
        'ce_d2': rates.re_d2,
        'ce_d2_bound': np.log2(1.0 + _eve_bound_sinr(params, batch)),
        's_sum': rates.s_sum,
    }
    return {name: Moments.of(values) for name, values in samples.items()}


def simulate(params: SystemParams, n: int, seed: int, workers: int = None, chunk_size: int = None) -> SimulationResult:
    """
    Estimate every ergodic quantity over realizations 0 .. n-1 of ``seed``.

    Args:
        params: System configuration
        n: Number of channel realizations (>= 2)
        seed: Stream key
        workers: Threads evaluating chunks (default MC_WORKERS)
        chunk_size: Realizations per chunk (default MC_CHUNK_SIZE)
    """
    if n < 2:
        raise ValueError('Monte Carlo estimation needs n >= 2')
    workers = workers or settings.MC_WORKERS
    chunk_size = chunk_size or settings.MC_CHUNK_SIZE
    spans = [(start, min(chunk_size, n - start)) for start in range(0, n, chunk_size)]
    job = partial(_chunk_moments, params, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, spans))
    else:
        chunks = [job(span) for span in spans]

    estimates = {
        name: _tree_reduce([chunk[name] for chunk in chunks]).estimate()
        for name in QUANTITIES
    }
    logger.debug('simulated %d realizations in %d chunks (seed=%d)', n, len(spans), seed)
    return SimulationResult(
        terms=ErgodicTerms(
            c_d1=estimates['c_d1'],
            c_d2=estimates['c_d2'],
            ce_d1=estimates['ce_d1'],
            ce_d2=estimates['ce_d2'],
        ),
        mode_b=estimates['s_sum'],
        ce_d2_bound=estimates['ce_d2_bound'],
    )


def estimate_ergodic_terms(params: SystemParams, n: int, seed: int, **kwargs) -> ErgodicTerms:
    return simulate(params, n, seed, **kwargs).terms


def secrecy_mode_a(terms: ErgodicTerms) -> float:
    """Average first, then clip each user's secrecy rate"""
    return (
        max(terms.c_d1.mean - terms.ce_d1.mean, 0.0)
        + max(terms.c_d2.mean - terms.ce_d2.mean, 0.0)
    )


def secrecy_mode_a_std_err(terms: ErgodicTerms) -> float:
    """Standard error of the unclipped mode-A sum (links of users and Eve are independent)"""
    return math.sqrt(sum(
        estimate.std_err ** 2 for estimate in (terms.c_d1, terms.c_d2, terms.ce_d1, terms.ce_d2)
    ))


def secrecy_mode_b(params: SystemParams, n: int, seed: int, **kwargs) -> McEstimate:
    """Clip each realization's secrecy rate, then average"""
    return simulate(params, n, seed, **kwargs).mode_b
