"""
Block-Rayleigh channel sampler.

Every realization is a pure function of ``(seed, index)``: the Philox
counter-based generator is keyed with the seed and realization ``i`` reads
the two Philox blocks that follow counter ``2*i``. Batches, chunks and worker
pools therefore all reproduce the same gains.
"""
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from apps.system_model.services import FadingProfile

LINKS = ('g_sr', 'g_rd1', 'g_rd2', 'g_se', 'g_re', 'g_si')

# Philox4x64 emits 4 words per counter step; 6 uniforms need 2 steps
BLOCKS_PER_REALIZATION = 2
WORDS_PER_REALIZATION = 4 * BLOCKS_PER_REALIZATION

_SEED_MASK = (1 << 128) - 1


@dataclass(frozen=True)
class ChannelRealization:
    """Squared channel magnitudes |h|^2 of one fading block"""

    g_sr: float
    g_rd1: float
    g_rd2: float
    g_se: float
    g_re: float
    g_si: float


class ChannelBatch(Sequence):
    """
    Column-oriented block of consecutive realizations.

    Exposes the same ``g_*`` attributes as ChannelRealization (as arrays), so
    the SINR formulas apply to a whole batch at once.
    """

    def __init__(self, gains: np.ndarray, start: int = 0):
        self.gains = gains
        self.start = start

    def __len__(self):
        return self.gains.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            lo, _, _ = i.indices(len(self))
            return ChannelBatch(self.gains[i], self.start + lo)
        row = self.gains[i]
        return ChannelRealization(*(float(g) for g in row))

    def __getattr__(self, name):
        if name in LINKS:
            return self.gains[:, LINKS.index(name)]
        raise AttributeError(name)

    def __eq__(self, other):
        if not isinstance(other, ChannelBatch):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.gains, other.gains)


def profile_means(profile: FadingProfile) -> np.ndarray:
    """Link means in LINKS order"""
    return np.array([
        profile.var_sr,
        profile.var_rd1,
        profile.var_rd2,
        profile.var_se,
        profile.var_re,
        profile.var_si,
    ])


def _draw(means: np.ndarray, seed: int, start: int, count: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed & _SEED_MASK, counter=BLOCKS_PER_REALIZATION * start)
    raw = bitgen.random_raw(WORDS_PER_REALIZATION * count).reshape(count, WORDS_PER_REALIZATION)
    # 53-bit uniforms on (0, 1]: never log(0)
    u = ((raw[:, :len(LINKS)] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53
    return -np.log(u) * means


def sample_realization(profile: FadingProfile, seed: int, index: int) -> ChannelRealization:
    """Draw realization ``index`` of the stream keyed by ``seed``"""
    row = _draw(profile_means(profile), seed, index, 1)[0]
    return ChannelRealization(*(float(g) for g in row))


def sample_block(profile: FadingProfile, seed: int, start: int, count: int) -> ChannelBatch:
    """Realizations ``start .. start+count-1`` as one array-backed batch"""
    return ChannelBatch(_draw(profile_means(profile), seed, start, count), start)


def sample_batch(profile: FadingProfile, seed: int, count: int, chunk_size: int = None) -> ChannelBatch:
    """
    Realizations ``0 .. count-1``.

    Equal element-wise to ``[sample_realization(profile, seed, i) for i in range(count)]``;
    drawn in chunks of ``chunk_size`` realizations to bound peak memory.
    """
    if count < 1:
        raise ValueError('count must be at least 1')
    chunk_size = chunk_size or settings.MC_CHUNK_SIZE
    means = profile_means(profile)
    parts = [
        _draw(means, seed, start, min(chunk_size, count - start))
        for start in range(0, count, chunk_size)
    ]
    return ChannelBatch(np.concatenate(parts), 0)
