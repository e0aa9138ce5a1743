"""
Tests for the channel sampler
"""
import numpy as np
import pytest
from scipy import stats

from apps.system_model.factories import FadingProfileFactory

from .services import (
    LINKS,
    ChannelRealization,
    sample_batch,
    sample_block,
    sample_realization,
)


class TestSampleRealization:
    """Test per-index draws"""

    def test_gains_non_negative(self):
        profile = FadingProfileFactory()
        for index in range(200):
            ch = sample_realization(profile, seed=7, index=index)
            assert all(getattr(ch, name) >= 0 for name in LINKS)

    def test_deterministic(self):
        profile = FadingProfileFactory()
        first = sample_realization(profile, seed=99, index=12345)
        second = sample_realization(profile, seed=99, index=12345)
        assert first == second

    def test_seed_changes_stream(self):
        profile = FadingProfileFactory()
        assert sample_realization(profile, 1, 0) != sample_realization(profile, 2, 0)

    def test_large_index(self):
        ch = sample_realization(FadingProfileFactory(), seed=3, index=2 ** 62)
        assert isinstance(ch, ChannelRealization)


class TestSampleBatch:
    """Test batch draws and their statistics"""

    def test_singleton_matches_realization(self):
        profile = FadingProfileFactory()
        batch = sample_batch(profile, seed=5, count=1)
        assert len(batch) == 1
        assert batch[0] == sample_realization(profile, seed=5, index=0)

    def test_elements_match_realizations(self):
        profile = FadingProfileFactory()
        batch = sample_batch(profile, seed=11, count=300, chunk_size=64)
        for index in (0, 1, 63, 64, 65, 299):
            expected = sample_realization(profile, seed=11, index=index)
            got = batch[index]
            for name in LINKS:
                assert getattr(got, name) == pytest.approx(getattr(expected, name), rel=1e-14)

    def test_chunking_does_not_change_draws(self):
        profile = FadingProfileFactory()
        whole = sample_batch(profile, seed=17, count=1000, chunk_size=1000)
        chunked = sample_batch(profile, seed=17, count=1000, chunk_size=37)
        assert whole == chunked

    def test_block_offsets(self):
        profile = FadingProfileFactory()
        batch = sample_batch(profile, seed=23, count=500)
        block = sample_block(profile, seed=23, start=200, count=100)
        np.testing.assert_array_equal(block.gains, batch.gains[200:300])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sample_batch(FadingProfileFactory(), seed=1, count=0)

    @pytest.mark.slow
    def test_sample_mean(self):
        """Sample mean of 10^6 draws within 1% of the link variance"""
        profile = FadingProfileFactory(var_sr=1e-3)
        batch = sample_batch(profile, seed=2020, count=1_000_000)
        assert batch.g_sr.mean() == pytest.approx(1e-3, rel=0.01)

    @pytest.mark.slow
    def test_exponential_distribution(self):
        """Kolmogorov-Smirnov test against Exp(mean var_sr)"""
        profile = FadingProfileFactory()
        batch = sample_batch(profile, seed=31, count=1_000_000)
        result = stats.kstest(batch.g_sr, 'expon', args=(0.0, profile.var_sr))
        assert result.pvalue > 1e-3

    @pytest.mark.slow
    def test_links_independent(self):
        batch = sample_batch(FadingProfileFactory(), seed=41, count=1_000_000)
        corr = np.corrcoef(batch.gains.T)
        off_diagonal = corr[~np.eye(len(LINKS), dtype=bool)]
        assert np.max(np.abs(off_diagonal)) < 0.005
