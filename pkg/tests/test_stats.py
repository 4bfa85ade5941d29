import numpy as np
import pytest

from collapsim.stats import exponential_ks, histogram_z, mean_ci, poisson_rate


class TestMeanCi:
    """Test bootstrap mean estimates"""

    def test_constant_samples(self):
        estimate = mean_ci([3.0] * 10)
        assert estimate.mean == 3.0
        assert estimate.ci_low == estimate.ci_high == 3.0
        assert estimate.standard_error == 0.0

    def test_single_sample(self):
        with pytest.raises(ValueError, match="insufficient data"):
            mean_ci([1.0])

    def test_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            mean_ci([1.0, np.nan])

    def test_exponential_mean(self):
        samples = np.random.default_rng(0).exponential(1.0, 10_000)
        estimate = mean_ci(samples)
        assert estimate.mean == pytest.approx(1.0, abs=0.03)
        assert estimate.ci_low <= estimate.mean <= estimate.ci_high
        assert estimate.ci_high - estimate.ci_low < 0.1
        assert estimate.n_samples == 10_000

    def test_seed_reproducible(self):
        samples = np.random.default_rng(1).normal(size=200)
        assert mean_ci(samples, seed=4) == mean_ci(samples, seed=4)


class TestPoissonRate:
    """Test Poisson rate intervals"""

    def test_rate_and_interval(self):
        estimate = poisson_rate(100, 50.0)
        assert estimate.rate == pytest.approx(2.0)
        assert estimate.ci_low < 2.0 < estimate.ci_high
        assert estimate.ci_low == pytest.approx(1.627, abs=1e-3)
        assert estimate.ci_high == pytest.approx(2.432, abs=1e-3)

    def test_zero_events(self):
        estimate = poisson_rate(0, 10.0)
        assert estimate.rate == 0.0
        assert estimate.ci_low == 0.0
        assert estimate.ci_high == pytest.approx(0.3689, abs=1e-4)

    def test_invalid_exposure(self):
        with pytest.raises(ValueError, match="exposure must be positive"):
            poisson_rate(3, 0.0)

    def test_negative_events(self):
        with pytest.raises(ValueError, match="non-negative"):
            poisson_rate(-1, 1.0)


class TestDistributionChecks:
    """Test KS and histogram comparisons"""

    def test_exponential_ks_accepts_matching_law(self):
        samples = np.random.default_rng(2).exponential(30.0, 5000)
        assert exponential_ks(samples, 30.0) > 0.01

    def test_exponential_ks_rejects_wrong_mean(self):
        samples = np.random.default_rng(2).exponential(30.0, 5000)
        assert exponential_ks(samples, 20.0) < 1e-6

    def test_histogram_z_identical(self):
        samples = np.random.default_rng(3).normal(size=1000)
        assert histogram_z(samples, samples, 10) == 0.0

    def test_histogram_z_shifted(self):
        rng = np.random.default_rng(3)
        assert histogram_z(rng.normal(size=2000), rng.normal(1.0, size=2000), 10) > 3.0

    def test_histogram_z_empty(self):
        with pytest.raises(ValueError, match="empty histogram"):
            histogram_z([], [1.0, 2.0], np.array([0.0, 1.0, 3.0]))
