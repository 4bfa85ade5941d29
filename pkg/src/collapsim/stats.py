"""Point estimates and confidence intervals for Monte-Carlo outputs."""

from dataclasses import asdict, dataclass

import numpy as np
import scipy.stats

BOOTSTRAP_RESAMPLES = 2000


@dataclass(frozen=True)
class MeanEstimate:
    mean: float
    ci_low: float
    ci_high: float
    n_samples: int
    standard_error: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    ci_low: float
    ci_high: float
    events: int
    exposure: float

    def to_dict(self) -> dict:
        return asdict(self)


def _as_samples(samples) -> np.ndarray:
    data = np.asarray(samples, dtype=float).ravel()
    if data.size < 2:
        raise ValueError(f"insufficient data: need at least 2 samples, got {data.size}")
    if not np.all(np.isfinite(data)):
        raise ValueError("samples must be finite")
    return data


def mean_ci(
    samples,
    seed: int = 0,
    confidence: float = 0.95,
    n_resamples: int = BOOTSTRAP_RESAMPLES,
) -> MeanEstimate:
    """Sample mean with a percentile bootstrap confidence interval.

    Args:
        samples: At least two finite values
        seed (int): Resampling seed; equal seeds give equal intervals
        confidence (float): Confidence level of the interval
        n_resamples (int): Number of bootstrap resamples

    Returns:
        MeanEstimate: mean, interval (always containing the mean), sample
            count and standard error
    """
    data = _as_samples(samples)
    mean = float(np.mean(data))
    if np.all(data == data[0]):
        return MeanEstimate(mean, mean, mean, int(data.size), 0.0)

    result = scipy.stats.bootstrap(
        (data,),
        np.mean,
        confidence_level=confidence,
        n_resamples=n_resamples,
        method="percentile",
        batch=250,
        rng=np.random.default_rng(seed),
    )
    low, high = result.confidence_interval
    return MeanEstimate(
        mean=mean,
        ci_low=float(min(low, mean)),
        ci_high=float(max(high, mean)),
        n_samples=int(data.size),
        standard_error=float(scipy.stats.sem(data)),
    )


def poisson_rate(events: int, exposure: float, confidence: float = 0.95) -> RateEstimate:
    """Rate of a Poisson process from a count and a total exposure (exact chi^2 interval)"""
    if exposure <= 0.0:
        raise ValueError(f"exposure must be positive, got {exposure}")
    if events < 0:
        raise ValueError(f"event count must be non-negative, got {events}")
    tail = (1.0 - confidence) / 2.0
    low = 0.0 if events == 0 else scipy.stats.chi2.ppf(tail, 2 * events) / 2.0
    high = scipy.stats.chi2.ppf(1.0 - tail, 2 * events + 2) / 2.0
    return RateEstimate(
        rate=events / exposure,
        ci_low=float(low / exposure),
        ci_high=float(high / exposure),
        events=int(events),
        exposure=float(exposure),
    )


def exponential_ks(samples, tau: float) -> float:
    """KS p-value of the samples against an exponential law with mean tau"""
    data = _as_samples(samples)
    return float(scipy.stats.kstest(data, "expon", args=(0.0, tau)).pvalue)


def histogram_z(reference, other, bins) -> float:
    """Largest per-bin z-score between two histograms, rescaled to equal totals"""
    counts_a, edges = np.histogram(np.asarray(reference, dtype=float), bins=bins)
    counts_b, _ = np.histogram(np.asarray(other, dtype=float), bins=edges)
    total_a, total_b = counts_a.sum(), counts_b.sum()
    if total_a == 0 or total_b == 0:
        raise ValueError("insufficient data: empty histogram")
    scale = total_a / total_b
    variance = counts_a + counts_b * scale**2
    occupied = variance > 0
    z = np.abs(counts_a - counts_b * scale)[occupied] / np.sqrt(variance[occupied])
    return float(np.max(z)) if z.size else 0.0
