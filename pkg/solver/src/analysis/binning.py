"""Consensus bin-count selection and histogram construction."""

import logging
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy import stats

from ..utils.errors import ContractError
from .sampling import SampleSet

logger = logging.getLogger(__name__)

MIN_BINS = 2
MAX_BINS = 512
MIN_SAMPLE = 8


class HistogramSpec:
    """Normalized histogram: bin count, value range and bin probabilities."""

    def __init__(self, probabilities: np.ndarray, value_range: Tuple[float, float]):
        """
        Initialize histogram.

        Args:
            probabilities: Bin probabilities summing to 1
            value_range: (lo, hi) covered by the bins

        Raises:
            ContractError: If fewer than two bins or the probabilities do not sum to 1
        """
        probabilities = np.asarray(probabilities, dtype=float)
        if probabilities.size < MIN_BINS:
            raise ContractError(f"histogram needs at least {MIN_BINS} bins")
        if abs(probabilities.sum() - 1.0) > 1e-12:
            raise ContractError(f"bin probabilities sum to {probabilities.sum()}")
        self.probabilities = probabilities
        self.range = (float(value_range[0]), float(value_range[1]))

    @property
    def n_bins(self) -> int:
        return self.probabilities.size

    def aligned_with(self, other: 'HistogramSpec') -> bool:
        """True if both histograms share bin count and range."""
        return self.n_bins == other.n_bins and self.range == other.range


def _as_values(sample: Union[SampleSet, np.ndarray]) -> np.ndarray:
    if isinstance(sample, SampleSet):
        return sample.values
    return np.asarray(sample, dtype=float)


def bin_rules(sample: Union[SampleSet, np.ndarray]) -> Dict[str, Optional[int]]:
    """
    Candidate bin counts of the six classical rules.

    Scott and Freedman-Diaconis are None when the sample spread they divide
    by is zero; Doane is None for a zero-variance sample.

    Args:
        sample: Sample values

    Returns:
        Mapping of rule name to bin count (or None when undefined)
    """
    values = _as_values(sample)
    n = values.size
    spread = float(np.ptp(values))
    sd = float(np.std(values, ddof=1))
    iqr = float(stats.iqr(values))
    cube_root = n ** (-1.0 / 3.0)

    rules: Dict[str, Optional[int]] = {
        'sturges': int(np.ceil(np.log2(n))) + 1,
        'scott': None,
        'freedman_diaconis': None,
        'rice': int(np.ceil(2.0 * n ** (1.0 / 3.0))),
        'sqrt': int(np.ceil(np.sqrt(n))),
        'doane': None,
    }
    if sd > 0:
        rules['scott'] = int(np.ceil(spread / (3.49 * sd * cube_root)))
        skew_sd = np.sqrt(6.0 * (n - 2) / ((n + 1) * (n + 3)))
        skewness = float(stats.skew(values))
        rules['doane'] = int(np.ceil(1.0 + np.log2(n) + np.log2(1.0 + abs(skewness) / skew_sd)))
    if iqr > 0:
        rules['freedman_diaconis'] = int(np.ceil(spread / (2.0 * iqr * cube_root)))
    return rules


def consensus_bins(sample: Union[SampleSet, np.ndarray]) -> int:
    """
    Median of the six rule bin counts (lower middle for an even count), clamped to [2, 512].

    A constant sample falls back to ceil(sqrt(n)).

    Args:
        sample: Sample values, n >= 8

    Returns:
        Bin count

    Raises:
        ContractError: If the sample has fewer than 8 values
    """
    values = _as_values(sample)
    if values.size < MIN_SAMPLE:
        raise ContractError(f"consensus binning needs at least {MIN_SAMPLE} values, got {values.size}")

    if np.ptp(values) == 0:
        chosen = int(np.ceil(np.sqrt(values.size)))
    else:
        candidates = sorted(count for count in bin_rules(values).values() if count is not None)
        chosen = candidates[(len(candidates) - 1) // 2]
    return int(np.clip(chosen, MIN_BINS, MAX_BINS))


def build_histogram(
    sample: Union[SampleSet, np.ndarray],
    n_bins: Optional[int] = None,
    value_range: Optional[Tuple[float, float]] = None,
) -> HistogramSpec:
    """
    Histogram of a sample normalized to probabilities.

    Args:
        sample: Sample values
        n_bins: Bin count; consensus rule when omitted
        value_range: (lo, hi); the sample min/max when omitted

    Returns:
        HistogramSpec
    """
    values = _as_values(sample)
    if n_bins is None:
        n_bins = consensus_bins(values)
    if value_range is None:
        value_range = (float(values.min()), float(values.max()))
    counts, edges = np.histogram(values, bins=n_bins, range=value_range)
    return HistogramSpec(counts / counts.sum(), (edges[0], edges[-1]))


def common_histograms(
    a: Union[SampleSet, np.ndarray], b: Union[SampleSet, np.ndarray]
) -> Tuple[HistogramSpec, HistogramSpec]:
    """
    Aligned histograms of two samples on the pooled range with the pooled consensus bin count.

    Args:
        a: First sample
        b: Second sample

    Returns:
        Tuple of (histogram of a, histogram of b)
    """
    pooled = np.concatenate([_as_values(a), _as_values(b)])
    n_bins = consensus_bins(pooled)
    value_range = (float(pooled.min()), float(pooled.max()))
    logger.debug(f"common binning: {n_bins} bins over {value_range}")
    return build_histogram(a, n_bins, value_range), build_histogram(b, n_bins, value_range)
