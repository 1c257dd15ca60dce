"""Two-sample nonparametric tests, Cliff's delta and descriptive statistics."""

from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy import special, stats

from ..utils.errors import ContractError, UndefinedValueError
from .sampling import SampleSet

# Romano et al. thresholds on |delta|
NEGLIGIBLE_DELTA = 0.147
SMALL_DELTA = 0.33
MEDIUM_DELTA = 0.474

Magnitude = Literal['negligible', 'small', 'medium', 'large']


class TestResult(BaseModel):
    """Statistic and p-value of one hypothesis test."""

    __test__ = False

    statistic: float
    p_value: float = Field(ge=0.0, le=1.0)
    test_name: Literal['ks', 'mann_whitney', 'kruskal_wallis']


class DescriptiveStats(BaseModel):
    """Moments and quantiles of one sample."""

    n: int
    mean: float
    sd: float
    median: float
    skewness: float
    kurtosis: float
    iqr: float


class EffectSize(BaseModel):
    """Cliff's delta with its conventional magnitude label."""

    delta: float = Field(ge=-1.0, le=1.0)
    magnitude: Magnitude


def _values(sample: Union[SampleSet, np.ndarray]) -> np.ndarray:
    values = sample.values if isinstance(sample, SampleSet) else np.asarray(sample, dtype=float)
    if values.size == 0:
        raise ContractError("empty sample")
    return values


def ks_test(a: Union[SampleSet, np.ndarray], b: Union[SampleSet, np.ndarray]) -> TestResult:
    """
    Two-sample Kolmogorov-Smirnov test.

    D is the largest gap between the empirical CDFs, evaluated at every pooled
    value; the p-value is the asymptotic Kolmogorov tail at sqrt(n m / (n + m)) D.

    Args:
        a: First sample
        b: Second sample

    Returns:
        TestResult
    """
    x, y = np.sort(_values(a)), np.sort(_values(b))
    pooled = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, pooled, side='right') / x.size
    cdf_y = np.searchsorted(y, pooled, side='right') / y.size
    statistic = float(np.max(np.abs(cdf_x - cdf_y)))
    effective = x.size * y.size / (x.size + y.size)
    p_value = float(np.clip(special.kolmogorov(np.sqrt(effective) * statistic), 0.0, 1.0))
    return TestResult(statistic=statistic, p_value=p_value, test_name='ks')


def _all_tied(x: np.ndarray, y: np.ndarray) -> bool:
    pooled = np.concatenate([x, y])
    return bool(np.all(pooled == pooled[0]))


def mann_whitney(a: Union[SampleSet, np.ndarray], b: Union[SampleSet, np.ndarray]) -> TestResult:
    """Two-sided Mann-Whitney U (U of the first sample) with the tie-corrected normal approximation."""
    x, y = _values(a), _values(b)
    if _all_tied(x, y):
        return TestResult(statistic=x.size * y.size / 2.0, p_value=1.0, test_name='mann_whitney')
    result = stats.mannwhitneyu(x, y, alternative='two-sided', method='asymptotic')
    return TestResult(
        statistic=float(result.statistic), p_value=float(np.clip(result.pvalue, 0.0, 1.0)), test_name='mann_whitney'
    )


def kruskal_wallis(a: Union[SampleSet, np.ndarray], b: Union[SampleSet, np.ndarray]) -> TestResult:
    """Two-group Kruskal-Wallis H with midrank ties and the chi-square (1 dof) p-value."""
    x, y = _values(a), _values(b)
    if _all_tied(x, y):
        return TestResult(statistic=0.0, p_value=1.0, test_name='kruskal_wallis')
    result = stats.kruskal(x, y)
    return TestResult(
        statistic=float(result.statistic), p_value=float(np.clip(result.pvalue, 0.0, 1.0)), test_name='kruskal_wallis'
    )


def cliffs_delta(a: Union[SampleSet, np.ndarray], b: Union[SampleSet, np.ndarray]) -> float:
    """
    Cliff's delta (#{x > y} - #{x < y}) / (n m) by binary search over the sorted second sample.

    Args:
        a: First sample
        b: Second sample

    Returns:
        Delta in [-1, 1]; ties contribute zero
    """
    x, y = _values(a), np.sort(_values(b))
    greater = int(np.sum(np.searchsorted(y, x, side='left')))
    less = int(np.sum(y.size - np.searchsorted(y, x, side='right')))
    return (greater - less) / (x.size * y.size)


def delta_magnitude(delta: float) -> Magnitude:
    """Label |delta|: negligible < 0.147 <= small < 0.33 <= medium < 0.474 <= large."""
    size = abs(delta)
    if size < NEGLIGIBLE_DELTA:
        return 'negligible'
    if size < SMALL_DELTA:
        return 'small'
    if size < MEDIUM_DELTA:
        return 'medium'
    return 'large'


def effect_size(a: Union[SampleSet, np.ndarray], b: Union[SampleSet, np.ndarray]) -> EffectSize:
    """Cliff's delta and its magnitude label."""
    delta = cliffs_delta(a, b)
    return EffectSize(delta=delta, magnitude=delta_magnitude(delta))


def descriptive(sample: Union[SampleSet, np.ndarray]) -> DescriptiveStats:
    """
    Mean, sample sd (n - 1), median, adjusted skewness, excess kurtosis and IQR.

    Raises:
        UndefinedValueError: If the sample has fewer than 4 values
    """
    values = _values(sample)
    if values.size < 4:
        raise UndefinedValueError(f"kurtosis needs at least 4 values, got {values.size}")
    return DescriptiveStats(
        n=values.size,
        mean=float(np.mean(values)),
        sd=float(np.std(values, ddof=1)),
        median=float(np.median(values)),
        skewness=float(stats.skew(values, bias=False)),
        kurtosis=float(stats.kurtosis(values, fisher=True, bias=False)),
        iqr=float(stats.iqr(values)),
    )
