"""Shannon entropy and Kullback-Leibler / Jensen-Shannon divergences in bits."""

import numpy as np
from scipy import stats

from ..utils.errors import ContractError
from .binning import HistogramSpec

KL_EPSILON = 1e-12


def shannon_entropy(hist: HistogramSpec) -> float:
    """-sum p log2 p over occupied bins."""
    return float(stats.entropy(hist.probabilities, base=2))


def _require_aligned(p: HistogramSpec, q: HistogramSpec) -> None:
    if not p.aligned_with(q):
        raise ContractError(
            f"histograms are not aligned: {p.n_bins} bins over {p.range} vs {q.n_bins} bins over {q.range}"
        )


def _regularize(probabilities: np.ndarray) -> np.ndarray:
    shifted = probabilities + KL_EPSILON
    return shifted / shifted.sum()


def kl_divergence(p: HistogramSpec, q: HistogramSpec) -> float:
    """
    D_KL(p || q) in bits, with eps = 1e-12 added to every bin of both and renormalized.

    Raises:
        ContractError: If the histograms do not share binning
    """
    _require_aligned(p, q)
    return float(stats.entropy(_regularize(p.probabilities), _regularize(q.probabilities), base=2))


def js_divergence(p: HistogramSpec, q: HistogramSpec) -> float:
    """
    Jensen-Shannon divergence 1/2 D_KL(p || m) + 1/2 D_KL(q || m), m = (p + q)/2, in [0, 1] bits.

    Raises:
        ContractError: If the histograms do not share binning
    """
    _require_aligned(p, q)
    middle = 0.5 * (p.probabilities + q.probabilities)
    value = 0.5 * stats.entropy(p.probabilities, middle, base=2) + 0.5 * stats.entropy(q.probabilities, middle, base=2)
    return float(np.clip(value, 0.0, 1.0))
