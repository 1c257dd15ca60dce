"""Statistics of sampled amplitudes as a point cloud in the (Re psi, Im psi) plane."""

from typing import List, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy import stats

from ..utils.errors import ContractError, UndefinedValueError
from .sampling import PhasePointSet

DEFAULT_GRID_BINS = 64
MIN_GRID_BINS = 4

PointsLike = Union[PhasePointSet, np.ndarray]


class PhaseSpaceReport(BaseModel):
    """Circular, covariance, information and geometric measures of one phase-point cloud."""

    n_points: int
    circular_variance: float
    resultant_length: float
    pci: float
    anisotropy: float
    lambda_1: float
    lambda_2: float
    entropy_2d: float
    mutual_information: float
    hull_area: float
    grid_bins: int


def _amplitudes(points: PointsLike) -> np.ndarray:
    if isinstance(points, PhasePointSet):
        return points.amplitudes
    points = np.asarray(points)
    if np.iscomplexobj(points):
        return points.ravel()
    return points[:, 0] + 1j * points[:, 1]


def resultant_length(points: PointsLike) -> float:
    """
    |mean of exp(i theta)| over nonzero amplitudes.

    Raises:
        UndefinedValueError: If every amplitude is zero
    """
    z = _amplitudes(points)
    z = z[z != 0]
    if z.size == 0:
        raise UndefinedValueError("phase angles undefined: every amplitude is zero")
    # unit phasors from the angle; dividing by |z| overflows for subnormal amplitudes
    return float(np.abs(np.mean(np.exp(1j * np.angle(z)))))


def circular_variance(points: PointsLike) -> float:
    """1 - resultant length; zero amplitudes are left out."""
    return 1.0 - resultant_length(points)


def phase_coherence_index(points: PointsLike) -> float:
    """
    |mean psi| / mean |psi|.

    Raises:
        UndefinedValueError: If every amplitude is zero
    """
    z = _amplitudes(points)
    scale = np.mean(np.abs(z))
    if not scale > 0:
        raise UndefinedValueError("phase coherence undefined for all-zero amplitudes")
    return float(np.abs(np.mean(z)) / scale)


def covariance_eigenvalues(points: PointsLike) -> Tuple[float, float]:
    """Eigenvalues lambda_1 >= lambda_2 >= 0 of the 2x2 (re, im) covariance, in closed form."""
    z = _amplitudes(points)
    if z.size < 2:
        raise ContractError("covariance needs at least two points")
    (a, b), (_, d) = np.cov(z.real, z.imag)
    half_trace = 0.5 * (a + d)
    radius = np.sqrt(0.25 * (a - d) ** 2 + b ** 2)
    return float(half_trace + radius), float(max(half_trace - radius, 0.0))


def anisotropy(points: PointsLike) -> float:
    """
    (lambda_1 - lambda_2) / (lambda_1 + lambda_2): 0 for isotropic clouds, 1 for collinear ones.

    Raises:
        UndefinedValueError: If the cloud has zero total variance
    """
    first, second = covariance_eigenvalues(points)
    total = first + second
    if not total > 0:
        raise UndefinedValueError("anisotropy undefined for zero total variance")
    return float((first - second) / total)


def _lattice(points: PointsLike, grid_bins: int) -> np.ndarray:
    if grid_bins < MIN_GRID_BINS:
        raise ContractError(f"grid_bins must be at least {MIN_GRID_BINS}, got {grid_bins}")
    z = _amplitudes(points)
    counts, _, _ = np.histogram2d(z.real, z.imag, bins=grid_bins)
    return counts / counts.sum()


def entropy_2d(points: PointsLike, grid_bins: int = DEFAULT_GRID_BINS) -> float:
    """Joint Shannon entropy in bits on a grid_bins x grid_bins lattice over the bounding box."""
    return float(stats.entropy(_lattice(points, grid_bins).ravel(), base=2))


def mutual_information(points: PointsLike, grid_bins: int = DEFAULT_GRID_BINS) -> float:
    """H(re) + H(im) - H(re, im) from the marginals of the same lattice."""
    joint = _lattice(points, grid_bins)
    marginal_re = stats.entropy(joint.sum(axis=1), base=2)
    marginal_im = stats.entropy(joint.sum(axis=0), base=2)
    return float(max(marginal_re + marginal_im - stats.entropy(joint.ravel(), base=2), 0.0))


def _cross(o: Tuple[float, float], a: Tuple[float, float], b: Tuple[float, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: PointsLike) -> List[Tuple[float, float]]:
    """
    Hull vertices in counter-clockwise order by Andrew's monotone chain.

    Collinear points on hull edges are dropped.
    """
    z = _amplitudes(points)
    ordered = sorted(set(zip(z.real.tolist(), z.imag.tolist())))
    if len(ordered) <= 2:
        return ordered

    lower: List[Tuple[float, float]] = []
    for point in ordered:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], point) <= 0:
            lower.pop()
        lower.append(point)
    upper: List[Tuple[float, float]] = []
    for point in reversed(ordered):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], point) <= 0:
            upper.pop()
        upper.append(point)
    return lower[:-1] + upper[:-1]


def convex_hull_area(points: PointsLike) -> float:
    """
    Shoelace area of the convex hull; 0 for collinear input.

    Raises:
        ContractError: If fewer than 3 points are given
    """
    if _amplitudes(points).size < 3:
        raise ContractError("convex hull area needs at least 3 points")
    hull = convex_hull(points)
    if len(hull) < 3:
        return 0.0
    xs = np.array([p[0] for p in hull])
    ys = np.array([p[1] for p in hull])
    return float(0.5 * abs(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1))))


def phase_space_report(points: PointsLike, grid_bins: int = DEFAULT_GRID_BINS) -> PhaseSpaceReport:
    """All phase-space measures of one cloud."""
    first, second = covariance_eigenvalues(points)
    length = resultant_length(points)
    return PhaseSpaceReport(
        n_points=_amplitudes(points).size,
        circular_variance=1.0 - length,
        resultant_length=length,
        pci=phase_coherence_index(points),
        anisotropy=anisotropy(points),
        lambda_1=first,
        lambda_2=second,
        entropy_2d=entropy_2d(points, grid_bins),
        mutual_information=mutual_information(points, grid_bins),
        hull_area=convex_hull_area(points),
        grid_bins=grid_bins,
    )
