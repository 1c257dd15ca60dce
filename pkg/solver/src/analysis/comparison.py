"""Single-run analysis and two-run statistical comparison reports."""

import logging
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from ..physics.observables import ConservationSummary, RegionPartition, conservation_summary, key_frames
from ..physics.propagator import DEFAULT_SEED, Trajectory
from ..utils.errors import ConfigurationError
from .binning import build_histogram, common_histograms
from .hypothesis import (
    DescriptiveStats,
    EffectSize,
    TestResult,
    descriptive,
    effect_size,
    kruskal_wallis,
    ks_test,
    mann_whitney,
)
from .information import js_divergence, kl_divergence, shannon_entropy
from .phase_space import DEFAULT_GRID_BINS, PhaseSpaceReport, phase_space_report
from .sampling import PhasePointSet, SampleSet, stratified_phase_points, stratified_sample

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 100_000
DEFAULT_DENSITY_FLOOR = 1e-9


class AnalysisOptions(BaseModel):
    """
    Sampling and lattice settings shared by analyze and compare.

    Density samples are drawn from the populated part of each frame: interior
    points outside the absorber layers whose density exceeds density_floor
    (None keeps every grid point). Frames contribute in proportion to their
    populated points, or equally with allocation='equal'. Phase-space measures
    use phase_points draws from the same population, or all of it when None.
    """

    n_samples: int = Field(default=DEFAULT_SAMPLES, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    grid_bins: int = Field(default=DEFAULT_GRID_BINS, ge=4)
    allocation: Literal['equal', 'proportional'] = 'proportional'
    density_floor: Optional[float] = Field(default=DEFAULT_DENSITY_FLOOR, ge=0)
    phase_points: Optional[int] = Field(default=None, ge=3)


class Difference(BaseModel):
    """b - a and the relative change in percent of a (None when a is 0)."""

    quantity: str
    value_a: float
    value_b: float
    absolute: float
    relative_percent: Optional[float] = None


class RunAnalysis(BaseModel):
    """Distribution and phase-space statistics of one trajectory."""

    run_id: Optional[str] = None
    options: AnalysisOptions
    n_samples: int
    descriptive: DescriptiveStats
    entropy: float
    n_bins: int
    phase_space: PhaseSpaceReport
    conservation: ConservationSummary
    key_frames: Optional[Dict[str, Dict]] = None


class ComparisonReport(BaseModel):
    """Statistical comparison of two runs' density distributions and phase-space clouds."""

    run_a: Optional[str] = None
    run_b: Optional[str] = None
    options: AnalysisOptions
    descriptive_a: DescriptiveStats
    descriptive_b: DescriptiveStats
    entropy_a: float
    entropy_b: float
    common_bins: int
    kl_ab: float
    kl_ba: float
    js: float
    tests: List[TestResult]
    effect_size: EffectSize
    phase_space_a: PhaseSpaceReport
    phase_space_b: PhaseSpaceReport
    differences: List[Difference]


def _check_sample_count(trajectory: Trajectory, options: AnalysisOptions) -> None:
    if options.n_samples < len(trajectory.frames):
        raise ConfigurationError(
            f"{options.n_samples} samples cannot cover {len(trajectory.frames)} stored frames", key='samples'
        )


def _draws(
    trajectory: Trajectory, options: AnalysisOptions, edge: float, run_id: Optional[str]
) -> Tuple[SampleSet, PhasePointSet]:
    _check_sample_count(trajectory, options)
    population = dict(
        seed=options.seed,
        run_id=run_id,
        allocation=options.allocation,
        density_floor=options.density_floor,
        edge=edge if options.density_floor is not None else 0.0,
    )
    sample = stratified_sample(trajectory, options.n_samples, **population)
    points = stratified_phase_points(trajectory, options.phase_points, **population)
    return sample, points


def analyze_run(
    trajectory: Trajectory,
    options: Optional[AnalysisOptions] = None,
    partition: Optional[RegionPartition] = None,
    run_id: Optional[str] = None,
    edge: Optional[float] = None,
) -> RunAnalysis:
    """
    Sample one trajectory and compute its descriptive, entropy and phase-space statistics.

    Args:
        trajectory: Source trajectory
        options: Sampling settings
        partition: Region partition, enables key-frame detection
        run_id: Label carried into the report
        edge: Boundary width left out of the sampled population, default the partition's absorber width

    Returns:
        RunAnalysis

    Raises:
        ConfigurationError: If fewer samples than stored frames are requested
    """
    options = options or AnalysisOptions()
    if edge is None:
        edge = partition.absorber_width if partition is not None else 0.0
    sample, points = _draws(trajectory, options, edge, run_id)
    histogram = build_histogram(sample)
    logger.info(f"analyzed {run_id or 'run'}: {sample.size} samples, {histogram.n_bins} bins")

    frames = None
    if partition is not None:
        frames = key_frames(trajectory.frames, trajectory.grid, partition)

    return RunAnalysis(
        run_id=run_id,
        options=options,
        n_samples=sample.size,
        descriptive=descriptive(sample),
        entropy=shannon_entropy(histogram),
        n_bins=histogram.n_bins,
        phase_space=phase_space_report(points, options.grid_bins),
        conservation=conservation_summary(trajectory.scalars, trajectory.absorbed_history),
        key_frames=frames,
    )


def _difference(quantity: str, a: float, b: float) -> Difference:
    relative = (b - a) / abs(a) * 100.0 if a != 0 else None
    return Difference(quantity=quantity, value_a=a, value_b=b, absolute=b - a, relative_percent=relative)


def compare_runs(
    trajectory_a: Trajectory,
    trajectory_b: Trajectory,
    options: Optional[AnalysisOptions] = None,
    run_a: Optional[str] = None,
    run_b: Optional[str] = None,
    edge_a: float = 0.0,
    edge_b: float = 0.0,
) -> ComparisonReport:
    """
    Full comparison pipeline on two trajectories.

    Both runs are sampled with the same seed. Each entropy uses the sample's own
    consensus binning; divergences use the pooled range and pooled bin count.

    Args:
        trajectory_a: First trajectory
        trajectory_b: Second trajectory
        options: Sampling settings
        run_a: Label of the first run
        run_b: Label of the second run
        edge_a: Boundary width left out of the first run's population
        edge_b: Boundary width left out of the second run's population

    Returns:
        ComparisonReport

    Raises:
        ConfigurationError: If fewer samples than stored frames are requested
    """
    options = options or AnalysisOptions()
    sample_a, points_a = _draws(trajectory_a, options, edge_a, run_a)
    sample_b, points_b = _draws(trajectory_b, options, edge_b, run_b)

    stats_a, stats_b = descriptive(sample_a), descriptive(sample_b)
    entropy_a = shannon_entropy(build_histogram(sample_a))
    entropy_b = shannon_entropy(build_histogram(sample_b))
    p, q = common_histograms(sample_a, sample_b)
    phase_a = phase_space_report(points_a, options.grid_bins)
    phase_b = phase_space_report(points_b, options.grid_bins)

    differences = [
        _difference('mean', stats_a.mean, stats_b.mean),
        _difference('sd', stats_a.sd, stats_b.sd),
        _difference('median', stats_a.median, stats_b.median),
        _difference('skewness', stats_a.skewness, stats_b.skewness),
        _difference('kurtosis', stats_a.kurtosis, stats_b.kurtosis),
        _difference('entropy', entropy_a, entropy_b),
        _difference('hull_area', phase_a.hull_area, phase_b.hull_area),
    ]

    report = ComparisonReport(
        run_a=run_a,
        run_b=run_b,
        options=options,
        descriptive_a=stats_a,
        descriptive_b=stats_b,
        entropy_a=entropy_a,
        entropy_b=entropy_b,
        common_bins=p.n_bins,
        kl_ab=kl_divergence(p, q),
        kl_ba=kl_divergence(q, p),
        js=js_divergence(p, q),
        tests=[ks_test(sample_a, sample_b), mann_whitney(sample_a, sample_b), kruskal_wallis(sample_a, sample_b)],
        effect_size=effect_size(sample_a, sample_b),
        phase_space_a=phase_a,
        phase_space_b=phase_b,
        differences=differences,
    )
    logger.info(f"compared runs: JS {report.js:.4g} bits, delta {report.effect_size.delta:.4g}")
    return report


def summary_lines(report: ComparisonReport) -> List[str]:
    """Human-readable headline figures of a comparison."""
    lines = [
        f"entropy      a={report.entropy_a:.4f}  b={report.entropy_b:.4f} bits",
        f"KL(a||b)={report.kl_ab:.4f}  KL(b||a)={report.kl_ba:.4f}  JS={report.js:.4f} bits",
    ]
    for test in report.tests:
        lines.append(f"{test.test_name:<15} statistic={test.statistic:.6g}  p={test.p_value:.3g}")
    lines.append(f"cliffs delta {report.effect_size.delta:+.4f} ({report.effect_size.magnitude})")
    return lines