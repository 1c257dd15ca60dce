"""Tests for stratified sampling and consensus binning."""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis.binning import HistogramSpec, bin_rules, build_histogram, common_histograms, consensus_bins
from src.analysis.sampling import (
    PhasePointSet,
    SampleSet,
    allocate_quotas,
    draw_from_strata,
    populated_indices,
    stratified_indices,
    stratified_phase_points,
    stratified_sample,
)
from src.physics.propagator import Trajectory
from src.utils.errors import ContractError


def synthetic_trajectory(n_frames: int = 5, n_points: int = 64) -> Trajectory:
    """Frames whose amplitudes encode (frame, index) so draws can be traced back."""
    frames = []
    for frame in range(n_frames):
        amplitudes = (frame + 1) + 1j * np.arange(n_points)
        frames.append((0.1 * frame, amplitudes.astype(np.complex128)))
    scalars = np.zeros((n_frames, 5))
    scalars[:, 1] = 1.0
    return Trajectory(frames, scalars, -1.0, 2.0 / n_points, n_points)


class TestStratifiedIndices:
    """Test cases for stratified_indices."""

    def test_equal_quota(self):
        """200 frames and 100000 samples give 500 per frame."""
        indices = stratified_indices(200, 2048, 100_000, seed=1)
        assert [chunk.size for chunk in indices] == [500] * 200

    def test_remainder_goes_to_earliest_frames(self):
        """Three frames sharing ten samples get 4, 3, 3."""
        indices = stratified_indices(3, 20, 10, seed=1)
        assert [chunk.size for chunk in indices] == [4, 3, 3]

    def test_sorted_without_replacement(self):
        """Indices within a frame are distinct and sorted."""
        for chunk in stratified_indices(4, 50, 120, seed=5):
            assert np.all(np.diff(chunk) > 0)
            assert chunk.min() >= 0 and chunk.max() < 50

    def test_exhaustive_stratum(self):
        """Asking for every point returns every index."""
        for chunk in stratified_indices(3, 16, 48, seed=2):
            np.testing.assert_array_equal(chunk, np.arange(16))

    def test_clamping(self):
        """More samples than points are clamped to the available count."""
        indices = stratified_indices(2, 10, 1000, seed=2)
        assert sum(chunk.size for chunk in indices) == 20

    def test_deterministic(self):
        """Equal seeds draw equal indices."""
        first = stratified_indices(10, 256, 1000, seed=9)
        second = stratified_indices(10, 256, 1000, seed=9)
        other = stratified_indices(10, 256, 1000, seed=10)
        assert all(np.array_equal(a, b) for a, b in zip(first, second))
        assert not all(np.array_equal(a, b) for a, b in zip(first, other))

    def test_no_frames(self):
        """An empty trajectory cannot be sampled."""
        with pytest.raises(ContractError):
            stratified_indices(0, 10, 10)

    def test_fewer_samples_than_frames(self):
        """Every frame needs at least one sample."""
        with pytest.raises(ContractError):
            stratified_indices(10, 10, 5)


class TestAllocation:
    """Test cases for allocate_quotas and draw_from_strata."""

    def test_equal_shares_shortfall(self):
        """A stratum smaller than its share gives everything; the rest is shared."""
        counts = allocate_quotas([2, 50, 50], 30, 'equal')
        assert counts.tolist() == [2, 14, 14]

    def test_equal_skips_empty_strata(self):
        """Empty strata take nothing."""
        assert allocate_quotas([0, 10, 10], 7, 'equal').tolist() == [0, 4, 3]

    def test_proportional(self):
        """Counts follow the stratum sizes, remainder to the earliest with room."""
        counts = allocate_quotas([10, 30, 60], 11, 'proportional')
        assert counts.tolist() == [2, 3, 6]
        assert allocate_quotas([100, 300, 600], 100, 'proportional').tolist() == [10, 30, 60]

    def test_never_exceeds_capacity(self):
        """Both schemes place exactly n draws within every stratum's size."""
        rng = np.random.default_rng(4)
        for _ in range(200):
            capacities = rng.integers(0, 40, size=rng.integers(1, 12))
            if capacities.sum() == 0:
                continue
            n_total = int(rng.integers(0, capacities.sum() + 1))
            for allocation in ('equal', 'proportional'):
                counts = allocate_quotas(capacities, n_total, allocation)
                assert counts.sum() == n_total
                assert np.all(counts <= capacities) and np.all(counts >= 0)

    def test_unknown_allocation(self):
        """Only equal and proportional exist."""
        with pytest.raises(ContractError):
            allocate_quotas([5, 5], 4, 'random')

    def test_draws_stay_in_candidates(self):
        """Drawn indices come from each stratum's candidate list."""
        candidates = [np.array([3, 7, 9]), np.arange(20, 40), np.empty(0, dtype=np.int64)]
        drawn = draw_from_strata(candidates, 12, seed=1, allocation='proportional')
        assert [chunk.size for chunk in drawn] == [2, 10, 0]
        for chunk, allowed in zip(drawn, candidates):
            assert set(chunk.tolist()) <= set(allowed.tolist())

    def test_nothing_to_draw(self):
        """Strata without candidates cannot be sampled."""
        with pytest.raises(ContractError):
            draw_from_strata([np.empty(0, dtype=np.int64)] * 3, 5)


class TestPopulatedIndices:
    """Test cases for populated_indices."""

    def setup_method(self):
        """Set up test fixtures."""
        n_points = 64
        grid_x = -1.0 + (2.0 / n_points) * np.arange(n_points)
        quiet = np.where((grid_x >= -0.25) & (grid_x < 0.25), 1.0, 1e-6).astype(np.complex128)
        scalars = np.zeros((2, 5))
        scalars[:, 1] = 1.0
        self.trajectory = Trajectory([(0.0, quiet), (0.1, np.ones(n_points, dtype=np.complex128))], scalars, -1.0, 2.0 / n_points, n_points)

    def test_no_conditions(self):
        """Without a floor or an edge every point qualifies."""
        for chunk in populated_indices(self.trajectory):
            np.testing.assert_array_equal(chunk, np.arange(64))

    def test_density_floor(self):
        """Points at or below the floor are left out."""
        quiet, full = populated_indices(self.trajectory, density_floor=1e-9)
        assert quiet.size == 16
        assert full.size == 64

    def test_edge(self):
        """The layers at both ends are left out."""
        _, full = populated_indices(self.trajectory, density_floor=1e-9, edge=0.5)
        assert full.size == 32
        assert full.min() == 16 and full.max() == 47

    def test_proportional_sample_skips_empty_points(self):
        """Proportional draws put no sample below the floor."""
        sample = stratified_sample(self.trajectory, 40, seed=2, allocation='proportional', density_floor=1e-9)
        assert sample.size == 40
        assert np.all(sample.values == 1.0)
        assert 'proportional' in sample.provenance['strata']

    def test_every_populated_phase_point(self):
        """No size means every qualifying point."""
        points = stratified_phase_points(self.trajectory, None, density_floor=1e-9, edge=0.5)
        assert len(points) == 16 + 32


class TestStratifiedSample:
    """Test cases for sampling trajectories."""

    def setup_method(self):
        """Set up test fixtures."""
        self.trajectory = synthetic_trajectory()

    def test_density_values(self):
        """Values are |psi|^2 of the drawn points, frame by frame."""
        sample = stratified_sample(self.trajectory, 50, seed=3, run_id='synthetic')
        indices = stratified_indices(5, 64, 50, seed=3)
        expected = np.concatenate([(frame + 1) ** 2 + chunk.astype(float) ** 2 for frame, chunk in enumerate(indices)])
        np.testing.assert_allclose(sample.values, expected)
        assert sample.provenance['run_id'] == 'synthetic'
        assert sample.provenance['seed'] == 3

    def test_phase_points_share_the_draw(self):
        """Amplitude draws use the same indices as density draws."""
        sample = stratified_sample(self.trajectory, 50, seed=3)
        points = stratified_phase_points(self.trajectory, 50, seed=3)
        np.testing.assert_allclose(np.abs(points.amplitudes) ** 2, sample.values)
        assert points.points.shape == (50, 2)

    def test_negative_values_rejected(self):
        """Density samples are nonnegative."""
        with pytest.raises(ContractError):
            SampleSet(np.array([0.1, -0.2]))

    def test_point_construction(self):
        """(re, im) pairs map to complex amplitudes."""
        points = PhasePointSet.from_points(np.array([[1.0, 2.0], [-1.0, 0.5]]))
        np.testing.assert_array_equal(points.amplitudes, [1 + 2j, -1 + 0.5j])
        assert len(points) == 2


class TestBinning:
    """Test cases for the bin rules and histograms."""

    def test_rules_on_large_normal_sample(self):
        """Sturges, Rice and square-root counts at n = 1e5; consensus is the lower median."""
        values = np.random.default_rng(0).standard_normal(100_000)
        rules = bin_rules(values)
        assert rules['sturges'] == 18
        assert rules['rice'] == 93
        assert rules['sqrt'] == 317
        assert all(count is not None for count in rules.values())
        assert consensus_bins(values) == 93

    def test_small_sample(self):
        """n = 8 gives Sturges 4."""
        values = np.arange(8, dtype=float)
        assert bin_rules(values)['sturges'] == 4
        assert 2 <= consensus_bins(values) <= 512

    def test_constant_sample(self):
        """Zero spread falls back to ceil(sqrt(n))."""
        values = np.full(50, 0.25)
        rules = bin_rules(values)
        assert rules['scott'] is None and rules['freedman_diaconis'] is None and rules['doane'] is None
        assert consensus_bins(values) == 8

    def test_too_small_for_consensus(self):
        """Fewer than 8 values is a contract violation."""
        with pytest.raises(ContractError):
            consensus_bins(np.arange(7, dtype=float))

    def test_histogram_normalized(self):
        """Bin probabilities sum to one over the sample range."""
        values = np.random.default_rng(1).exponential(size=1000)
        hist = build_histogram(values, n_bins=20)
        assert hist.n_bins == 20
        assert hist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert hist.range == (values.min(), values.max())

    def test_common_histograms_aligned(self):
        """Two samples share the pooled range and bin count."""
        rng = np.random.default_rng(2)
        first, second = common_histograms(rng.normal(0.0, 1.0, 500), rng.normal(1.0, 1.0, 700))
        assert first.aligned_with(second)

    def test_spec_contract(self):
        """A single bin or unnormalized probabilities are rejected."""
        with pytest.raises(ContractError):
            HistogramSpec(np.array([1.0]), (0.0, 1.0))
        with pytest.raises(ContractError):
            HistogramSpec(np.array([0.5, 0.6]), (0.0, 1.0))
