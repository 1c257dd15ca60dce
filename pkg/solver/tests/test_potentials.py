"""Tests for potential profiles and grid sampling."""

import pytest
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.physics.grid import make_grid
from src.physics.potentials import (
    FreePotential,
    GaussianBarrier,
    ModulatedPotential,
    RectangularBarrier,
    SumPotential,
    TabulatedPotential,
    eval_gaussian,
    eval_rectangular,
    sample_potential,
)
from src.utils.errors import ConfigurationError


class TestProfiles:
    """Test cases for the closed-form profiles."""

    def test_rectangular_inside(self):
        """Inside the barrier the height is v0."""
        assert eval_rectangular(4.5, 1.0, 0.0, 0.0) == 4.5
        assert eval_rectangular(4.5, 1.0, 0.0, 0.49) == 4.5

    def test_rectangular_boundary_excluded(self):
        """|x - c| = a/2 is outside."""
        assert eval_rectangular(4.5, 1.0, 0.0, 0.5) == 0.0
        assert eval_rectangular(4.5, 1.0, 0.0, -0.5) == 0.0

    def test_rectangular_array(self):
        """Arrays evaluate elementwise."""
        values = eval_rectangular(2.0, 2.0, 1.0, np.array([-1.0, 0.5, 1.0, 2.5]))
        np.testing.assert_array_equal(values, [0.0, 2.0, 2.0, 0.0])

    def test_gaussian(self):
        """Peak at the center, exp(-1/2) one sigma away."""
        assert eval_gaussian(4.0, 0.8, 0.0, 0.0) == 4.0
        assert eval_gaussian(4.0, 0.8, 0.0, 0.8) == pytest.approx(4.0 * np.exp(-0.5), rel=1e-15)


class TestPotentialSpecs:
    """Test cases for the potential variants."""

    def test_rectangular_support(self):
        """Support is +-a/2 around the center."""
        barrier = RectangularBarrier(v0=4.5, width=1.0)
        assert barrier.support() == (-0.5, 0.5)
        assert barrier.peak_value() == 4.5
        assert not barrier.is_time_dependent

    def test_gaussian_support(self):
        """Support is +-4 sigma_v."""
        barrier = GaussianBarrier(v0=4.0, sigma_v=0.8, center=1.0)
        lo, hi = barrier.support()
        assert lo == pytest.approx(-2.2)
        assert hi == pytest.approx(4.2)
        assert barrier.peak_location() == pytest.approx(1.0)

    def test_negative_width_rejected(self):
        """Width must be positive."""
        with pytest.raises(ValidationError):
            RectangularBarrier(v0=1.0, width=-1.0)

    def test_sum(self):
        """A double barrier adds its members."""
        double = SumPotential(members=[
            RectangularBarrier(v0=1.0, width=1.0, center=-2.0),
            RectangularBarrier(v0=2.0, width=1.0, center=2.0),
        ])
        np.testing.assert_array_equal(double.evaluate(np.array([-2.0, 0.0, 2.0])), [1.0, 0.0, 2.0])
        assert double.support() == (-2.5, 2.5)
        assert double.peak_value() == 2.0
        assert 1.5 < double.peak_location() < 2.5

    def test_tabulated_interpolates(self):
        """Tabulated values are linearly interpolated."""
        table = TabulatedPotential(positions=[0.0, 1.0, 2.0], values=[0.0, 2.0, 0.0])
        assert table.evaluate(np.array([0.5]))[0] == pytest.approx(1.0)
        assert table.peak_location() == 1.0

    def test_tabulated_requires_increasing_positions(self):
        """Positions must increase."""
        with pytest.raises(ValidationError):
            TabulatedPotential(positions=[0.0, 0.0], values=[1.0, 1.0])

    def test_modulated(self):
        """Modulation scales the base profile in time."""
        base = RectangularBarrier(v0=2.0, width=1.0)
        drive = ModulatedPotential(base=base, amplitude=0.5, omega=np.pi, phase=0.0)
        assert drive.is_time_dependent
        assert drive.evaluate(np.array([0.0]), t=0.5)[0] == pytest.approx(3.0)
        assert drive.evaluate(np.array([0.0]), t=0.0)[0] == pytest.approx(2.0)
        assert drive.support() == base.support()

    def test_modulated_amplitude_bounded(self):
        """|amplitude| <= 1."""
        with pytest.raises(ValidationError):
            ModulatedPotential(base=FreePotential(), amplitude=1.5, omega=1.0)


class TestSamplePotential:
    """Test cases for sample_potential."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = make_grid(-30.0, 30.0, 2048)

    def test_rectangular_samples(self):
        """Samples match direct evaluation."""
        barrier = RectangularBarrier(v0=4.5, width=1.0)
        samples = sample_potential(barrier, self.grid)
        assert samples.shape == (2048,)
        assert samples.max() == 4.5
        assert np.count_nonzero(samples) == np.count_nonzero(np.abs(self.grid.positions) < 0.5)

    def test_free(self):
        """The free potential is zero everywhere."""
        assert not np.any(sample_potential(FreePotential(), self.grid))

    def test_time_argument(self):
        """Time-dependent specs use the given time."""
        drive = ModulatedPotential(base=GaussianBarrier(v0=1.0, sigma_v=1.0), amplitude=1.0, omega=1.0)
        at_zero = sample_potential(drive, self.grid, 0.0)
        later = sample_potential(drive, self.grid, np.pi / 2)
        np.testing.assert_allclose(later, 2.0 * at_zero)

    def test_uncovered_table(self):
        """A table that does not span the grid is a configuration error."""
        table = TabulatedPotential(positions=[-1.0, 1.0], values=[0.0, 0.0])
        with pytest.raises(ConfigurationError) as info:
            sample_potential(table, self.grid)
        assert info.value.key == 'potential.positions'

    def test_uncovered_table_inside_sum(self):
        """Coverage is checked for nested members."""
        table = TabulatedPotential(positions=[-1.0, 1.0], values=[0.0, 0.0])
        with pytest.raises(ConfigurationError):
            sample_potential(SumPotential(members=[FreePotential(), table]), self.grid)
