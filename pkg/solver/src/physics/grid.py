"""Uniform spatial grid, its conjugate wavenumber grid, and the natural-unit convention.

Lengths are labelled nm, energies eV and times fs, but hbar = 1 and the mass
defaults to 1, so the labels name one consistent natural-unit system. No
physical unit conversion is performed anywhere in the solver.
"""

from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.errors import ConfigurationError

HBAR = 1.0
MIN_POINTS = 8


class UnitSystem:
    """Natural units: hbar = 1, configurable particle mass, fixed labels."""

    LABELS: Dict[str, str] = {'length': 'nm', 'energy': 'eV', 'time': 'fs', 'wavenumber': 'nm^-1'}

    def __init__(self, mass: float = 1.0):
        """
        Initialize unit system.

        Args:
            mass: Particle mass in units where hbar = m_e = 1
        """
        if not mass > 0:
            raise ConfigurationError("mass must be positive", key='units.mass')
        self.mass = float(mass)
        self.hbar = HBAR

    def to_dict(self) -> Dict:
        """Convert unit system to dictionary."""
        return {'hbar': self.hbar, 'mass': self.mass, 'labels': dict(self.LABELS)}


class GridSpec(BaseModel):
    """Config section describing the spatial grid."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    x_min: float
    x_max: float
    n_points: int = Field(ge=MIN_POINTS)

    @field_validator('n_points')
    @classmethod
    def _check_size(cls, value: int) -> int:
        if not _is_power_of_two(value):
            raise ValueError(f"{value} is not a power of two")
        return value

    @model_validator(mode='after')
    def _check_domain(self) -> 'GridSpec':
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        return self

    def build(self) -> 'SpatialGrid':
        """Build the grid this spec describes."""
        return make_grid(self.x_min, self.x_max, self.n_points)


class SpatialGrid:
    """Uniform periodic grid; the right endpoint x_max is excluded."""

    def __init__(self, x_min: float, x_max: float, n_points: int):
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.n_points = int(n_points)
        self.dx = (self.x_max - self.x_min) / self.n_points
        positions = self.x_min + np.arange(self.n_points) * self.dx
        positions.setflags(write=False)
        self.positions = positions

    @property
    def length(self) -> float:
        """Domain length x_max - x_min."""
        return self.x_max - self.x_min

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpatialGrid):
            return NotImplemented
        return (self.x_min, self.x_max, self.n_points) == (other.x_min, other.x_max, other.n_points)

    def __hash__(self) -> int:
        return hash((self.x_min, self.x_max, self.n_points))

    def __repr__(self) -> str:
        return f"SpatialGrid(x_min={self.x_min}, x_max={self.x_max}, n_points={self.n_points})"


class WavenumberGrid:
    """Wavenumbers in discrete-transform order: 0, 1, ..., N/2-1, -N/2, ..., -1 times 2pi/(N dx)."""

    def __init__(self, k_values: np.ndarray):
        k_values.setflags(write=False)
        self.k_values = k_values

    @property
    def nyquist(self) -> float:
        """Largest |k| on the grid."""
        return float(np.max(np.abs(self.k_values)))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def make_grid(x_min: float, x_max: float, n_points: int) -> SpatialGrid:
    """
    Build a uniform grid with dx = (x_max - x_min) / n_points.

    Args:
        x_min: Left domain edge (included)
        x_max: Right domain edge (excluded)
        n_points: Number of grid points, a power of two >= 8

    Returns:
        SpatialGrid

    Raises:
        ConfigurationError: If the domain is degenerate or n_points is invalid
    """
    if not np.isfinite(x_min) or not np.isfinite(x_max) or not x_max > x_min:
        raise ConfigurationError(f"degenerate domain [{x_min}, {x_max}]", key='grid.x_max')
    if int(n_points) != n_points or not _is_power_of_two(int(n_points)):
        raise ConfigurationError(f"{n_points} is not a power of two", key='grid.n_points')
    if n_points < MIN_POINTS:
        raise ConfigurationError(f"need at least {MIN_POINTS} points, got {n_points}", key='grid.n_points')
    return SpatialGrid(x_min, x_max, int(n_points))


def wavenumbers(grid: SpatialGrid) -> WavenumberGrid:
    """
    Conjugate wavenumber grid of a spatial grid.

    Args:
        grid: Spatial grid

    Returns:
        WavenumberGrid with k_j = 2*pi*f(j)/(n_points*dx)
    """
    k_values = 2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.dx)
    return WavenumberGrid(k_values)
