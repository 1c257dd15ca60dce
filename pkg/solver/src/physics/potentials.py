"""Analytic potential profiles, their composition, and sampling onto the grid."""

from typing import Annotated, ClassVar, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.errors import ConfigurationError
from .grid import SpatialGrid


def eval_rectangular(v0: float, width: float, center: float, x):
    """
    Rectangular barrier: v0 where |x - center| < width/2, 0 elsewhere (boundary points excluded).

    Args:
        v0: Barrier height
        width: Barrier width, > 0
        center: Barrier center
        x: Position or array of positions

    Returns:
        Potential energy at x
    """
    x = np.asarray(x, dtype=float)
    values = np.where(np.abs(x - center) < width / 2.0, float(v0), 0.0)
    return values if values.ndim else float(values)


def eval_gaussian(v0: float, sigma_v: float, center: float, x):
    """
    Gaussian barrier v0 * exp(-(x - center)^2 / (2 sigma_v^2)).

    Args:
        v0: Barrier height
        sigma_v: Barrier width parameter, > 0
        center: Barrier center
        x: Position or array of positions

    Returns:
        Potential energy at x
    """
    x = np.asarray(x, dtype=float)
    values = v0 * np.exp(-((x - center) ** 2) / (2.0 * sigma_v ** 2))
    return values if values.ndim else float(values)


class PotentialBase(BaseModel):
    """Common interface of every potential variant."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    @property
    def is_time_dependent(self) -> bool:
        return False

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def support(self) -> Tuple[float, float]:
        """Barrier extent (x_b-, x_b+) used for the default region partition."""
        raise NotImplementedError

    def peak_location(self) -> float:
        """Position of the maximum of the static profile."""
        return 0.5 * sum(self.support())

    def peak_value(self) -> float:
        """Maximum of the static profile."""
        return float(self.evaluate(np.array([self.peak_location()]))[0])


class RectangularBarrier(PotentialBase):
    """Flat barrier of height v0 and width a."""

    kind: Literal['rectangular'] = 'rectangular'
    v0: float = Field(ge=0)
    width: float = Field(gt=0)
    center: float = 0.0

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        return eval_rectangular(self.v0, self.width, self.center, x)

    def support(self) -> Tuple[float, float]:
        return (self.center - self.width / 2.0, self.center + self.width / 2.0)

    def peak_value(self) -> float:
        return self.v0


class GaussianBarrier(PotentialBase):
    """Smooth barrier v0 exp(-(x-c)^2 / 2 sigma_v^2). Its support is taken as +-4 sigma_v."""

    SUPPORT_SIGMAS: ClassVar[float] = 4.0

    kind: Literal['gaussian'] = 'gaussian'
    v0: float = Field(ge=0)
    sigma_v: float = Field(gt=0)
    center: float = 0.0

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        return eval_gaussian(self.v0, self.sigma_v, self.center, x)

    def support(self) -> Tuple[float, float]:
        half = self.SUPPORT_SIGMAS * self.sigma_v
        return (self.center - half, self.center + half)

    def peak_value(self) -> float:
        return self.v0


class FreePotential(PotentialBase):
    """V = 0 everywhere."""

    kind: Literal['free'] = 'free'

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

    def support(self) -> Tuple[float, float]:
        return (0.0, 0.0)

    def peak_value(self) -> float:
        return 0.0


class TabulatedPotential(PotentialBase):
    """Potential given by samples, linearly interpolated."""

    kind: Literal['tabulated'] = 'tabulated'
    positions: List[float]
    values: List[float]

    @model_validator(mode='after')
    def _check_table(self) -> 'TabulatedPotential':
        if len(self.positions) != len(self.values):
            raise ValueError("positions and values differ in length")
        if len(self.positions) < 2:
            raise ValueError("need at least two samples")
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("positions must be strictly increasing")
        return self

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.positions, self.values)

    def support(self) -> Tuple[float, float]:
        nonzero = np.flatnonzero(np.asarray(self.values) != 0.0)
        if nonzero.size == 0:
            middle = 0.5 * (self.positions[0] + self.positions[-1])
            return (middle, middle)
        return (self.positions[nonzero[0]], self.positions[nonzero[-1]])

    def peak_location(self) -> float:
        return float(self.positions[int(np.argmax(self.values))])

    def covers(self, grid: SpatialGrid) -> bool:
        """True if the table spans every grid position."""
        return self.positions[0] <= grid.x_min and self.positions[-1] >= grid.positions[-1]


class SumPotential(PotentialBase):
    """Superposition of member potentials (multi-barrier geometries)."""

    kind: Literal['sum'] = 'sum'
    members: List['PotentialSpec'] = Field(min_length=1)

    @property
    def is_time_dependent(self) -> bool:
        return any(member.is_time_dependent for member in self.members)

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        total = np.zeros_like(np.asarray(x, dtype=float))
        for member in self.members:
            total = total + member.evaluate(x, t)
        return total

    def support(self) -> Tuple[float, float]:
        extents = [member.support() for member in self.members]
        return (min(lo for lo, _ in extents), max(hi for _, hi in extents))

    def peak_location(self) -> float:
        lo, hi = self.support()
        scan = np.linspace(lo, hi, 20001) if hi > lo else np.array([lo])
        return float(scan[int(np.argmax(self.evaluate(scan)))])

    def peak_value(self) -> float:
        lo, hi = self.support()
        scan = np.linspace(lo, hi, 20001) if hi > lo else np.array([lo])
        return float(np.max(self.evaluate(scan)))


class ModulatedPotential(PotentialBase):
    """Time-dependent drive V(x, t) = V_base(x) * (1 + amplitude * sin(omega t + phase))."""

    kind: Literal['modulated'] = 'modulated'
    base: 'PotentialSpec'
    amplitude: float = Field(ge=-1.0, le=1.0)
    omega: float = Field(ge=0)
    phase: float = 0.0

    @property
    def is_time_dependent(self) -> bool:
        return (self.amplitude != 0.0 and self.omega != 0.0) or self.base.is_time_dependent

    def factor(self, t: float) -> float:
        """Modulation factor at time t."""
        return 1.0 + self.amplitude * np.sin(self.omega * t + self.phase)

    def evaluate(self, x: np.ndarray, t: float = 0.0) -> np.ndarray:
        return self.base.evaluate(x, t) * self.factor(t)

    def support(self) -> Tuple[float, float]:
        return self.base.support()

    def peak_location(self) -> float:
        return self.base.peak_location()

    def peak_value(self) -> float:
        return self.base.peak_value()


PotentialSpec = Annotated[
    Union[RectangularBarrier, GaussianBarrier, SumPotential, TabulatedPotential, FreePotential, ModulatedPotential],
    Field(discriminator='kind'),
]

SumPotential.model_rebuild()
ModulatedPotential.model_rebuild()


def sample_potential(spec: PotentialBase, grid: SpatialGrid, t: float = 0.0) -> np.ndarray:
    """
    Evaluate a potential on every grid position.

    Args:
        spec: Potential spec
        grid: Spatial grid
        t: Time; ignored by static potentials

    Returns:
        Array of potential energies, one per grid point

    Raises:
        ConfigurationError: If a tabulated potential does not cover the grid
    """
    _check_coverage(spec, grid)
    return np.asarray(spec.evaluate(grid.positions, t), dtype=float)


def _check_coverage(spec: PotentialBase, grid: SpatialGrid) -> None:
    if isinstance(spec, TabulatedPotential) and not spec.covers(grid):
        raise ConfigurationError(
            f"table spans [{spec.positions[0]}, {spec.positions[-1]}] but grid spans "
            f"[{grid.x_min}, {grid.positions[-1]}]",
            key='potential.positions',
        )
    if isinstance(spec, SumPotential):
        for member in spec.members:
            _check_coverage(member, grid)
    if isinstance(spec, ModulatedPotential):
        _check_coverage(spec.base, grid)
