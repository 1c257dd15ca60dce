"""Norms, currents, scattering coefficients, moments and energies of wavefunction states."""

import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..utils.errors import ConfigurationError, UndefinedValueError
from .grid import SpatialGrid, wavenumbers
from .potentials import PotentialBase
from .wavepacket import WavefunctionState

logger = logging.getLogger(__name__)

EXCELLENT_TOLERANCE = 1e-2
GOOD_TOLERANCE = 5e-2

Quality = Literal['excellent', 'good', 'poor']


class RegionPartition(BaseModel):
    """Barrier extent and absorber width splitting the domain into reflected / barrier / transmitted regions."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    barrier_left: float
    barrier_right: float
    absorber_width: float

    @classmethod
    def from_potential(
        cls,
        potential: PotentialBase,
        absorber_width: float,
        barrier_left: Optional[float] = None,
        barrier_right: Optional[float] = None,
    ) -> 'RegionPartition':
        """
        Default partition from the potential's support, with optional overrides.

        Args:
            potential: Potential spec (rectangular: +-a/2, Gaussian: +-4 sigma_V)
            absorber_width: Absorbing layer width (0 when the absorber is off)
            barrier_left: Override for x_b-
            barrier_right: Override for x_b+

        Returns:
            RegionPartition
        """
        left, right = potential.support()
        return cls(
            barrier_left=left if barrier_left is None else barrier_left,
            barrier_right=right if barrier_right is None else barrier_right,
            absorber_width=absorber_width,
        )

    def check(self, grid: SpatialGrid) -> None:
        """
        Require x_min + width < x_b- <= x_b+ < x_max - width.

        Raises:
            ConfigurationError: If the partition does not fit the grid
        """
        inner_left = grid.x_min + self.absorber_width
        inner_right = grid.x_max - self.absorber_width
        if not inner_left < self.barrier_left:
            raise ConfigurationError(
                f"x_b- = {self.barrier_left} must lie right of {inner_left}", key='partition.barrier_left'
            )
        if not self.barrier_left <= self.barrier_right:
            raise ConfigurationError("x_b- must not exceed x_b+", key='partition.barrier_right')
        if not self.barrier_right < inner_right:
            raise ConfigurationError(
                f"x_b+ = {self.barrier_right} must lie left of {inner_right}", key='partition.barrier_right'
            )


class ScatteringReport(BaseModel):
    """Final-state transmission, reflection and absorption with a conservation grade."""

    transmission: float
    reflection: float
    absorbed: float
    total: float
    quality: Quality
    absorbed_source: Literal['bookkeeping', 'complement']
    partition: RegionPartition


class ConservationSummary(BaseModel):
    """Norm and energy bookkeeping over a run."""

    initial_norm: float
    final_norm: float
    max_norm_residual: float
    relative_energy_drift: float
    initial_energy: float
    final_energy: float
    final_center_of_mass: float


def classify_quality(total: float) -> Quality:
    """Grade |total - 1|: excellent below 1e-2, good below 5e-2, poor otherwise."""
    deviation = abs(total - 1.0)
    if deviation < EXCELLENT_TOLERANCE:
        return 'excellent'
    if deviation < GOOD_TOLERANCE:
        return 'good'
    return 'poor'


def _derivative_wavenumbers(grid: SpatialGrid) -> np.ndarray:
    # the Nyquist mode has no odd partner, so it is dropped from first derivatives
    k = wavenumbers(grid).k_values.copy()
    k[grid.n_points // 2] = 0.0
    return k


def spectral_derivative(amplitudes: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """First derivative of a periodic grid function computed in Fourier space."""
    return np.fft.ifft(1j * _derivative_wavenumbers(grid) * np.fft.fft(amplitudes))


def norm(state: WavefunctionState, grid: SpatialGrid) -> float:
    """Discrete norm sum |psi_j|^2 dx."""
    return float(np.sum(np.abs(state.amplitudes) ** 2) * grid.dx)


def probability_current(state: WavefunctionState, grid: SpatialGrid, mass: float = 1.0) -> np.ndarray:
    """
    Probability current J = (1/m) Im(psi* dpsi/dx) with a spectral derivative.

    Args:
        state: Wavefunction state
        grid: Spatial grid
        mass: Particle mass

    Returns:
        Current density per grid point
    """
    derivative = spectral_derivative(state.amplitudes, grid)
    return np.imag(np.conj(state.amplitudes) * derivative) / mass


def scattering_coefficients(
    state: WavefunctionState,
    grid: SpatialGrid,
    partition: RegionPartition,
    absorbed: Optional[float] = None,
) -> ScatteringReport:
    """
    Transmission and reflection integrals of the final state.

    T sums |psi|^2 dx over (x_b+, x_max - width], R over [x_min + width, x_b-).
    With per-step absorption bookkeeping, A is the accumulated mask loss and
    T + R + A is a genuine conservation audit; without it A = max(0, 1 - T - R).

    Args:
        state: Final-time state
        grid: Spatial grid
        partition: Region partition
        absorbed: Accumulated probability removed by the mask, if known

    Returns:
        ScatteringReport

    Raises:
        ConfigurationError: If the partition does not fit the grid
    """
    partition.check(grid)
    x = grid.positions
    density = np.abs(state.amplitudes) ** 2
    transmitted = (x > partition.barrier_right) & (x <= grid.x_max - partition.absorber_width)
    reflected = (x >= grid.x_min + partition.absorber_width) & (x < partition.barrier_left)
    transmission = float(np.sum(density[transmitted]) * grid.dx)
    reflection = float(np.sum(density[reflected]) * grid.dx)

    if absorbed is None:
        absorbed_value = max(0.0, 1.0 - transmission - reflection)
        source = 'complement'
    else:
        absorbed_value = float(absorbed)
        source = 'bookkeeping'

    total = transmission + reflection + absorbed_value
    return ScatteringReport(
        transmission=transmission,
        reflection=reflection,
        absorbed=absorbed_value,
        total=total,
        quality=classify_quality(total),
        absorbed_source=source,
        partition=partition,
    )


def center_of_mass(state: WavefunctionState, grid: SpatialGrid) -> float:
    """
    Probability-weighted mean position, normalized by the current norm.

    Raises:
        UndefinedValueError: If the state has zero norm
    """
    density = np.abs(state.amplitudes) ** 2
    total = np.sum(density)
    if not total > 0:
        raise UndefinedValueError("center of mass of a zero-norm state")
    return float(np.sum(grid.positions * density) / total)


def position_spread(state: WavefunctionState, grid: SpatialGrid) -> float:
    """Standard deviation of position under |psi|^2."""
    density = np.abs(state.amplitudes) ** 2
    total = np.sum(density)
    if not total > 0:
        raise UndefinedValueError("position spread of a zero-norm state")
    mean = np.sum(grid.positions * density) / total
    return float(np.sqrt(np.sum((grid.positions - mean) ** 2 * density) / total))


def peak_density(state: WavefunctionState) -> float:
    """Maximum of |psi|^2."""
    return float(np.max(np.abs(state.amplitudes) ** 2))


def mean_momentum(state: WavefunctionState, grid: SpatialGrid) -> float:
    """Spectral first moment sum k |psi_k|^2 / sum |psi_k|^2."""
    weights = np.abs(np.fft.fft(state.amplitudes)) ** 2
    total = np.sum(weights)
    if not total > 0:
        raise UndefinedValueError("mean momentum of a zero-norm state")
    return float(np.sum(wavenumbers(grid).k_values * weights) / total)


def energies(
    state: WavefunctionState,
    grid: SpatialGrid,
    potential_samples: np.ndarray,
    mass: float = 1.0,
) -> Tuple[float, float]:
    """
    Kinetic and potential energy expectation values.

    The kinetic term (1/2m) sum |dpsi/dx|^2 dx is evaluated in Fourier space
    (Parseval), which is the spectral derivative without the inverse transform.

    Args:
        state: Wavefunction state
        grid: Spatial grid
        potential_samples: V on the grid
        mass: Particle mass

    Returns:
        Tuple of (kinetic, potential)
    """
    k = wavenumbers(grid).k_values
    spectrum = np.fft.fft(state.amplitudes)
    kinetic = float(np.sum(k ** 2 * np.abs(spectrum) ** 2) * grid.dx / grid.n_points / (2.0 * mass))
    potential = float(np.sum(potential_samples * np.abs(state.amplitudes) ** 2) * grid.dx)
    return kinetic, potential


def conservation_summary(scalars: np.ndarray, absorbed: Optional[np.ndarray] = None) -> ConservationSummary:
    """
    Summarize per-step scalars (time, norm, E_kin, E_pot, <x>).

    Args:
        scalars: Array of shape (n_records, 5)
        absorbed: Cumulative mask loss per record, if tracked

    Returns:
        ConservationSummary
    """
    norms = scalars[:, 1]
    total_energy = scalars[:, 2] + scalars[:, 3]
    loss = absorbed if absorbed is not None else np.zeros_like(norms)
    residual = np.abs(norms + loss - norms[0])
    initial_energy = float(total_energy[0])
    drift = abs(float(total_energy[-1]) - initial_energy) / abs(initial_energy) if initial_energy != 0 else 0.0
    return ConservationSummary(
        initial_norm=float(norms[0]),
        final_norm=float(norms[-1]),
        max_norm_residual=float(np.max(residual)),
        relative_energy_drift=drift,
        initial_energy=initial_energy,
        final_energy=float(total_energy[-1]),
        final_center_of_mass=float(scalars[-1, 4]),
    )


def key_frames(frames: List[Tuple[float, np.ndarray]], grid: SpatialGrid, partition: RegionPartition) -> Dict[str, Dict]:
    """
    Initial, pre-collision, peak-interaction and final frames of a run.

    Peak interaction is the frame with the most probability inside [x_b-, x_b+];
    pre-collision is the last earlier frame holding under 1% of that peak.

    Args:
        frames: Ordered (time, amplitudes) snapshots
        grid: Spatial grid
        partition: Region partition

    Returns:
        Mapping of label to {'index', 'time', 'barrier_probability', 'peak_density', 'spread'}
    """
    x = grid.positions
    inside = (x >= partition.barrier_left) & (x <= partition.barrier_right)
    barrier_probability = np.array(
        [np.sum(np.abs(amplitudes[inside]) ** 2) * grid.dx for _, amplitudes in frames]
    )
    peak_index = int(np.argmax(barrier_probability))
    pre_index = 0
    for index in range(peak_index, -1, -1):
        if barrier_probability[index] < 0.01 * barrier_probability[peak_index]:
            pre_index = index
            break

    def describe(index: int) -> Dict:
        time, amplitudes = frames[index]
        state = WavefunctionState(amplitudes, time)
        return {
            'index': index,
            'time': float(time),
            'barrier_probability': float(barrier_probability[index]),
            'peak_density': peak_density(state),
            'spread': position_spread(state, grid),
        }

    return {
        'initial': describe(0),
        'pre_collision': describe(pre_index),
        'peak_interaction': describe(peak_index),
        'final': describe(len(frames) - 1),
    }
