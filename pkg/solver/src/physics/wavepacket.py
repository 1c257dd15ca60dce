"""Gaussian minimum-uncertainty initial state and its free-particle kinematics."""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .grid import SpatialGrid, wavenumbers

logger = logging.getLogger(__name__)

EDGE_SIGMAS = 4.0
MIN_POINTS_PER_SIGMA = 10.0
MAX_NYQUIST_FRACTION = 0.5
ABSORBER_OVERLAP_LIMIT = 1e-6


class WavepacketSpec(BaseModel):
    """Center x0, mean wavenumber k0 and spatial width sigma of the initial packet."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    x0: float
    k0: float
    sigma: float = Field(gt=0)


class WavefunctionState:
    """Complex amplitudes on the grid at a given time."""

    def __init__(self, amplitudes: np.ndarray, time: float = 0.0):
        """
        Initialize state.

        Args:
            amplitudes: Complex amplitudes, one per grid point
            time: Current time
        """
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        self.time = float(time)

    @property
    def density(self) -> np.ndarray:
        """Probability density |psi|^2."""
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> 'WavefunctionState':
        """Independent copy of this state."""
        return WavefunctionState(self.amplitudes.copy(), self.time)

    def __len__(self) -> int:
        return self.amplitudes.size


def gaussian_packet(
    spec: WavepacketSpec,
    grid: SpatialGrid,
    absorber_width: float = 0.0,
    warnings: Optional[List[str]] = None,
) -> WavefunctionState:
    """
    Sample the minimum-uncertainty Gaussian on the grid and renormalize to unit discrete norm.

    Args:
        spec: Packet parameters
        grid: Spatial grid
        absorber_width: Width of the absorbing layers, used for the overlap check
        warnings: Optional list that collects diagnostic messages

    Returns:
        WavefunctionState at t = 0
    """
    x = grid.positions
    prefactor = (1.0 / (2.0 * np.pi * spec.sigma ** 2)) ** 0.25
    amplitudes = prefactor * np.exp(-((x - spec.x0) ** 2) / (4.0 * spec.sigma ** 2) + 1j * spec.k0 * x)
    amplitudes /= np.sqrt(np.sum(np.abs(amplitudes) ** 2) * grid.dx)

    messages = check_packet(spec, grid, amplitudes, absorber_width)
    for message in messages:
        logger.warning(message)
    if warnings is not None:
        warnings.extend(messages)

    return WavefunctionState(amplitudes, 0.0)


def check_packet(spec: WavepacketSpec, grid: SpatialGrid, amplitudes: np.ndarray, absorber_width: float = 0.0) -> List[str]:
    """
    Resolution and placement guardrails. Violations are reported, never raised.

    Args:
        spec: Packet parameters
        grid: Spatial grid
        amplitudes: Sampled amplitudes
        absorber_width: Width of the absorbing layers

    Returns:
        List of warning messages (empty when the packet is well placed and resolved)
    """
    messages = []
    if spec.x0 - EDGE_SIGMAS * spec.sigma < grid.x_min or spec.x0 + EDGE_SIGMAS * spec.sigma > grid.x_max:
        messages.append(f"packet at x0={spec.x0} is closer than {EDGE_SIGMAS:g} sigma to a domain edge")
    if spec.sigma < MIN_POINTS_PER_SIGMA * grid.dx:
        messages.append(f"sigma={spec.sigma} is under-resolved (fewer than {MIN_POINTS_PER_SIGMA:g} points per sigma)")
    k_nyquist = wavenumbers(grid).nyquist
    if abs(spec.k0) > MAX_NYQUIST_FRACTION * k_nyquist:
        messages.append(f"|k0|={abs(spec.k0)} exceeds half the Nyquist wavenumber {k_nyquist:.4g}; aliasing likely")
    if absorber_width > 0:
        x = grid.positions
        in_layer = (x < grid.x_min + absorber_width) | (x > grid.x_max - absorber_width)
        overlap = float(np.sum(np.abs(amplitudes[in_layer]) ** 2) * grid.dx)
        if overlap > ABSORBER_OVERLAP_LIMIT:
            messages.append(f"packet puts {overlap:.3g} of its probability inside the absorbing layers")
    return messages


def group_velocity(spec: WavepacketSpec, mass: float = 1.0) -> float:
    """Group velocity k0/m."""
    return spec.k0 / mass


def spreading_time(spec: WavepacketSpec, mass: float = 1.0) -> float:
    """Free spreading time 2 m sigma^2."""
    return 2.0 * mass * spec.sigma ** 2


def analytic_width(spec: WavepacketSpec, t: float, mass: float = 1.0) -> float:
    """Free-particle width sigma * sqrt(1 + (t / tau_spr)^2)."""
    return spec.sigma * np.sqrt(1.0 + (t / spreading_time(spec, mass)) ** 2)


def mean_kinetic_energy(spec: WavepacketSpec, mass: float = 1.0) -> float:
    """k0^2/2m plus the width contribution 1/(8 m sigma^2)."""
    return spec.k0 ** 2 / (2.0 * mass) + 1.0 / (8.0 * mass * spec.sigma ** 2)
