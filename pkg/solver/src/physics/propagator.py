"""Symmetric split-operator stepping with an absorbing mask and optional pure dephasing."""

import logging
from typing import TYPE_CHECKING, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.cache import float_key, get_phase_cache
from ..utils.errors import ConfigurationError, ContractError, PropagationError
from .grid import SpatialGrid, wavenumbers
from .observables import center_of_mass, energies, norm
from .potentials import PotentialBase, sample_potential
from .wavepacket import WavefunctionState, gaussian_packet

if TYPE_CHECKING:
    from ..config.models import SimulationConfig

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
TARGET_FRAMES = 200

# scalar record columns
TIME, NORM, KINETIC, POTENTIAL, COM = range(5)


class AbsorberSpec(BaseModel):
    """Quartic-cosine absorbing layers at both domain edges."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    layer_width: float = Field(default=3.0, gt=0)
    strength: float = Field(default=0.05, gt=0, lt=1)
    enabled: bool = True

    def effective_width(self) -> float:
        """Layer width, or 0 when the absorber is switched off."""
        return self.layer_width if self.enabled else 0.0


class DephasingSpec(BaseModel):
    """Pure dephasing rate gamma and the seed of its random stream."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    gamma: float = Field(default=0.0, ge=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64)

    @property
    def active(self) -> bool:
        return self.gamma > 0

    @property
    def coherence_time(self) -> Optional[float]:
        """T2 = 1/gamma, None without dephasing."""
        return 1.0 / self.gamma if self.gamma > 0 else None


class TimeSteppingSpec(BaseModel):
    """Fixed step size, final time and snapshot cadence (None picks about 200 frames)."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    dt: float = Field(gt=0)
    t_final: float = Field(gt=0)
    snapshot_stride: Optional[int] = Field(default=None, ge=1)

    @field_validator('snapshot_stride', mode='before')
    @classmethod
    def _auto_stride(cls, value: Union[int, str, None]) -> Optional[int]:
        if isinstance(value, str) and value.strip().lower() == 'auto':
            return None
        return value

    @model_validator(mode='after')
    def _check_span(self) -> 'TimeSteppingSpec':
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least dt")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def stride(self) -> int:
        """Snapshot stride, resolving the automatic default."""
        if self.snapshot_stride is not None:
            return self.snapshot_stride
        return max(1, self.n_steps // TARGET_FRAMES)


class Trajectory:
    """Snapshot frames plus per-step scalar diagnostics of one run."""

    def __init__(
        self,
        frames: List[Tuple[float, np.ndarray]],
        scalars: np.ndarray,
        x_min: float,
        dx: float,
        n_points: int,
        absorbed_history: Optional[np.ndarray] = None,
    ):
        """
        Initialize trajectory.

        Args:
            frames: Ordered (time, amplitudes) snapshots, first at t = 0
            scalars: Array (n_records, 5) of time, norm, E_kin, E_pot, <x>
            x_min: Left domain edge
            dx: Grid spacing
            n_points: Grid size
            absorbed_history: Cumulative mask loss per scalar record, if tracked
        """
        self.frames = frames
        self.scalars = np.asarray(scalars, dtype=float).reshape(-1, 5)
        self.x_min = float(x_min)
        self.dx = float(dx)
        self.n_points = int(n_points)
        if absorbed_history is None:
            absorbed_history = self.scalars[0, NORM] - self.scalars[:, NORM]
        self.absorbed_history = np.asarray(absorbed_history, dtype=float)

    @property
    def absorbed(self) -> float:
        """Total probability removed by the mask over the run."""
        return float(self.absorbed_history[-1])

    @property
    def grid(self) -> SpatialGrid:
        return SpatialGrid(self.x_min, self.x_min + self.n_points * self.dx, self.n_points)

    @property
    def times(self) -> np.ndarray:
        return np.array([time for time, _ in self.frames])

    def final_state(self) -> WavefunctionState:
        time, amplitudes = self.frames[-1]
        return WavefunctionState(amplitudes, time)

    def __len__(self) -> int:
        return len(self.frames)


def build_mask(absorber: AbsorberSpec, grid: SpatialGrid) -> np.ndarray:
    """
    Absorbing mask M = 1 - s[1 - cos^4(pi xi / 2)] inside each boundary layer, 1 elsewhere.

    xi runs from 0 at the interior interface to 1 at the domain edge, so the
    mask falls monotonically from 1 to 1 - s toward the edge.

    Args:
        absorber: Layer width and strength
        grid: Spatial grid

    Returns:
        Read-only array of mask values in (0, 1]

    Raises:
        ConfigurationError: If the layers would overlap
    """
    if not absorber.enabled:
        return np.ones(grid.n_points)
    if not absorber.layer_width < grid.length / 2.0:
        raise ConfigurationError(
            f"layer width {absorber.layer_width} must be below half the domain length {grid.length / 2.0}",
            key='absorber.layer_width',
        )

    def compute() -> np.ndarray:
        x = grid.positions
        width = absorber.layer_width
        xi = np.zeros(grid.n_points)
        left = x < grid.x_min + width
        right = x > grid.x_max - width
        xi[left] = (grid.x_min + width - x[left]) / width
        xi[right] = (x[right] - (grid.x_max - width)) / width
        return 1.0 - absorber.strength * (1.0 - np.cos(np.pi * xi / 2.0) ** 4)

    key = float_key('mask', grid.x_min, grid.x_max, grid.n_points, absorber.layer_width, absorber.strength)
    return get_phase_cache().get_or_compute(key, compute)


def kinetic_phase(grid: SpatialGrid, dt: float, mass: float = 1.0) -> np.ndarray:
    """Precomputed exp(-i k^2 dt / 2m), cached per (n_points, dx, dt, mass)."""
    key = float_key('kinetic', grid.n_points, grid.dx, dt, mass)
    return get_phase_cache().get_or_compute(
        key, lambda: np.exp(-1j * wavenumbers(grid).k_values ** 2 * dt / (2.0 * mass))
    )


def apply_dephasing(state: WavefunctionState, gamma: float, dt: float, rng: np.random.Generator) -> WavefunctionState:
    """
    Multiply every amplitude by exp(i phi) with phi ~ N(0, 2 gamma dt).

    Args:
        state: Wavefunction state
        gamma: Dephasing rate, >= 0
        dt: Time step
        rng: Random stream owned by the caller

    Returns:
        Dephased state; the input itself when gamma = 0
    """
    if gamma == 0:
        return state
    phases = rng.standard_normal(len(state)) * np.sqrt(2.0 * gamma * dt)
    return WavefunctionState(state.amplitudes * np.exp(1j * phases), state.time)


def step(
    state: WavefunctionState,
    potential_samples: np.ndarray,
    kinetic_phase: np.ndarray,
    mask: np.ndarray,
    dephasing: Optional[DephasingSpec],
    dt: float,
    rng: Optional[np.random.Generator] = None,
) -> WavefunctionState:
    """
    One Strang step: half potential kick, spectral drift, half kick, mask, dephasing.

    Args:
        state: Current state
        potential_samples: V on the grid for this step
        kinetic_phase: exp(-i k^2 dt / 2m) for the same dt
        mask: Absorbing mask
        dephasing: Dephasing spec, or None
        dt: Time step (negative steps run backwards)
        rng: Random stream owned by the caller, required when dephasing is active

    Returns:
        State at t + dt

    Raises:
        ContractError: If dephasing is active and no random stream is given
    """
    dephasing_on = dephasing is not None and dephasing.active
    if dephasing_on and rng is None:
        # kicks must stay independent from step to step
        raise ContractError("active dephasing needs a random stream that persists across steps")
    half_kick = np.exp(-0.5j * potential_samples * dt)
    amplitudes = half_kick * state.amplitudes
    amplitudes = np.fft.ifft(kinetic_phase * np.fft.fft(amplitudes))
    amplitudes = half_kick * amplitudes
    amplitudes = mask * amplitudes
    advanced = WavefunctionState(amplitudes, state.time + dt)
    if dephasing_on:
        advanced = apply_dephasing(advanced, dephasing.gamma, dt, rng)
    return advanced


class SplitOperatorPropagator:
    """Advances states on one grid with fixed dt, reusing the precomputed phase tables."""

    def __init__(
        self,
        grid: SpatialGrid,
        potential: PotentialBase,
        dt: float,
        mass: float = 1.0,
        absorber: Optional[AbsorberSpec] = None,
        dephasing: Optional[DephasingSpec] = None,
    ):
        """
        Initialize propagator.

        Args:
            grid: Spatial grid
            potential: Potential spec; time-dependent specs are sampled at each step midpoint
            dt: Time step
            mass: Particle mass
            absorber: Absorbing layers, None for no absorption
            dephasing: Dephasing channel, None for coherent evolution
        """
        self.grid = grid
        self.potential = potential
        self.dt = dt
        self.mass = mass
        self.dephasing = dephasing
        self.mask = build_mask(absorber, grid) if absorber is not None else np.ones(grid.n_points)
        self.kinetic_phase = kinetic_phase(grid, dt, mass)
        self.static_samples = None if potential.is_time_dependent else sample_potential(potential, grid)
        seed = dephasing.seed if dephasing is not None else DEFAULT_SEED
        self.rng = np.random.default_rng(np.random.SeedSequence(seed))

    def potential_at(self, t: float) -> np.ndarray:
        """V on the grid at time t."""
        if self.static_samples is not None:
            return self.static_samples
        return sample_potential(self.potential, self.grid, t)

    def advance(self, state: WavefunctionState) -> Tuple[WavefunctionState, float]:
        """
        Advance one step.

        Returns:
            Tuple of (new state, probability removed by the mask in this step)
        """
        samples = self.potential_at(state.time + 0.5 * self.dt)
        before = norm(state, self.grid)
        coherent = step(state, samples, self.kinetic_phase, self.mask, None, self.dt)
        loss = before - norm(coherent, self.grid)
        if self.dephasing is not None and self.dephasing.active:
            coherent = apply_dephasing(coherent, self.dephasing.gamma, self.dt, self.rng)
        return coherent, loss

    def record(self, state: WavefunctionState) -> Tuple[float, float, float, float, float]:
        """Scalar diagnostics (time, norm, E_kin, E_pot, <x>) of a state."""
        kinetic, potential = energies(state, self.grid, self.potential_at(state.time), self.mass)
        return (state.time, norm(state, self.grid), kinetic, potential, center_of_mass(state, self.grid))


def evolve(config: 'SimulationConfig', warnings: Optional[List[str]] = None) -> Trajectory:
    """
    Run a full fixed-step evolution.

    Scalars are recorded at t = 0 and after every step; frames are kept every
    snapshot_stride steps, at t = 0, and for the final state. Deterministic
    given the dephasing seed.

    Args:
        config: Validated simulation config
        warnings: Optional list collecting non-fatal diagnostics

    Returns:
        Trajectory

    Raises:
        PropagationError: If non-finite amplitudes appear
    """
    grid = config.grid.build()
    absorber = config.absorber
    state = gaussian_packet(config.wavepacket, grid, absorber.effective_width(), warnings)
    propagator = SplitOperatorPropagator(
        grid,
        config.potential,
        config.stepping.dt,
        config.units.mass,
        absorber if absorber.enabled else None,
        config.dephasing,
    )

    n_steps = config.stepping.n_steps
    stride = config.stepping.stride
    progress_every = max(1, n_steps // 10)
    logger.info(f"evolving {n_steps} steps of dt={config.stepping.dt}, frame stride {stride}")

    frames = [(0.0, state.amplitudes.copy())]
    scalars = [propagator.record(state)]
    absorbed = [0.0]

    for index in range(1, n_steps + 1):
        state, loss = propagator.advance(state)
        # pin the clock to the step count
        state.time = index * config.stepping.dt
        if not np.all(np.isfinite(state.amplitudes)):
            raise PropagationError("non-finite amplitude", index)
        scalars.append(propagator.record(state))
        absorbed.append(absorbed[-1] + loss)
        if index % stride == 0 or index == n_steps:
            frames.append((state.time, state.amplitudes.copy()))
        if index % progress_every == 0:
            logger.info(f"step {index}/{n_steps} ({100 * index // n_steps}%), norm {scalars[-1][NORM]:.6f}")

    return Trajectory(frames, np.array(scalars), grid.x_min, grid.dx, grid.n_points, np.array(absorbed))
