"""Frame-stratified sampling of trajectory densities and amplitudes."""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..physics.propagator import DEFAULT_SEED, Trajectory
from ..utils.errors import ContractError

logger = logging.getLogger(__name__)

ALLOCATIONS = ('equal', 'proportional')


class SampleSet:
    """Sampled |psi|^2 values with where they came from."""

    def __init__(self, values: np.ndarray, provenance: Optional[Dict] = None):
        """
        Initialize sample set.

        Args:
            values: Nonnegative density values
            provenance: Run id, stratification description and seed
        """
        values = np.asarray(values, dtype=float)
        if np.any(values < 0):
            raise ContractError("density samples must be nonnegative")
        self.values = values
        self.provenance = provenance or {}

    @property
    def size(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


class PhasePointSet:
    """Sampled complex amplitudes viewed as points in the (Re psi, Im psi) plane."""

    def __init__(self, amplitudes: np.ndarray, provenance: Optional[Dict] = None):
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128).ravel()
        self.provenance = provenance or {}

    @classmethod
    def from_points(cls, points: np.ndarray, provenance: Optional[Dict] = None) -> 'PhasePointSet':
        """Build from an (n, 2) array of (re, im) pairs."""
        points = np.asarray(points, dtype=float)
        return cls(points[:, 0] + 1j * points[:, 1], provenance)

    @property
    def points(self) -> np.ndarray:
        """(n, 2) array of (re, im)."""
        return np.column_stack([self.amplitudes.real, self.amplitudes.imag])

    def __len__(self) -> int:
        return self.amplitudes.size


def allocate_quotas(capacities: Sequence[int], n_total: int, allocation: str = 'equal') -> np.ndarray:
    """
    Per-stratum sample counts for n_total draws.

    'equal' gives every stratum floor(n_total / S), the remainder going one each
    to the earliest strata; a stratum smaller than its share gives all of its
    points and the shortfall is shared among the others. 'proportional' gives
    floor(n_total c_f / C) and hands the remainder to the earliest strata with room.

    Args:
        capacities: Points available per stratum
        n_total: Draws to place, at most sum(capacities)
        allocation: 'equal' or 'proportional'

    Returns:
        Integer counts, one per stratum

    Raises:
        ContractError: On an unknown allocation or more draws than points
    """
    capacities = np.asarray(capacities, dtype=np.int64)
    if allocation not in ALLOCATIONS:
        raise ContractError(f"unknown allocation '{allocation}', expected one of {ALLOCATIONS}")
    if n_total > capacities.sum():
        raise ContractError(f"cannot place {n_total} draws in {capacities.sum()} points")
    counts = np.zeros(capacities.size, dtype=np.int64)

    if allocation == 'proportional':
        counts = n_total * capacities // max(int(capacities.sum()), 1)
        remainder = n_total - int(counts.sum())
        for stratum in np.flatnonzero(counts < capacities)[:remainder]:
            counts[stratum] += 1
        return counts

    remaining = n_total
    open_strata = [stratum for stratum in range(capacities.size) if capacities[stratum] > 0]
    while remaining > 0 and open_strata:
        quota, extra = divmod(remaining, len(open_strata))
        still_open = []
        for position, stratum in enumerate(open_strata):
            take = min(quota + (1 if position < extra else 0), capacities[stratum] - counts[stratum])
            counts[stratum] += take
            remaining -= take
            if counts[stratum] < capacities[stratum]:
                still_open.append(stratum)
        open_strata = still_open
    return counts


def draw_from_strata(
    candidates: List[np.ndarray], n_total: int, seed: int = DEFAULT_SEED, allocation: str = 'equal'
) -> List[np.ndarray]:
    """
    Draw without replacement from each stratum's candidate indices.

    Args:
        candidates: Candidate grid indices, one array per stratum
        n_total: Requested sample size (clamped to the available points)
        seed: Random seed
        allocation: 'equal' or 'proportional'

    Returns:
        Sorted drawn indices, one array per stratum

    Raises:
        ContractError: If nothing can be drawn, or equal allocation leaves a populated stratum empty
    """
    capacities = [chunk.size for chunk in candidates]
    available = sum(capacities)
    if available == 0:
        raise ContractError("no points to sample")
    populated = sum(1 for capacity in capacities if capacity > 0)
    if allocation == 'equal' and n_total < populated:
        raise ContractError(f"requested {n_total} samples for {populated} frames")
    if n_total > available:
        logger.warning(f"requested {n_total} samples but only {available} points exist; clamping")
        n_total = available

    counts = allocate_quotas(capacities, n_total, allocation)
    rng = np.random.default_rng(seed)
    indices = []
    for chunk, count in zip(candidates, counts):
        if count == 0:
            indices.append(np.empty(0, dtype=np.int64))
            continue
        indices.append(np.sort(chunk[rng.choice(chunk.size, size=int(count), replace=False)]))
    return indices


def stratified_indices(
    n_frames: int, frame_size: int, n_total: int, seed: int = DEFAULT_SEED, allocation: str = 'equal'
) -> List[np.ndarray]:
    """
    Per-frame grid indices for a stratified draw over every grid point.

    With equal allocation each frame gets floor(n_total / n_frames) points, the
    remainder going one each to the earliest frames; within a frame indices are
    drawn uniformly without replacement and returned sorted.

    Raises:
        ContractError: If there are no frames or n_total < n_frames
    """
    if n_frames < 1:
        raise ContractError("trajectory has no frames")
    return draw_from_strata([np.arange(frame_size)] * n_frames, n_total, seed, allocation)


def populated_indices(
    trajectory: Trajectory, density_floor: Optional[float] = None, edge: float = 0.0
) -> List[np.ndarray]:
    """
    Per-frame indices of the points a run actually populates.

    A point qualifies when it lies in [x_min + edge, x_max - edge) and, if a
    floor is given, its density exceeds it. With no floor and no edge every
    grid point qualifies.

    Args:
        trajectory: Source trajectory
        density_floor: Minimum |psi|^2, or None for no density condition
        edge: Width excluded at each boundary, normally the absorber layer

    Returns:
        Index arrays, one per frame
    """
    grid = trajectory.grid
    x = grid.positions
    interior = (x >= grid.x_min + edge) & (x < grid.x_max - edge)
    if density_floor is None:
        return [np.flatnonzero(interior) for _ in trajectory.frames]
    return [np.flatnonzero(interior & (np.abs(amplitudes) ** 2 > density_floor)) for _, amplitudes in trajectory.frames]


def _provenance(
    trajectory: Trajectory,
    n_total: Optional[int],
    seed: int,
    run_id: Optional[str],
    allocation: str,
    density_floor: Optional[float],
    edge: float,
) -> Dict:
    if density_floor is None and edge == 0.0:
        population = 'every grid point'
    else:
        population = f"points at least {edge} inside the edges with density above {density_floor or 0.0}"
    return {
        'run_id': run_id,
        'strata': f"{len(trajectory.frames)} frames, {allocation} allocation",
        'population': population,
        'n_requested': n_total,
        'seed': seed,
    }


def _draw(
    trajectory: Trajectory,
    n_total: Optional[int],
    seed: int,
    allocation: str,
    density_floor: Optional[float],
    edge: float,
) -> List[np.ndarray]:
    if not trajectory.frames:
        raise ContractError("trajectory has no frames")
    candidates = populated_indices(trajectory, density_floor, edge)
    if n_total is None:
        return candidates
    return draw_from_strata(candidates, n_total, seed, allocation)


def stratified_sample(
    trajectory: Trajectory,
    n_total: int,
    seed: int = DEFAULT_SEED,
    run_id: Optional[str] = None,
    allocation: str = 'equal',
    density_floor: Optional[float] = None,
    edge: float = 0.0,
) -> SampleSet:
    """
    Stratified sample of density values, one stratum per stored frame.

    Args:
        trajectory: Source trajectory
        n_total: Requested sample size (clamped to the available points)
        seed: Random seed
        run_id: Label recorded in the provenance
        allocation: 'equal' quotas per frame or 'proportional' to each frame's population
        density_floor: Only draw points with |psi|^2 above this, None for every point
        edge: Width excluded at each boundary

    Returns:
        SampleSet
    """
    indices = _draw(trajectory, n_total, seed, allocation, density_floor, edge)
    values = np.concatenate(
        [np.abs(amplitudes[chosen]) ** 2 for (_, amplitudes), chosen in zip(trajectory.frames, indices)]
    )
    return SampleSet(values, _provenance(trajectory, n_total, seed, run_id, allocation, density_floor, edge))


def stratified_phase_points(
    trajectory: Trajectory,
    n_total: Optional[int],
    seed: int = DEFAULT_SEED,
    run_id: Optional[str] = None,
    allocation: str = 'equal',
    density_floor: Optional[float] = None,
    edge: float = 0.0,
) -> PhasePointSet:
    """Same draw as stratified_sample keeping the complex amplitudes; n_total None takes every qualifying point."""
    indices = _draw(trajectory, n_total, seed, allocation, density_floor, edge)
    amplitudes = np.concatenate(
        [amplitudes[chosen] for (_, amplitudes), chosen in zip(trajectory.frames, indices)]
    )
    return PhasePointSet(amplitudes, _provenance(trajectory, n_total, seed, run_id, allocation, density_floor, edge))
