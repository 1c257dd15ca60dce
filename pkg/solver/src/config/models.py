"""Top-level simulation config composed of the per-component specs."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..physics.grid import GridSpec, SpatialGrid, UnitSystem
from ..physics.observables import RegionPartition
from ..physics.potentials import PotentialSpec
from ..physics.propagator import AbsorberSpec, DephasingSpec, TimeSteppingSpec
from ..physics.wavepacket import WavepacketSpec


class UnitsSpec(BaseModel):
    """Particle mass in units where hbar = m_e = 1."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    mass: float = Field(default=1.0, gt=0)


class PartitionSpec(BaseModel):
    """Optional overrides of the barrier extent used for T and R."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    barrier_left: Optional[float] = None
    barrier_right: Optional[float] = None


class SimulationConfig(BaseModel):
    """Everything one run needs: grid, packet, potential, absorber, dephasing, stepping and partition."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    grid: GridSpec
    units: UnitsSpec = UnitsSpec()
    wavepacket: WavepacketSpec
    potential: PotentialSpec
    absorber: AbsorberSpec = AbsorberSpec()
    dephasing: DephasingSpec = DephasingSpec()
    stepping: TimeSteppingSpec
    partition: PartitionSpec = PartitionSpec()

    @model_validator(mode='after')
    def _check_layers(self) -> 'SimulationConfig':
        if self.absorber.enabled and not self.absorber.layer_width < (self.grid.x_max - self.grid.x_min) / 2.0:
            raise ValueError("absorber layer_width must be below half the domain length")
        return self

    def build_grid(self) -> SpatialGrid:
        return self.grid.build()

    def unit_system(self) -> UnitSystem:
        return UnitSystem(self.units.mass)

    def region_partition(self) -> RegionPartition:
        """Partition from the potential's support and any configured overrides."""
        return RegionPartition.from_potential(
            self.potential,
            self.absorber.effective_width(),
            self.partition.barrier_left,
            self.partition.barrier_right,
        )

    def with_seed(self, seed: int) -> 'SimulationConfig':
        """Copy with the dephasing seed replaced."""
        return self.model_copy(update={'dephasing': self.dephasing.model_copy(update={'seed': seed})})
