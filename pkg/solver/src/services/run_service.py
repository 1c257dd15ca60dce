"""Run Service - evolves a config and writes the run directory."""

import logging
import time
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import psutil
import scipy
from pydantic import BaseModel

from ..config.loader import dump_config, load_config
from ..config.models import SimulationConfig
from ..physics.observables import ConservationSummary, ScatteringReport, conservation_summary, scattering_coefficients
from ..physics.propagator import Trajectory, evolve
from ..storage.report_writer import write_density_csv, write_report
from ..storage.trajectory_store import load_trajectory, save_trajectory
from ..utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

CONFIG_FILE = 'config.cfg'
TRAJECTORY_FILE = 'trajectory.qtt'
SCATTERING_FILE = 'scattering.json'
MANIFEST_FILE = 'manifest.json'
DENSITY_FILE = 'density.csv'


class RunReport(BaseModel):
    """Scattering outcome of one run with its conservation audit."""

    scattering: ScatteringReport
    conservation: ConservationSummary
    coherence_time: Optional[float] = None
    warnings: List[str] = []


class RunManifest(BaseModel):
    """Provenance of one run directory."""

    config: str
    timings: dict
    n_steps: int
    n_frames: int
    units: dict
    memory_mb: float
    versions: dict


def build_run_report(config: SimulationConfig, trajectory: Trajectory, warnings: Optional[List[str]] = None) -> RunReport:
    """
    Scattering report of a finished trajectory, using its absorption bookkeeping.

    Args:
        config: Config the trajectory was produced from
        trajectory: Finished trajectory
        warnings: Diagnostics collected during the run

    Returns:
        RunReport
    """
    scattering = scattering_coefficients(
        trajectory.final_state(), config.build_grid(), config.region_partition(), trajectory.absorbed
    )
    return RunReport(
        scattering=scattering,
        conservation=conservation_summary(trajectory.scalars, trajectory.absorbed_history),
        coherence_time=config.dephasing.coherence_time,
        warnings=list(warnings or []),
    )


def summary_line(report: RunReport) -> str:
    """One-line T/R/A summary."""
    s = report.scattering
    return f"T={s.transmission:.6f} R={s.reflection:.6f} A={s.absorbed:.6f} total={s.total:.6f} ({s.quality})"


class RunService:
    """Service that turns configs into run directories and reads them back."""

    def __init__(self, run_dir: Union[str, Path]):
        """
        Initialize run service.

        Args:
            run_dir: Directory holding (or receiving) the run files
        """
        self.run_dir = Path(run_dir)

    def simulate(self, config: SimulationConfig, seed: Optional[int] = None, csv: bool = False) -> Tuple[Trajectory, RunReport]:
        """
        Evolve a config and write config, trajectory, scattering report and manifest.

        Args:
            config: Validated config
            seed: Dephasing seed override
            csv: Also export per-frame |psi|^2 as CSV

        Returns:
            Tuple of (trajectory, run report)
        """
        started = time.perf_counter()
        if seed is not None:
            config = config.with_seed(seed)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        config_text = dump_config(config)
        warnings: List[str] = []
        setup_done = time.perf_counter()

        trajectory = evolve(config, warnings)
        propagated = time.perf_counter()

        report = build_run_report(config, trajectory, warnings)
        (self.run_dir / CONFIG_FILE).write_text(config_text, encoding='utf-8')
        save_trajectory(trajectory, self.run_dir / TRAJECTORY_FILE)
        write_report(report, self.run_dir / SCATTERING_FILE, 'scattering')
        if csv:
            write_density_csv(trajectory, self.run_dir / DENSITY_FILE)
        finished = time.perf_counter()

        manifest = RunManifest(
            config=config_text,
            timings={
                'setup_s': setup_done - started,
                'propagation_s': propagated - setup_done,
                'writing_s': finished - propagated,
            },
            n_steps=config.stepping.n_steps,
            n_frames=len(trajectory.frames),
            units=config.unit_system().to_dict(),
            memory_mb=psutil.Process().memory_info().rss / (1024 * 1024),
            versions={'numpy': np.__version__, 'scipy': scipy.__version__},
        )
        write_report(manifest, self.run_dir / MANIFEST_FILE, 'manifest')
        logger.info(f"run written to {self.run_dir} in {finished - started:.2f} s")
        return trajectory, report

    def load(self) -> Tuple[SimulationConfig, Trajectory]:
        """
        Read a run directory back.

        Returns:
            Tuple of (config, trajectory)

        Raises:
            ConfigurationError: If the directory or its config is missing
            TrajectoryFormatError: If the trajectory file is missing or unreadable
        """
        if not self.run_dir.is_dir():
            raise ConfigurationError(f"no such run directory: {self.run_dir}")
        config = load_config(self.run_dir / CONFIG_FILE)
        trajectory = load_trajectory(self.run_dir / TRAJECTORY_FILE)
        return config, trajectory
