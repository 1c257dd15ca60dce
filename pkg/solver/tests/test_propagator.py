"""Tests for the split-operator step, the absorbing mask, dephasing and full evolutions."""

import pytest
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.models import SimulationConfig
from src.physics.grid import make_grid
from src.physics.observables import norm, position_spread, probability_current, spectral_derivative
from src.physics.potentials import FreePotential, GaussianBarrier, sample_potential
from src.physics.propagator import (
    NORM,
    AbsorberSpec,
    DephasingSpec,
    SplitOperatorPropagator,
    TimeSteppingSpec,
    apply_dephasing,
    build_mask,
    evolve,
    kinetic_phase,
    step,
)
from src.physics.wavepacket import WavefunctionState, WavepacketSpec, analytic_width, gaussian_packet, spreading_time
from src.services.run_service import build_run_report
from src.utils.errors import ConfigurationError, ContractError, PropagationError


def small_config(**overrides) -> SimulationConfig:
    """Short run on a coarse grid; sections in overrides replace the defaults."""
    data = {
        'grid': {'x_min': -20.0, 'x_max': 20.0, 'n_points': 256},
        'wavepacket': {'x0': -5.0, 'k0': 2.0, 'sigma': 1.0},
        'potential': {'kind': 'rectangular', 'v0': 2.0, 'width': 1.0},
        'stepping': {'dt': 0.005, 't_final': 0.5, 'snapshot_stride': 10},
    }
    data.update(overrides)
    return SimulationConfig.model_validate(data)


class TestMask:
    """Test cases for build_mask."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = make_grid(-30.0, 30.0, 2048)

    def test_interior_is_transparent(self):
        """Away from the layers the mask is exactly 1."""
        mask = build_mask(AbsorberSpec(), self.grid)
        interior = np.abs(self.grid.positions) <= 27.0
        assert np.all(mask[interior] == 1.0)

    def test_edge_value(self):
        """At the domain edge the mask reaches 1 - s."""
        mask = build_mask(AbsorberSpec(layer_width=3.0, strength=0.5), self.grid)
        assert mask[0] == pytest.approx(0.5, abs=1e-12)

    def test_monotone_toward_edges(self):
        """The mask never increases toward either edge."""
        mask = build_mask(AbsorberSpec(strength=0.3), self.grid)
        middle = self.grid.n_points // 2
        assert np.all(np.diff(mask[:middle]) >= 0.0)
        assert np.all(np.diff(mask[middle:]) <= 0.0)
        assert np.all((mask > 0.0) & (mask <= 1.0))

    def test_disabled(self):
        """A disabled absorber is all ones."""
        mask = build_mask(AbsorberSpec(enabled=False), self.grid)
        np.testing.assert_array_equal(mask, np.ones(2048))

    def test_layers_too_wide(self):
        """Layers meeting in the middle are rejected."""
        with pytest.raises(ConfigurationError) as info:
            build_mask(AbsorberSpec(layer_width=30.0), self.grid)
        assert info.value.key == 'absorber.layer_width'

    def test_strength_range(self):
        """Strength lies strictly between 0 and 1."""
        with pytest.raises(ValidationError):
            AbsorberSpec(strength=1.0)


class TestStep:
    """Test cases for a single split-operator step."""

    def test_plane_wave_phase(self):
        """A single Fourier mode only picks up exp(-i k^2 dt / 2)."""
        grid = make_grid(0.0, 10.0, 64)
        k = 2.0 * np.pi * 3 / 10.0
        dt = 0.01
        state = WavefunctionState(np.exp(1j * k * grid.positions))
        advanced = step(state, np.zeros(64), kinetic_phase(grid, dt), np.ones(64), None, dt)
        expected = state.amplitudes * np.exp(-1j * k ** 2 * dt / 2.0)
        np.testing.assert_allclose(advanced.amplitudes, expected, atol=1e-12)
        assert advanced.time == pytest.approx(dt)

    def test_constant_potential_is_global_phase(self):
        """V = c only multiplies the free result by exp(-i c dt)."""
        grid = make_grid(-30.0, 30.0, 2048)
        dt = 0.0005
        state = gaussian_packet(WavepacketSpec(x0=-8.0, k0=4.0, sigma=0.8), grid)
        phase = kinetic_phase(grid, dt)
        free = step(state, np.zeros(2048), phase, np.ones(2048), None, dt)
        shifted = step(state, np.full(2048, 3.0), phase, np.ones(2048), None, dt)
        np.testing.assert_allclose(shifted.density, free.density, atol=1e-12)
        np.testing.assert_allclose(shifted.amplitudes, free.amplitudes * np.exp(-3.0j * dt), atol=1e-12)

    def test_unitarity_without_mask(self):
        """200 steps with M = 1 keep the norm to 1e-10."""
        grid = make_grid(-30.0, 30.0, 2048)
        dt = 0.0005
        samples = sample_potential(GaussianBarrier(v0=4.0, sigma_v=0.8), grid)
        phase = kinetic_phase(grid, dt)
        state = gaussian_packet(WavepacketSpec(x0=-8.0, k0=3.5, sigma=0.6), grid)
        for _ in range(200):
            state = step(state, samples, phase, np.ones(2048), None, dt)
        assert abs(norm(state, grid) - 1.0) < 1e-10

    def test_time_reversal(self):
        """Stepping forward then backward recovers the initial state."""
        grid = make_grid(-30.0, 30.0, 2048)
        dt = 0.0005
        samples = sample_potential(GaussianBarrier(v0=4.0, sigma_v=0.8), grid)
        initial = gaussian_packet(WavepacketSpec(x0=-2.0, k0=3.5, sigma=0.6), grid)
        state = initial
        forward, backward = kinetic_phase(grid, dt), kinetic_phase(grid, -dt)
        for _ in range(100):
            state = step(state, samples, forward, np.ones(2048), None, dt)
        for _ in range(100):
            state = step(state, samples, backward, np.ones(2048), None, -dt)
        np.testing.assert_allclose(state.amplitudes, initial.amplitudes, atol=1e-8)

    def test_free_spreading(self):
        """A resting packet spreads as sigma sqrt(1 + (t / 2 sigma^2)^2) over three spreading times."""
        grid = make_grid(-30.0, 30.0, 2048)
        dt = 0.005
        spec = WavepacketSpec(x0=0.0, k0=0.0, sigma=1.0)
        state = gaussian_packet(spec, grid)
        phase = kinetic_phase(grid, dt)
        per_spreading_time = int(round(spreading_time(spec) / dt))
        for multiple in (1, 2, 3):
            for _ in range(per_spreading_time):
                state = step(state, np.zeros(2048), phase, np.ones(2048), None, dt)
            t = multiple * spreading_time(spec)
            assert position_spread(state, grid) == pytest.approx(analytic_width(spec, t), rel=1e-2)

    def test_current_continuity(self):
        """The density change over a short step matches -dJ/dx."""
        grid = make_grid(-20.0, 20.0, 512)
        dt = 1e-4
        samples = sample_potential(GaussianBarrier(v0=2.0, sigma_v=1.0), grid)
        state = gaussian_packet(WavepacketSpec(x0=-1.0, k0=2.0, sigma=1.0), grid)
        ones = np.ones(512)
        later = step(state, samples, kinetic_phase(grid, dt), ones, None, dt)
        earlier = step(state, samples, kinetic_phase(grid, -dt), ones, None, -dt)
        rate = (later.density - earlier.density) / (2.0 * dt)
        divergence = spectral_derivative(probability_current(state, grid), grid).real
        assert np.max(np.abs(rate)) > 0.1
        np.testing.assert_allclose(rate, -divergence, atol=1e-6)

    def test_second_order_convergence(self):
        """Halving dt divides the error by about four."""
        grid = make_grid(-20.0, 20.0, 512)
        samples = sample_potential(GaussianBarrier(v0=2.0, sigma_v=1.0), grid)
        initial = gaussian_packet(WavepacketSpec(x0=-3.0, k0=2.0, sigma=1.0), grid)
        t_final = 0.4

        def run(dt: float) -> np.ndarray:
            state = initial
            phase = kinetic_phase(grid, dt)
            for _ in range(int(round(t_final / dt))):
                state = step(state, samples, phase, np.ones(512), None, dt)
            return state.amplitudes

        reference = run(0.01 / 16)
        errors = [np.sqrt(np.sum(np.abs(run(dt) - reference) ** 2) * grid.dx) for dt in (0.04, 0.02, 0.01)]
        for coarse, fine in zip(errors, errors[1:]):
            assert 3.2 <= coarse / fine <= 4.8


class TestDephasing:
    """Test cases for apply_dephasing."""

    def test_zero_rate_is_identity(self):
        """gamma = 0 returns the state unchanged."""
        state = WavefunctionState(np.ones(16))
        assert apply_dephasing(state, 0.0, 0.01, np.random.default_rng(1)) is state

    def test_preserves_modulus(self):
        """Dephasing only rotates phases."""
        grid = make_grid(-30.0, 30.0, 2048)
        state = gaussian_packet(WavepacketSpec(x0=0.0, k0=1.0, sigma=1.0), grid)
        dephased = apply_dephasing(state, 0.5, 0.01, np.random.default_rng(7))
        np.testing.assert_allclose(np.abs(dephased.amplitudes), np.abs(state.amplitudes), rtol=1e-12)

    def test_phase_variance(self):
        """Kick phases have variance 2 gamma dt."""
        state = WavefunctionState(np.ones(2048))
        dephased = apply_dephasing(state, 1.0, 0.0005, np.random.default_rng(11))
        assert np.var(np.angle(dephased.amplitudes)) == pytest.approx(0.001, rel=0.2)

    def test_coherence_time(self):
        """T2 = 1/gamma; None without dephasing."""
        assert DephasingSpec(gamma=0.5).coherence_time == 2.0
        assert DephasingSpec().coherence_time is None
        assert not DephasingSpec().active

    def test_step_requires_stream(self):
        """Active dephasing without a caller-owned stream is refused."""
        grid = make_grid(-20.0, 20.0, 256)
        state = gaussian_packet(WavepacketSpec(x0=0.0, k0=1.0, sigma=1.0), grid)
        with pytest.raises(ContractError):
            step(state, np.zeros(256), kinetic_phase(grid, 0.01), np.ones(256), DephasingSpec(gamma=0.5), 0.01)

    def test_consecutive_steps_draw_new_kicks(self):
        """Two steps sharing one stream apply different phase kicks to the same input."""
        grid = make_grid(-20.0, 20.0, 256)
        state = gaussian_packet(WavepacketSpec(x0=0.0, k0=1.0, sigma=1.0), grid)
        phase, ones = kinetic_phase(grid, 0.01), np.ones(256)
        dephasing = DephasingSpec(gamma=0.5, seed=3)
        rng = np.random.default_rng(dephasing.seed)
        coherent = step(state, np.zeros(256), phase, ones, None, 0.01)
        first = step(state, np.zeros(256), phase, ones, dephasing, 0.01, rng)
        second = step(state, np.zeros(256), phase, ones, dephasing, 0.01, rng)
        kicks_first = np.angle(first.amplitudes / coherent.amplitudes)
        kicks_second = np.angle(second.amplitudes / coherent.amplitudes)
        assert np.std(kicks_first) > 0.0
        assert not np.allclose(kicks_first, kicks_second)


class TestTimeStepping:
    """Test cases for TimeSteppingSpec."""

    def test_auto_stride(self):
        """'auto' targets about 200 frames."""
        spec = TimeSteppingSpec(dt=0.0005, t_final=6.0, snapshot_stride='auto')
        assert spec.n_steps == 12000
        assert spec.stride == 60

    def test_short_run_stride(self):
        """Runs under 200 steps keep every frame."""
        assert TimeSteppingSpec(dt=0.01, t_final=0.5).stride == 1

    def test_final_time_below_step(self):
        """t_final must cover at least one step."""
        with pytest.raises(ValidationError):
            TimeSteppingSpec(dt=0.1, t_final=0.05)


class TestEvolve:
    """Test cases for full evolutions."""

    def test_frames_and_scalars(self):
        """Frames at t = 0, every stride and the end; scalars every step."""
        trajectory = evolve(small_config())
        assert len(trajectory) == 11
        assert trajectory.scalars.shape == (101, 5)
        assert trajectory.times[0] == 0.0
        assert trajectory.times[-1] == pytest.approx(0.5)
        assert trajectory.grid == make_grid(-20.0, 20.0, 256)

    def test_norm_bookkeeping(self):
        """Norm plus absorbed probability stays at 1."""
        trajectory = evolve(small_config())
        residual = trajectory.scalars[:, NORM] + trajectory.absorbed_history - 1.0
        assert np.max(np.abs(residual)) < 1e-9

    def test_absorption_is_monotone(self):
        """A packet running into the layer loses norm step after step."""
        config = small_config(
            wavepacket={'x0': 10.0, 'k0': 5.0, 'sigma': 1.0},
            potential={'kind': 'free'},
            absorber={'layer_width': 3.0, 'strength': 0.5},
            stepping={'dt': 0.005, 't_final': 3.0},
        )
        trajectory = evolve(config)
        assert np.all(np.diff(trajectory.absorbed_history) >= -1e-14)
        assert trajectory.absorbed > 0.1

    def test_dephasing_is_reproducible(self):
        """Equal seeds give bit-identical runs, different seeds do not."""
        config = small_config(dephasing={'gamma': 0.5, 'seed': 3})
        first, second = evolve(config), evolve(config)
        other = evolve(config.with_seed(4))
        np.testing.assert_array_equal(first.frames[-1][1], second.frames[-1][1])
        assert not np.array_equal(first.frames[-1][1], other.frames[-1][1])

    def test_mirror_symmetry(self):
        """Mirroring x0 and k0 across a symmetric barrier swaps T and R."""
        config = small_config(stepping={'dt': 0.005, 't_final': 4.0})
        mirrored = small_config(wavepacket={'x0': 5.0, 'k0': -2.0, 'sigma': 1.0}, stepping={'dt': 0.005, 't_final': 4.0})
        forward = build_run_report(config, evolve(config)).scattering
        backward = build_run_report(mirrored, evolve(mirrored)).scattering
        assert forward.transmission > 0.05 and forward.reflection > 0.05
        assert backward.transmission == pytest.approx(forward.reflection, abs=1e-6)
        assert backward.reflection == pytest.approx(forward.transmission, abs=1e-6)

    def test_non_finite_amplitudes_abort(self):
        """A NaN potential stops the run at the first step."""
        config = small_config(potential={'kind': 'tabulated', 'positions': [-100.0, 100.0], 'values': [float('nan')] * 2})
        with pytest.raises(PropagationError) as info:
            evolve(config)
        assert info.value.step_index == 1

    def test_propagator_records(self):
        """record() reports time, norm, energies and center of mass."""
        grid = make_grid(-20.0, 20.0, 256)
        propagator = SplitOperatorPropagator(grid, FreePotential(), 0.005)
        state = gaussian_packet(WavepacketSpec(x0=-5.0, k0=2.0, sigma=1.0), grid)
        time, total, kinetic, potential, center = propagator.record(state)
        assert time == 0.0
        assert total == pytest.approx(1.0, abs=1e-12)
        assert kinetic == pytest.approx(2.125, rel=1e-3)
        assert potential == 0.0
        assert center == pytest.approx(-5.0, abs=1e-6)
