"""Closed-form plane-wave and semiclassical (WKB) transmission references."""

from typing import Callable, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import bisect

from ..utils.errors import RegimeError
from .potentials import PotentialBase

TURNING_POINT_XTOL = 1e-10
BRACKET_STEP = 1e-3
BRACKET_CHUNK = 4096
MAX_BRACKET_DISTANCE = 1e4
SIMPSON_RTOL = 1e-8
SIMPSON_MAX_DEPTH = 50


class ReferenceResult(BaseModel):
    """Reference transmission with the regime and method that produced it."""

    transmission: float
    regime: Literal['over_barrier', 'sub_barrier']
    method: Literal['plane_wave', 'wkb']
    energy: float
    turning_points: Optional[Tuple[float, float]] = None
    action: Optional[float] = None


def plane_wave_transmission(energy: float, v0: float, width: float, mass: float = 1.0) -> ReferenceResult:
    """
    Stationary transmission through a rectangular barrier.

    Above the barrier T = [1 + V0^2 sin^2(q a) / (4E(E - V0))]^-1 with
    q = sqrt(2m(E - V0)); below it sin becomes sinh with kappa = sqrt(2m(V0 - E));
    at E = V0 the common limit [1 + m V0 a^2 / 2]^-1 is used.

    Args:
        energy: Incident energy, > 0
        v0: Barrier height
        width: Barrier width a
        mass: Particle mass

    Returns:
        ReferenceResult

    Raises:
        RegimeError: If the energy is not positive
    """
    if not energy > 0:
        raise RegimeError(f"energy must be positive, got {energy}")

    if energy == v0:
        transmission = 1.0 / (1.0 + mass * v0 * width ** 2 / 2.0)
        regime = 'over_barrier'
    elif energy > v0:
        q = np.sqrt(2.0 * mass * (energy - v0))
        transmission = 1.0 / (1.0 + v0 ** 2 * np.sin(q * width) ** 2 / (4.0 * energy * (energy - v0)))
        regime = 'over_barrier'
    else:
        kappa = np.sqrt(2.0 * mass * (v0 - energy))
        transmission = 1.0 / (1.0 + v0 ** 2 * np.sinh(kappa * width) ** 2 / (4.0 * energy * (v0 - energy)))
        regime = 'sub_barrier'

    return ReferenceResult(transmission=float(transmission), regime=regime, method='plane_wave', energy=energy)


def wkb_transmission(potential: PotentialBase, energy: float, mass: float = 1.0) -> ReferenceResult:
    """
    Semiclassical tunneling probability exp(-2 int sqrt(2m(V - E)) dx) between the turning points.

    Args:
        potential: Potential spec (the static profile at t = 0 is used)
        energy: Incident energy, 0 < E < max V
        mass: Particle mass

    Returns:
        ReferenceResult with turning points and the action integral

    Raises:
        RegimeError: If E >= max V or E <= 0
    """
    if not energy > 0:
        raise RegimeError(f"energy must be positive, got {energy}")
    if energy >= potential.peak_value():
        raise RegimeError(
            f"not in tunneling regime: E = {energy} >= max V = {potential.peak_value()}"
        )

    def excess(x: float) -> float:
        return float(potential.evaluate(np.array([x]))[0]) - energy

    center = potential.peak_location()
    left = _turning_point(potential, energy, excess, center, -1.0)
    right = _turning_point(potential, energy, excess, center, 1.0)

    def integrand(x: float) -> float:
        return np.sqrt(2.0 * mass * max(excess(x), 0.0))

    action = adaptive_simpson(integrand, left, right, SIMPSON_RTOL)
    return ReferenceResult(
        transmission=float(np.exp(-2.0 * action)),
        regime='sub_barrier',
        method='wkb',
        energy=energy,
        turning_points=(left, right),
        action=action,
    )


def _turning_point(
    potential: PotentialBase, energy: float, excess: Callable[[float], float], center: float, direction: float
) -> float:
    # walk outward in BRACKET_STEP increments until V drops below E, then bisect
    offset = 0.0
    while offset < MAX_BRACKET_DISTANCE:
        scan = center + direction * (offset + BRACKET_STEP * np.arange(1, BRACKET_CHUNK + 1))
        below = np.flatnonzero(potential.evaluate(scan) < energy)
        if below.size:
            outer = float(scan[below[0]])
            inner = outer - direction * BRACKET_STEP
            return float(bisect(excess, inner, outer, xtol=TURNING_POINT_XTOL))
        offset += BRACKET_STEP * BRACKET_CHUNK
    raise RegimeError("potential never falls below the energy; no turning point")


def adaptive_simpson(func: Callable[[float], float], a: float, b: float, rtol: float = SIMPSON_RTOL) -> float:
    """
    Adaptive Simpson quadrature of func over [a, b].

    Args:
        func: Scalar integrand
        a: Lower limit
        b: Upper limit
        rtol: Relative tolerance against the coarse whole-interval estimate

    Returns:
        Integral estimate
    """
    if a == b:
        return 0.0
    fa, fb = func(a), func(b)
    m = 0.5 * (a + b)
    fm = func(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tolerance = rtol * max(abs(whole), np.finfo(float).tiny)
    return _simpson_step(func, a, b, fa, fm, fb, whole, tolerance, SIMPSON_MAX_DEPTH)


def _simpson_step(func, a, b, fa, fm, fb, whole, tolerance, depth) -> float:
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = func(lm), func(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tolerance:
        return left + right + delta / 15.0
    return (
        _simpson_step(func, a, m, fa, flm, fm, left, tolerance / 2.0, depth - 1)
        + _simpson_step(func, m, b, fm, frm, fb, right, tolerance / 2.0, depth - 1)
    )
