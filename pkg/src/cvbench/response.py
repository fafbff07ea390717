"""Directional displacement response.

``epsilon`` is always the complex displacement amplitude in
``D(epsilon e^{i phi})``; a real amplitude ``epsilon`` shifts the ``x``
quadrature mean by ``sqrt(2) epsilon``. Under this convention
``1 - F(epsilon e^{i phi}) ~ 2 Var(x_{phi + pi/2}) epsilon**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockVector, check_tail
from .kernels import displaced_moments

DEFAULT_THRESHOLD = 0.90
DEFAULT_EPS_MAX = 2.0
DEFAULT_EPS_STEPS = 201
DEFAULT_ANGLES = 72
SLOPE_WINDOW = 0.02
SLOPE_POINTS = 8


@dataclass(frozen=True, eq=False)
class FidelityScan:
    phi: float
    epsilons: np.ndarray
    fidelities: np.ndarray


@dataclass(frozen=True)
class RadiusResult:
    radius: float
    is_lower_bound: bool
    threshold: float


@dataclass(frozen=True, eq=False)
class PolarContour:
    angles: np.ndarray
    radii: tuple[RadiusResult, ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([r.radius for r in self.radii])

    @property
    def has_lower_bounds(self) -> bool:
        return any(r.is_lower_bound for r in self.radii)

    @property
    def r_max(self) -> float:
        return float(self.values.max())

    @property
    def r_min(self) -> float:
        return float(self.values.min())

    @property
    def anisotropy(self) -> float:
        """``R_max / R_min``; NaN when any direction only has a lower bound."""
        if self.has_lower_bounds:
            return float("nan")
        return self.r_max / self.r_min

    def scaled(self, factor: float) -> "PolarContour":
        radii = tuple(RadiusResult(r.radius * factor, r.is_lower_bound, r.threshold) for r in self.radii)
        return PolarContour(self.angles, radii)


@dataclass(frozen=True)
class SectorResult:
    sector_measure: float
    predicate: str
    bin_width: float

    @property
    def uncertainty(self) -> float:
        return self.bin_width


def displacement_fidelities(state: FockVector, alphas) -> np.ndarray:
    check_tail(state)
    alphas = np.asarray(alphas, dtype=np.complex128)
    psi = state.amplitudes
    overlap = displaced_moments(psi, psi, alphas)
    return np.abs(overlap.reshape(alphas.shape)) ** 2


def displacement_fidelity(state: FockVector, alpha: complex) -> float:
    """``|<psi|D(alpha)|psi>|^2``."""
    return float(displacement_fidelities(state, [alpha])[0])


def fidelity_scan(
    state: FockVector, phi: float, eps_max: float = DEFAULT_EPS_MAX, steps: int = DEFAULT_EPS_STEPS
) -> FidelityScan:
    if steps < 32:
        raise ValueError("a fidelity scan needs at least 32 steps")
    eps = np.linspace(0.0, eps_max, steps)
    fid = displacement_fidelities(state, eps * np.exp(1j * phi))
    return FidelityScan(float(phi), eps, fid)


def threshold_radius(scan: FidelityScan, threshold: float = DEFAULT_THRESHOLD) -> RadiusResult:
    """Linearly interpolated epsilon of the first drop below ``threshold``.

    Later revivals are ignored. Without a crossing the scan end is returned
    as a lower bound.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    eps, fid = scan.epsilons, scan.fidelities
    below = np.flatnonzero(fid < threshold)
    if below.size == 0:
        return RadiusResult(float(eps[-1]), True, threshold)
    i = int(below[0])
    if i == 0:
        return RadiusResult(0.0, False, threshold)
    f0, f1 = fid[i - 1], fid[i]
    t = (f0 - threshold) / (f0 - f1)
    return RadiusResult(float(eps[i - 1] + t * (eps[i] - eps[i - 1])), False, threshold)


def axis_radii(
    state: FockVector,
    threshold: float = DEFAULT_THRESHOLD,
    eps_max: float = DEFAULT_EPS_MAX,
    steps: int = DEFAULT_EPS_STEPS,
) -> tuple[RadiusResult, RadiusResult]:
    """``(R_x, R_p)`` = radii along ``phi = 0`` and ``phi = pi/2``."""
    r_x = threshold_radius(fidelity_scan(state, 0.0, eps_max, steps), threshold)
    r_p = threshold_radius(fidelity_scan(state, math.pi / 2, eps_max, steps), threshold)
    return r_x, r_p


def polar_scans(
    state: FockVector, n_angles: int = DEFAULT_ANGLES, eps_max: float = DEFAULT_EPS_MAX, steps: int = DEFAULT_EPS_STEPS
) -> list[FidelityScan]:
    if n_angles < 8:
        raise ValueError("need at least 8 angles")
    if steps < 32:
        raise ValueError("a fidelity scan needs at least 32 steps")
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    eps = np.linspace(0.0, eps_max, steps)
    fid = displacement_fidelities(state, np.exp(1j * angles)[:, None] * eps[None, :])
    return [FidelityScan(float(a), eps, row) for a, row in zip(angles, fid)]


def polar_contour(
    state: FockVector,
    n_angles: int = DEFAULT_ANGLES,
    threshold: float = DEFAULT_THRESHOLD,
    eps_max: float = DEFAULT_EPS_MAX,
    steps: int = DEFAULT_EPS_STEPS,
) -> PolarContour:
    scans = polar_scans(state, n_angles, eps_max, steps)
    angles = np.array([s.phi for s in scans])
    return PolarContour(angles, tuple(threshold_radius(s, threshold) for s in scans))


def small_displacement_slope(
    state: FockVector, phi: float, window: float = SLOPE_WINDOW, points: int = SLOPE_POINTS
) -> float:
    """Least-squares slope through the origin of ``1 - F`` against ``epsilon**2``."""
    eps = np.linspace(window / points, window, points)
    loss = 1.0 - displacement_fidelities(state, eps * np.exp(1j * phi))
    e2 = eps**2
    return float(np.dot(e2, loss) / np.dot(e2, e2))


def _check_angles(test: PolarContour, ref: PolarContour) -> float:
    if test.angles.shape != ref.angles.shape or not np.allclose(test.angles, ref.angles):
        raise ValueError("contours must share one angle set")
    return 2 * np.pi / test.angles.size


def advantage_sector(test: PolarContour, ref: PolarContour) -> SectorResult:
    """Angular measure where the test radius strictly exceeds the reference."""
    width = _check_angles(test, ref)
    count = int(np.count_nonzero(test.values > ref.values))
    return SectorResult(count * width, "adv", width)


def tolerance_sector(test: PolarContour, ref: PolarContour, eta: float) -> SectorResult:
    """Angular measure where the test radius is at least ``eta`` times the reference."""
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")
    width = _check_angles(test, ref)
    count = int(np.count_nonzero(test.values >= eta * ref.values))
    return SectorResult(count * width, f"tolerance({eta:g})", width)
