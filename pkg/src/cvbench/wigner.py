"""Phase-space sampling of pure-state Wigner functions and negativity.

The production route evaluates the displaced parity
``W(x, p) = <psi| D(2 alpha) Pi |psi> / pi`` with ``alpha = (x + i p)/sqrt(2)``,
which equals ``(1/pi) sum_k (-1)^k |<k|D(-alpha)|psi>|^2`` but needs no
intermediate basis beyond the state's own cutoff. An independent route
transforms the position wavefunction and is kept for cross-checks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .fock import FockVector, check_tail, mean_photon, parity_expectation
from .kernels import displaced_moments, hermite_functions
from .statespec import StateSpec, build_escalating

NORM_WINDOW = (0.995, 1.005)


class WindowWarning(UserWarning):
    """The phase-space window clips a noticeable part of the Wigner function."""


def _axis(half_width: float, points: int) -> np.ndarray:
    # exact zero at the centre and exact mirror symmetry
    h = points // 2
    return half_width * (np.arange(-h, h + 1) / h)


@dataclass(frozen=True)
class PhaseGrid:
    x_min: float = -7.0
    x_max: float = 7.0
    p_min: float = -7.0
    p_max: float = 7.0
    n_x: int = 201
    n_p: int = 201

    def __post_init__(self):
        for n in (self.n_x, self.n_p):
            if n < 3 or n % 2 == 0:
                raise ValueError(f"sample counts must be odd and >= 3, got {n}")
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise ValueError("empty phase-space window")
        if not (np.isclose(self.x_min, -self.x_max) and np.isclose(self.p_min, -self.p_max)):
            raise ValueError("window must be symmetric so the origin is a sample")

    @classmethod
    def square(cls, half_width: float = 7.0, points: int = 201) -> "PhaseGrid":
        return cls(-half_width, half_width, -half_width, half_width, points, points)

    @property
    def xs(self) -> np.ndarray:
        return _axis(self.x_max, self.n_x)

    @property
    def ps(self) -> np.ndarray:
        return _axis(self.p_max, self.n_p)

    @property
    def origin_index(self) -> tuple[int, int]:
        return self.n_x // 2, self.n_p // 2

    def describe(self) -> str:
        return f"[{self.x_min:g},{self.x_max:g}]x[{self.p_min:g},{self.p_max:g}]@{self.n_x}x{self.n_p}"


@dataclass(frozen=True, eq=False)
class WignerField:
    """``values[i, j] = W(xs[i], ps[j])``."""

    grid: PhaseGrid
    values: np.ndarray
    normalization: float = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n_x, self.grid.n_p):
            raise ValueError(f"values shape {vals.shape} does not match grid")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "normalization", _trapz2(vals, self.grid))

    @property
    def window_limited(self) -> bool:
        lo, hi = NORM_WINDOW
        return not (lo <= self.normalization <= hi)

    @property
    def origin_value(self) -> float:
        return float(self.values[self.grid.origin_index])


def _trapz2(values: np.ndarray, grid: PhaseGrid) -> float:
    return float(np.trapezoid(np.trapezoid(values, grid.ps, axis=1), grid.xs))


def wigner_parity(state: FockVector, xs, ps) -> np.ndarray:
    """Displaced-parity evaluation on the outer product of ``xs`` and ``ps``."""
    xs = np.asarray(xs, dtype=np.float64)
    ps = np.asarray(ps, dtype=np.float64)
    betas = np.sqrt(2.0) * (xs[:, None] + 1j * ps[None, :])
    psi = state.amplitudes
    signs = 1.0 - 2.0 * (np.arange(psi.size) % 2)
    vals = displaced_moments(psi, signs * psi, betas).real / np.pi
    return vals.reshape(xs.size, ps.size)


def wigner_wavefunction(state: FockVector, xs, ps, y_max: float = 22.0, dy: float = 0.02) -> np.ndarray:
    """Oracle route: ``(1/pi) int psi*(x+y) psi(x-y) exp(2ipy) dy`` by trapezoid.

    The integrand is smooth and decays like a Gaussian, so the uniform rule
    converges geometrically in ``dy``.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ps = np.asarray(ps, dtype=np.float64)
    ys = np.arange(-y_max, y_max + dy / 2, dy)
    phases = np.exp(2j * np.outer(ys, ps)) * dy
    c = state.amplitudes
    out = np.empty((xs.size, ps.size))
    for i, x in enumerate(xs):
        plus = c @ hermite_functions(state.cutoff, x + ys)
        minus = c @ hermite_functions(state.cutoff, x - ys)
        out[i] = (np.conj(plus) * minus @ phases).real / np.pi
    return out


def wigner_field(state: FockVector, grid: PhaseGrid | None = None, method: str = "parity") -> WignerField:
    grid = grid or PhaseGrid()
    check_tail(state)
    if method == "parity":
        vals = wigner_parity(state, grid.xs, grid.ps)
    elif method == "wavefunction":
        vals = wigner_wavefunction(state, grid.xs, grid.ps)
    else:
        raise ValueError(f"unknown method {method!r}")
    result = WignerField(grid, vals)
    if result.normalization < NORM_WINDOW[0]:
        warnings.warn(
            f"Wigner normalisation {result.normalization:.5f} on {grid.describe()}; window clips the state",
            WindowWarning,
            stacklevel=2,
        )
    return result


def wigner_at_origin(state: FockVector) -> float:
    return parity_expectation(state) / np.pi


def normalization_integral(field: WignerField) -> float:
    return field.normalization


def integrated_negativity(field: WignerField) -> float:
    """Half the excess of ``int |W|`` over ``int W``, floored at zero.

    Equal to ``(int |W| - 1)/2`` whenever the window holds the whole state;
    when it does not, only negative volume outside the window is lost
    instead of the clipped positive bulk as well.
    """
    abs_int = _trapz2(np.abs(field.values), field.grid)
    return max(0.5 * (abs_int - field.normalization), 0.0)


@dataclass(frozen=True)
class Setting:
    grid: PhaseGrid
    cutoff: int


@dataclass(frozen=True)
class ConvergenceReport:
    spec: str
    base: Setting
    refined: Setting
    base_cutoff_used: int
    refined_cutoff_used: int
    delta_base: float
    delta_refined: float
    mean_photon_base: float
    mean_photon_refined: float
    window_limited: bool

    @property
    def delta_change(self) -> float:
        return abs(self.delta_refined - self.delta_base)

    @property
    def delta_per_n_change(self) -> float:
        if self.mean_photon_base <= 0 or self.mean_photon_refined <= 0:
            return 0.0
        return abs(self.delta_refined / self.mean_photon_refined - self.delta_base / self.mean_photon_base)


def _finer(base: Setting, refined: Setting) -> bool:
    b, r = base.grid, refined.grid
    not_coarser = (
        r.n_x >= b.n_x
        and r.n_p >= b.n_p
        and r.x_max >= b.x_max
        and r.p_max >= b.p_max
        and refined.cutoff >= base.cutoff
    )
    return not_coarser and (r != b or refined.cutoff > base.cutoff)


def convergence_probe(spec: StateSpec, base: Setting, refined: Setting) -> ConvergenceReport:
    """Recompute negativity under a finer/larger setting and report the change."""
    if not _finer(base, refined):
        raise ValueError("refined setting must be at least as fine and large as base, and differ from it")
    stats = []
    for setting in (base, refined):
        state = build_escalating(spec.with_cutoff(setting.cutoff))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WindowWarning)
            fld = wigner_field(state, setting.grid)
        stats.append((state.cutoff, integrated_negativity(fld), mean_photon(state), fld.window_limited))
    (c0, d0, n0, w0), (c1, d1, n1, w1) = stats
    return ConvergenceReport(str(spec), base, refined, c0, c1, d0, d1, n0, n1, w0 or w1)
