"""Truncated Fock-space states and single-mode operator algebra.

Conventions: ``[a, a^dag] = 1``, ``x = (a + a^dag)/sqrt(2)``,
``p = (a - a^dag)/(i sqrt(2))``, so a complex amplitude ``alpha`` corresponds
to quadrature means ``(x0, p0) = sqrt(2) (Re alpha, Im alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .kernels import displacement_matrix

TAIL_TOL = 1e-8
NORM_TOL = 1e-12
LEAK_TOL = 1e-10
ZERO_TOL = 1e-12
WORK_MARGIN = 16
R_DB_MAX = 12.5
R_MAX = math.log(10.0) / 20.0 * R_DB_MAX


def db_to_r(r_db: float) -> float:
    """Squeezing in decibels to squeeze magnitude: ``r = ln(10)/20 * r_db``."""
    return float(r_db) * math.log(10.0) / 20.0


def r_to_db(r: float) -> float:
    return float(r) * 20.0 / math.log(10.0)


class TruncationError(ValueError):
    """State weight reaches the truncation edge."""


class ZeroStateError(ValueError):
    """An operation annihilated the state."""


@dataclass(frozen=True, eq=False)
class FockVector:
    """Pure state ``sum_n amplitudes[n] |n>`` for ``n = 0..cutoff``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True).ravel()
        if amps.size < 2:
            raise ValueError("cutoff must be at least 1")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities)))

    def tail_mass(self) -> float:
        p = self.probabilities
        return float(p[-1] + p[-2])

    def __repr__(self):
        return f"FockVector(cutoff={self.cutoff}, mean_photon={mean_photon(self):.6g})"


@dataclass(frozen=True)
class SqueezeParams:
    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r < 0:
            raise ValueError(f"squeeze magnitude must be finite and >= 0, got {self.r}")
        if self.r > R_MAX + 1e-12:
            raise ValueError(f"r={self.r:.6g} exceeds the {R_DB_MAX} dB cap (r <= {R_MAX:.6f})")
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))
        object.__setattr__(self, "r", float(self.r))


def check_tail(state: FockVector, tol: float = TAIL_TOL) -> None:
    """Raise :class:`TruncationError` if the top two levels carry weight ``>= tol``."""
    tail = state.tail_mass()
    if tail >= tol:
        raise TruncationError(
            f"tail mass {tail:.3e} in levels {state.cutoff - 1},{state.cutoff} exceeds {tol:.0e}; "
            "raise the cutoff"
        )


def _fix_phase(amps: np.ndarray) -> np.ndarray:
    mags = np.abs(amps)
    idx = int(np.argmax(mags > 1e-12 * mags.max()))
    out = amps * (mags[idx] / amps[idx])
    out[idx] = mags[idx]
    return out


def _finish(amps: np.ndarray, guard: bool = True) -> FockVector:
    norm = np.linalg.norm(amps)
    if norm < ZERO_TOL:
        raise ZeroStateError("state vector vanished")
    state = FockVector(_fix_phase(amps / norm))
    if guard:
        check_tail(state)
    return state


def _truncate(work: np.ndarray, cutoff: int) -> np.ndarray:
    kept = work[: cutoff + 1]
    leaked = max(0.0, 1.0 - float(np.vdot(kept, kept).real))
    if leaked > LEAK_TOL:
        raise TruncationError(f"operation pushed weight {leaked:.3e} past cutoff {cutoff}")
    return kept


def truncate_state(state: FockVector, cutoff: int) -> FockVector:
    """Cut ``state`` down to ``cutoff`` under the leak check and tail guard."""
    return _finish(_truncate(np.array(state.amplitudes), cutoff))


def make_fock(n: int, cutoff: int) -> FockVector:
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    if n > cutoff - 2:
        raise TruncationError(f"|{n}> needs cutoff >= {n + 2}, got {cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[n] = 1.0
    return FockVector(amps)


def coherent_amplitudes(alpha: complex, size: int) -> np.ndarray:
    """Closed form ``exp(-|a|^2/2) a^n / sqrt(n!)`` built by ratio recurrence."""
    amps = np.empty(size, dtype=np.complex128)
    amps[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, size):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    return amps


def make_coherent(alpha: complex, cutoff: int) -> FockVector:
    amps = coherent_amplitudes(complex(alpha), cutoff + 1 + WORK_MARGIN)
    return _finish(_truncate(amps, cutoff))


def make_cat(alpha: complex, parity: str, cutoff: int) -> FockVector:
    """Normalised ``|alpha> + |-alpha>`` (even) or ``|alpha> - |-alpha>`` (odd)."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    alpha = complex(alpha)
    if parity == "odd" and abs(alpha) <= 1e-6:
        raise ZeroStateError("odd cat needs |alpha| > 1e-6")
    amps = coherent_amplitudes(alpha, cutoff + 1 + WORK_MARGIN)
    _truncate(amps, cutoff)
    keep = (np.arange(amps.size) % 2) == (0 if parity == "even" else 1)
    amps = np.where(keep, amps, 0.0)[: cutoff + 1]
    return _finish(amps)


def lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), 1)


@lru_cache(maxsize=64)
def squeeze_matrix(r: float, theta: float, dim: int) -> np.ndarray:
    """``S(r, theta)`` restricted to ``dim`` levels via Pade scaling-and-squaring."""
    a = lowering(dim)
    a2 = a @ a
    z = r * np.exp(1j * theta)
    gen = 0.5 * (np.conj(z) * a2 - z * a2.T)
    out = expm(gen)
    out.flags.writeable = False
    return out


def apply_squeeze(state: FockVector, params: SqueezeParams) -> FockVector:
    if params.r == 0.0:
        return state
    dim = state.cutoff + 1 + WORK_MARGIN
    work = np.zeros(dim, dtype=np.complex128)
    work[: state.cutoff + 1] = state.amplitudes
    out = squeeze_matrix(params.r, params.theta, dim) @ work
    return _finish(_truncate(out, state.cutoff))


def make_squeezed_fock(r: float, theta: float, n: int, cutoff: int) -> FockVector:
    return apply_squeeze(make_fock(n, cutoff), SqueezeParams(r, theta))


def annihilate(state: FockVector) -> tuple[FockVector, float]:
    """Apply ``a`` once; returns the normalised result and the pre-normalisation norm."""
    amps = state.amplitudes
    out = np.zeros_like(amps)
    out[:-1] = np.sqrt(np.arange(1, amps.size)) * amps[1:]
    residual = float(np.linalg.norm(out))
    if residual < ZERO_TOL:
        raise ZeroStateError("lowering operator annihilated the state")
    return FockVector(out / residual), residual


def subtract_photons(state: FockVector, k: int) -> FockVector:
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    for _ in range(k):
        state, _ = annihilate(state)
    return _finish(np.array(state.amplitudes), guard=False)


def mean_photon(state: FockVector) -> float:
    return float(np.dot(np.arange(state.cutoff + 1), state.probabilities))


def parity_expectation(state: FockVector) -> float:
    signs = 1.0 - 2.0 * (np.arange(state.cutoff + 1) % 2)
    return float(np.dot(signs, state.probabilities))


def ladder_moments(state: FockVector) -> tuple[complex, complex, float]:
    """``(<a>, <a^2>, <a^dag a>)``."""
    c = state.amplitudes
    n = np.arange(c.size, dtype=np.float64)
    a1 = np.vdot(c[:-1], np.sqrt(n[1:]) * c[1:])
    a2 = np.vdot(c[:-2], np.sqrt(n[1:-1] * n[2:]) * c[2:])
    return complex(a1), complex(a2), mean_photon(state)


def quadrature_variance(state: FockVector, phi: float) -> float:
    """Variance of ``x cos(phi) + p sin(phi)``."""
    a1, a2, nbar = ladder_moments(state)
    rot = np.exp(-1j * phi)
    second = (2.0 * (a2 * rot * rot).real + 2.0 * nbar + 1.0) / 2.0
    first = np.sqrt(2.0) * (a1 * rot).real
    return float(max(second - first * first, 0.0))


def state_fidelity(a: FockVector, b: FockVector) -> float:
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def apply_displacement(state: FockVector, alpha: complex) -> FockVector:
    alpha = complex(alpha)
    if alpha == 0:
        return state
    dim = state.cutoff + 1
    mat = displacement_matrix(alpha, dim + WORK_MARGIN, dim)
    out = _truncate(mat @ state.amplitudes, state.cutoff)
    norm = np.linalg.norm(out)
    result = FockVector(out / norm)
    check_tail(result)
    return result
