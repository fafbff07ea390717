"""Hot numeric kernels.

Every kernel here has a numba implementation and a vectorised numpy
implementation with identical semantics. The public names dispatch on
``cvbench._accel.USE_NUMBA``; the private ``*_numba`` / ``*_numpy`` variants
stay importable so tests and the benchmark script can compare them.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, optional_njit


def _pair_tables(psi, weights):
    """Index-pair products along each diagonal ``m = n + k`` of the lower triangle.

    ``lower[k, n] = conj(psi[n+k]) * weights[n]`` and
    ``upper[k, n] = (-1)**k conj(psi[n]) * weights[n+k]`` (zero for k = 0);
    ``upper`` carries the elements above the diagonal via
    ``D[n, n+k] = (-1)**k conj(D[n+k, n])``.
    """
    dim = psi.shape[0]
    lower = np.zeros((dim, dim), dtype=np.complex128)
    upper = np.zeros((dim, dim), dtype=np.complex128)
    pc = psi.conj()
    for k in range(dim):
        lower[k, : dim - k] = pc[k:] * weights[: dim - k]
        if k:
            upper[k, : dim - k] = (-1) ** k * pc[: dim - k] * weights[k:]
    return lower, upper


def _recurrence_tables(dim):
    n = np.arange(dim, dtype=np.float64)[None, :]
    k = np.arange(dim, dtype=np.float64)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / np.sqrt(n * (n + k))
        lin = (2.0 * n - 1.0 + k) * inv
        back = np.sqrt((n - 1.0) * (n + k - 1.0)) * inv
    # n = 1 seeds from r_0 = 1: r_1 = (1 + k - x) / sqrt(k + 1)
    inv[:, 0] = lin[:, 0] = back[:, 0] = 0.0
    back[:, 1:2] = 0.0
    return lin, inv, back


@optional_njit(cache=True, nogil=True)
def _displaced_moments_numba(lower, upper, lin, inv, back, betas):
    dim = lower.shape[0]
    out = np.empty(betas.shape[0], dtype=np.complex128)
    for j in range(betas.shape[0]):
        beta = betas[j]
        x = beta.real * beta.real + beta.imag * beta.imag
        col = complex(math.exp(-0.5 * x))
        acc = 0j
        for k in range(dim):
            if k > 0:
                col = col * beta / math.sqrt(k)
            r0 = 1.0
            s_lo = lower[k, 0]
            s_up = upper[k, 0]
            if dim - k > 1:
                r1 = (1.0 + k - x) / math.sqrt(k + 1.0)
                s_lo += r1 * lower[k, 1]
                s_up += r1 * upper[k, 1]
                for n in range(2, dim - k):
                    r2 = (lin[k, n] - x * inv[k, n]) * r1 - back[k, n] * r0
                    s_lo += r2 * lower[k, n]
                    s_up += r2 * upper[k, n]
                    r0 = r1
                    r1 = r2
            acc += col * s_lo + col.conjugate() * s_up
        out[j] = acc
    return out


def _displaced_moments_numpy(lower, upper, lin, inv, back, betas):
    dim = lower.shape[0]
    x = np.abs(betas) ** 2
    col = np.exp(-0.5 * x).astype(np.complex128)
    acc = np.zeros(betas.shape[0], dtype=np.complex128)
    for k in range(dim):
        if k > 0:
            col = col * betas / np.sqrt(k)
        r0 = np.ones_like(x)
        s_lo = np.full(x.shape, lower[k, 0])
        s_up = np.full(x.shape, upper[k, 0])
        if dim - k > 1:
            r1 = (1.0 + k - x) / np.sqrt(k + 1.0)
            s_lo = s_lo + r1 * lower[k, 1]
            s_up = s_up + r1 * upper[k, 1]
            for n in range(2, dim - k):
                r0, r1 = r1, (lin[k, n] - x * inv[k, n]) * r1 - back[k, n] * r0
                s_lo += r1 * lower[k, n]
                s_up += r1 * upper[k, n]
        acc += col * s_lo + col.conj() * s_up
    return acc


SUPPORT_TOL = 1e-15


def _support(v, tol=SUPPORT_TOL) -> int:
    """Length of the shortest prefix whose discarded tail has norm below ``tol``."""
    tail = np.sqrt(np.cumsum(np.abs(v[::-1]) ** 2))[::-1]
    keep = np.flatnonzero(tail >= tol)
    return int(keep[-1]) + 1 if keep.size else 1


def displaced_moments(psi, weights, betas):
    """Evaluate ``sum_{m,n} conj(psi[m]) weights[n] <m|D(beta)|n>`` per beta.

    Matrix elements on and below the diagonal come from the normalised
    three-term Laguerre recurrence along each diagonal ``m = n + k``; the
    rest follow by symmetry. Everything along a diagonal shares the phase
    ``beta**k``, so the recurrence itself runs in real arithmetic.

    Parameters
    ----------
    psi : complex ndarray, shape (dim,)
    weights : complex ndarray, shape (dim,)
        ``psi`` itself gives ``<psi|D(beta)|psi>``; ``(-1)**n * psi`` gives the
        displaced-parity form used for Wigner sampling.
    betas : complex ndarray
        Flattened before evaluation.
    """
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    betas = np.ascontiguousarray(np.ravel(betas), dtype=np.complex128)
    # D is unitary, so a dropped tail of norm t moves each result by at most ~t
    dim = max(_support(psi), _support(weights))
    psi, weights = psi[:dim], weights[:dim]
    lower, upper = _pair_tables(psi, weights)
    tables = _recurrence_tables(psi.shape[0])
    if USE_NUMBA:
        return _displaced_moments_numba(lower, upper, *tables, betas)
    return _displaced_moments_numpy(lower, upper, *tables, betas)


def displacement_matrix(beta: complex, rows: int, cols: int) -> np.ndarray:
    """Dense ``<m|D(beta)|n>`` for ``m < rows``, ``n < cols``."""
    beta = complex(beta)
    dim = max(rows, cols)
    x = abs(beta) ** 2
    full = np.zeros((dim, dim), dtype=np.complex128)
    col = complex(np.exp(-0.5 * x))
    for k in range(dim):
        if k:
            col *= beta / np.sqrt(k)
        r0, r1 = 1.0, (1.0 + k - x) / np.sqrt(k + 1.0)
        full[k, 0] = col
        if dim - k > 1:
            full[k + 1, 1] = col * r1
        for n in range(2, dim - k):
            r0, r1 = r1, (2 * n - 1 + k - x) / np.sqrt(n * (n + k)) * r1 - np.sqrt(
                (n - 1) * (n + k - 1) / (n * (n + k))
            ) * r0
            full[n + k, n] = col * r1
    iu = np.triu_indices(dim, 1)
    sign = (-1.0) ** (iu[1] - iu[0])
    full[iu] = sign * full.T[iu].conj()
    return full[:rows, :cols]


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised oscillator eigenfunctions ``phi_n(x)`` for ``n <= n_max``.

    Uses the upward recurrence on the normalised functions, which avoids the
    factorial overflow of ``H_n(x) / sqrt(2**n n!)`` near n ~ 170.
    Returns an array of shape ``(n_max + 1, len(x))``.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max + 1,) + x.shape, dtype=np.float64)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(2, n_max + 1):
        out[n] = np.sqrt(2.0 / n) * x * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out
