"""Matched-energy benchmarking of non-Gaussian single-mode optical states."""

__version__ = "0.1.0"

from .fock import (  # noqa: E402
    FockVector,
    SqueezeParams,
    TruncationError,
    ZeroStateError,
    annihilate,
    apply_displacement,
    apply_squeeze,
    db_to_r,
    make_cat,
    make_coherent,
    make_fock,
    make_squeezed_fock,
    mean_photon,
    parity_expectation,
    quadrature_variance,
    r_to_db,
    state_fidelity,
    subtract_photons,
)
from .statespec import StateSpec, parse_spec  # noqa: E402
