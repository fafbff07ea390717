"""Optional numba acceleration.

Set ``CVBENCH_DISABLE_NUMBA=1`` before import to force the pure-numpy paths.
"""

from __future__ import annotations

import os

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("CVBENCH_DISABLE_NUMBA", "0").lower() not in (
    "1",
    "true",
    "yes",
)


def optional_njit(*args, **kwargs):
    """``numba.njit`` when available, identity otherwise."""

    def decorator(func):
        if NUMBA_AVAILABLE:
            return _njit(*args, **kwargs)(func)
        return func

    return decorator
