"""Iteration-kernel backend selection.

The hot per-iteration loops exist twice: numba-jitted scalar kernels
(kernels_numba) and a vectorized pure-numpy fallback (kernels_numpy).
Both implement identical semantics; the env var OADMM_BACKEND forces one
('numba' or 'numpy'), otherwise numba is used when importable.
"""

from __future__ import annotations

import os

ENV_VAR = "OADMM_BACKEND"

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False


def default_backend() -> str:
    forced = os.environ.get(ENV_VAR, "").strip().lower()
    if forced:
        if forced not in ("numba", "numpy"):
            raise ValueError(f"{ENV_VAR}={forced!r}: expected 'numba' or 'numpy'")
        if forced == "numba" and not NUMBA_AVAILABLE:
            raise RuntimeError(f"{ENV_VAR}=numba but numba is not importable")
        return forced
    return "numba" if NUMBA_AVAILABLE else "numpy"


def get_kernels(backend: str | None = None):
    """Return the kernel module for the requested (or default) backend."""
    name = backend if backend is not None else default_backend()
    if name == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba backend requested but numba is not importable")
        from . import kernels_numba

        return kernels_numba
    if name == "numpy":
        from . import kernels_numpy

        return kernels_numpy
    raise ValueError(f"unknown backend {name!r}")
