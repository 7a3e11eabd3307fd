"""Kernel backend selection: numba-jitted kernels with a numpy fallback.

The default backend is numba when importable.  Set the environment variable
``RADIAL_TOEPLITZ_BACKEND=numpy`` (or ``numba``) before import to pin one, or
call :func:`set_backend` at runtime (used by the benchmark harness and tests).
"""

from __future__ import annotations

import os
import warnings

from . import _kernels_numpy

_ENV_VAR = "RADIAL_TOEPLITZ_BACKEND"
_BACKENDS = {"numpy": _kernels_numpy}
_active = _kernels_numpy


def _load_numba_backend():
    if "numba" in _BACKENDS:
        return _BACKENDS["numba"]
    from . import _kernels_numba
    _BACKENDS["numba"] = _kernels_numba
    return _kernels_numba


def set_backend(name: str):
    """Select the kernel backend ('numba' or 'numpy'); returns the module."""
    global _active
    if name == "numpy":
        _active = _BACKENDS["numpy"]
    elif name == "numba":
        _active = _load_numba_backend()
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    return _active


def get_backend() -> str:
    return _active.NAME


def kernels():
    """The active kernel module (eval_program, bessel tails, osc segments)."""
    return _active


def _init_from_env():
    choice = os.environ.get(_ENV_VAR, "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        warnings.warn(f"{_ENV_VAR}={choice!r} not recognized; using numpy")
        choice = "numpy"
    if choice == "numba":
        try:
            set_backend("numba")
        except ImportError:
            warnings.warn("numba not importable; falling back to numpy kernels")
            set_backend("numpy")
    else:
        set_backend("numpy")


_init_from_env()
