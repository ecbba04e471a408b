"""Backend selection for the per-sample transmittance kernel.

The compiled Cython module is used when importable; otherwise, or when the
``ATMOQKD_PURE_PYTHON`` environment variable is set to a non-empty value,
the NumPy implementation in ``_pykernels`` is used.
"""
from __future__ import annotations

import importlib
import os

from . import _pykernels

__all__ = ["BACKEND", "elliptical_transmittance", "centered_transmittance", "get_backend"]


def get_backend(name: str):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("atmoqkd._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("ATMOQKD_PURE_PYTHON"):
        return "python", _pykernels
    try:
        return "cython", get_backend("cython")
    except ImportError:
        return "python", _pykernels


BACKEND, _impl = _select()

elliptical_transmittance = _impl.elliptical_transmittance
centered_transmittance = _impl.centered_transmittance
