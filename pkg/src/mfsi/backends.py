"""Kernel backend selection.

The compiled extension is preferred when importable; the NumPy fallback is
always available.  Override with the environment variable ``MFSI_BACKEND``
(``compiled`` | ``numpy``) or programmatically via :func:`select`.
"""

import os

from . import _kernels_np

_BACKENDS = {"numpy": _kernels_np}
try:
    from . import _kernels_cy

    _BACKENDS["compiled"] = _kernels_cy
except ImportError:
    _kernels_cy = None

_active = None


def available():
    """Names of the importable backends."""
    return sorted(_BACKENDS)


def select(name):
    """Activate a backend by name and return its module."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available()}")
    _active = _BACKENDS[name]
    return _active


def active():
    """The currently active kernel module."""
    if _active is None:
        requested = os.environ.get("MFSI_BACKEND")
        if requested:
            return select(requested)
        return select("compiled" if "compiled" in _BACKENDS else "numpy")
    return _active
