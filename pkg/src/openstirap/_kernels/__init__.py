"""Integration kernels: compiled extension with a pure-Python fallback.

The compiled backend is picked at import when it is importable and
``OPENSTIRAP_PURE_PYTHON`` is unset (or ``0``).
"""
import os

from . import _pykernel
from ._pykernel import (
    ADIABATIC_3,
    BARE_3,
    COUNTERINTUITIVE,
    EFFECTIVE,
    INTUITIVE,
    MASTER_4,
    OK,
    PHENOMENOLOGICAL,
    TOO_MANY_STEPS,
    UNDERFLOW,
)

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None


def _wants_pure_python():
    return os.environ.get("OPENSTIRAP_PURE_PYTHON", "0").strip().lower() not in ("", "0", "false", "no")


def available_backends():
    names = ["python"]
    if _ckernel is not None:
        names.insert(0, "cython")
    return names


def get_backend(name=None):
    """Return the kernel module called ``name`` ("cython" or "python").

    ``None`` returns the default backend selected at import.
    """
    if name is None:
        return _default
    if name == "python":
        return _pykernel
    if name == "cython":
        if _ckernel is None:
            raise ImportError("compiled kernel is not built; run `pip install -e .`")
        return _ckernel
    raise ValueError(f"unknown backend {name!r}")


_default = _pykernel if (_ckernel is None or _wants_pure_python()) else _ckernel
BACKEND = "python" if _default is _pykernel else "cython"

integrate = _default.integrate
rhs = _default.rhs
generator = _default.generator

__all__ = [
    "ADIABATIC_3", "BARE_3", "MASTER_4", "EFFECTIVE", "PHENOMENOLOGICAL",
    "COUNTERINTUITIVE", "INTUITIVE", "OK", "UNDERFLOW", "TOO_MANY_STEPS",
    "BACKEND", "available_backends", "get_backend", "integrate", "rhs", "generator",
]
