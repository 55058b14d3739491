"""Backend selection for the reduction kernels.

The compiled extension (graveropt._speedups) is used when it imported
cleanly and GRAVER_OPT_PURE is unset; otherwise the pure-Python twin.
Both expose the same functions with identical results, only speed
differs.  use() swaps the active backend at runtime, which the benchmark
and the twin-equality tests rely on.
"""

import os

from . import _kernels_py

_backends = {"python": _kernels_py}

if not os.environ.get("GRAVER_OPT_PURE"):
    try:
        from . import _speedups

        _backends["cython"] = _speedups
    except ImportError:
        pass

active = _backends.get("cython", _kernels_py)


def available():
    return tuple(sorted(_backends))


def use(name):
    """Switch the active backend ('python' or 'cython'). Returns the module."""
    global active
    if name not in _backends:
        raise ValueError("unknown kernel backend %r (available: %s)" % (name, ", ".join(available())))
    active = _backends[name]
    return active


def backend_name():
    return active.BACKEND
