"""Sampler kernel selection: compiled extension with pure-Python fallback.

The hot loop (score evaluation + integrator step, run 150-1400 times per
trajectory) exists twice: ``_kernels`` is a Cython extension, ``_pykernels``
is NumPy.  Import picks the compiled one when it is built, unless the
``LANGEVIN_MIMO_BACKEND`` environment variable ("compiled", "python", or
"auto") says otherwise.  ``set_backend`` switches at runtime, e.g. for the
backend comparison benchmark.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:
    _kernels = None

_BY_NAME = {"python": _pykernels}
if _kernels is not None:
    _BY_NAME["compiled"] = _kernels

_active: ModuleType


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BY_NAME))


def set_backend(name: str) -> None:
    """Select the kernel implementation by name ("compiled" or "python")."""
    global _active
    if name not in _BY_NAME:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        )
    _active = _BY_NAME[name]


def get_backend() -> ModuleType:
    return _active


def backend_name() -> str:
    return _active.NAME


_requested = os.environ.get("LANGEVIN_MIMO_BACKEND", "auto")
if _requested == "auto":
    _active = _BY_NAME.get("compiled", _pykernels)
elif _requested in _BY_NAME:
    _active = _BY_NAME[_requested]
else:
    raise ImportError(
        f"LANGEVIN_MIMO_BACKEND={_requested!r} is not available; "
        f"choose from {available_backends()} or 'auto'"
    )
