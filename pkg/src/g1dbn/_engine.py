"""Selection of the first-step scoring engine.

Three engines compute identical scores through different code paths:

* ``native``  - compiled extension, fastest, built optionally;
* ``numpy``   - vectorized fallback, always available;
* ``loop``    - plain per-regression reference path, slow but transparent.

``auto`` (or None) resolves to the G1DBN_ENGINE environment variable if set,
else to ``native`` when the extension imported, else ``numpy``.
"""

from __future__ import annotations

import os

from . import _step1_numpy

try:
    from . import _step1_native
except ImportError:  # extension not built; pure fallback
    _step1_native = None

__all__ = ["available_engines", "default_engine", "resolve_engine"]

ESTIMATOR_CODES = {
    "ls": _step1_numpy.EST_LS,
    "huber": _step1_numpy.EST_HUBER,
    "tukey": _step1_numpy.EST_TUKEY,
}

_KERNELS = {"numpy": _step1_numpy, "native": _step1_native}


def available_engines() -> tuple[str, ...]:
    names = ["numpy", "loop"]
    if _step1_native is not None:
        names.insert(0, "native")
    return tuple(names)


def default_engine() -> str:
    return "native" if _step1_native is not None else "numpy"


def resolve_engine(name: str | None) -> str:
    """Map a requested engine name (or None/'auto') to a usable engine."""
    if name is None or name == "auto":
        name = os.environ.get("G1DBN_ENGINE") or default_engine()
    if name not in ("native", "numpy", "loop"):
        raise ValueError(f"unknown engine {name!r}")
    if name == "native" and _step1_native is None:
        raise ValueError("native engine requested but the extension is not built")
    return name


def kernel(name: str):
    """Kernel module for an engine name; None for the loop engine."""
    return _KERNELS.get(name)
