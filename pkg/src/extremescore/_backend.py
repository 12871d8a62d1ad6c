"""Selects the compiled kernel when available, else the numpy fallback.

Set ``EXTREMESCORE_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None


def available() -> dict[str, ModuleType]:
    out = {"python": _fallback}
    if _kernel is not None:
        out["cython"] = _kernel
    return out


def get(name: str | None = None) -> ModuleType:
    backends = available()
    if name is None:
        name = os.environ.get("EXTREMESCORE_BACKEND", "cython" if _kernel is not None else "python")
    try:
        return backends[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(backends)}") from None


default = get()
