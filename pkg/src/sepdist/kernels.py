"""Kernel backend selection.

The compiled ``_ckernels`` module is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used. Set ``SEPDIST_PURE_PYTHON=1`` to
force the fallback. ``SEPDIST_THREADS`` sets the default worker count for the
parallel kernels (compiled backend only).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load() -> ModuleType:
    if os.environ.get("SEPDIST_PURE_PYTHON", "") not in ("", "0"):
        return _pykernels
    try:
        from . import _ckernels
    except ImportError:
        return _pykernels
    return _ckernels


backend: ModuleType = _load()
BACKEND: str = backend.BACKEND


def default_threads() -> int:
    raw = os.environ.get("SEPDIST_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def get(name: str | None = None) -> ModuleType:
    """Return a kernel module by name (``"cython"`` or ``"python"``), or the active one."""
    if name is None:
        return backend
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
