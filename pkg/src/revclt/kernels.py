"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``REVCLT_PURE_PYTHON=1``
to force the fallback.  Both expose the same functions.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

_NAMES = ("neumaier_cumsum", "regen_sum", "regen_runs", "regen_blocks", "step_sum", "step_path")


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()


def available_backends() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` (``"cython"``, ``"python"`` or None for the default)."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; reinstall or use backend='python'")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


if os.environ.get("REVCLT_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_active = get_backend()
neumaier_cumsum = _active.neumaier_cumsum
regen_sum = _active.regen_sum
regen_runs = _active.regen_runs
regen_blocks = _active.regen_blocks
step_sum = _active.step_sum
step_path = _active.step_path

__all__ = ["BACKEND", "available_backends", "get_backend", *_NAMES]
