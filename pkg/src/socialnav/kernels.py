"""Kernel backend selection.

The numeric hot paths (pair social forces, obstacle repulsion, rollout
social-work scoring) exist twice: a compiled Cython extension and a numpy
reference.  The compiled one is used when importable; set
``SOCIALNAV_BACKEND=python`` or ``compiled`` to force a choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("SOCIALNAV_BACKEND", "").strip().lower()

if _choice in ("", "compiled", "c"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice:  # explicitly requested but unavailable
            raise
        _impl = _kernels_py
elif _choice in ("python", "py"):
    _impl = _kernels_py
else:
    raise RuntimeError(
        f"unknown SOCIALNAV_BACKEND {_choice!r}; use 'compiled' or 'python'"
    )

BACKEND_NAME: str = _impl.BACKEND_NAME

pair_social_forces = _impl.pair_social_forces
nearest_segment_point = _impl.nearest_segment_point
obstacle_force = _impl.obstacle_force
social_work_rollouts = _impl.social_work_rollouts


def available_backends():
    """Names of the importable backends (for the benchmark and tests)."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
