"""Kernel selection: compiled extension if present, numpy fallback otherwise."""

from __future__ import annotations

try:
    from . import _kernels as _impl
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
flow_steps = _impl.flow_steps

__all__ = ["BACKEND", "flow_steps"]
