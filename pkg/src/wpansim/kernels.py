"""Kernel selection: compiled extension when available, pure Python otherwise."""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:
    _kernels = None

_impl = _kernels if _kernels is not None else _kernels_py

BACKEND: str = _impl.BACKEND
best_layout = _impl.best_layout


def available_backends() -> dict[str, object]:
    """Backends importable in this environment, keyed by name."""
    backends: dict[str, object] = {_kernels_py.BACKEND: _kernels_py}
    if _kernels is not None:
        backends[_kernels.BACKEND] = _kernels
    return backends
