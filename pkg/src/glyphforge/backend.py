"""Selects the kernel backend.

Set GLYPHFORGE_BACKEND=numba to run the jitted kernels, =numpy for the
BLAS-backed fallback.  Default is numpy: on the machines this was tuned on,
im2col + dgemm beats the direct-loop jit for the channel counts the model
uses, while the jitted scanline rasterizer wins on glyph fills.  Both
backends are deterministic run-to-run; scanline_fill is bit-identical
across backends, the convolutions agree to float rounding.

`benchmarks/bench_kernels.py` reproduces the comparison.
"""

import os

_VALID = ("numpy", "numba")


def load_backend(name: str):
    name = (name or "numpy").strip().lower()
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    if name == "numba":
        from . import kernels_numba as mod
    else:
        from . import kernels_numpy as mod
    return mod


_active = load_backend(os.environ.get("GLYPHFORGE_BACKEND", "numpy"))


def backend_name() -> str:
    return "numba" if _active.__name__.endswith("numba") else "numpy"


def use_backend(name: str) -> None:
    """Swap the active backend (used by tests and benchmarks)."""
    global _active
    _active = load_backend(name)


def conv2d_forward(xp, w, stride):
    return _active.conv2d_forward(xp, w, stride)


def conv2d_backward_data(dy, w, stride, hp, wp):
    return _active.conv2d_backward_data(dy, w, stride, hp, wp)


def conv2d_backward_weights(xp, dy, stride, k):
    return _active.conv2d_backward_weights(xp, dy, stride, k)


def scanline_fill(edges, width, height):
    return _active.scanline_fill(edges, width, height)
