"""Backend selection for the window-counting kernel.

The compiled extension is used when importable; set ``SEQASSOC_PURE=1`` to
force the pure-Python fallback.
"""
import os

BACKEND = "python"

if os.environ.get("SEQASSOC_PURE") != "1":
    try:
        from ._kernels import MAX_SUPPORTED_LENGTH, count_chunk
        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernels_py import MAX_SUPPORTED_LENGTH, count_chunk

__all__ = ["BACKEND", "MAX_SUPPORTED_LENGTH", "count_chunk"]
