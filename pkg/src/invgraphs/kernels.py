"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``INVGRAPHS_PURE`` is set to a non-empty value, the
pure-Python twin is used. Both expose the same functions::

    prepare(table)            backend-native form of an (N, 2n) int table
    free_reduce(word)         -> reduced tuple of letter codes
    trace(table, start, word) -> end vertex or -1
    bfs(table, src, allowed)  -> int32 distance array, -1 = unreachable
    canonical_code(table, anchor, allowed, flags, order) -> tuple of ints
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("INVGRAPHS_PURE"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend

BACKEND = _impl.BACKEND
prepare = _impl.prepare
free_reduce = _impl.free_reduce
trace = _impl.trace
bfs = _impl.bfs
canonical_code = _impl.canonical_code

__all__ = [
    "BACKEND",
    "prepare",
    "free_reduce",
    "trace",
    "bfs",
    "canonical_code",
    "python_backend",
    "compiled_backend",
]
