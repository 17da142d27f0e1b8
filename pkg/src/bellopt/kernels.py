"""Kernel backend selection.

The Cython extension is used when it has been built; otherwise the numpy
implementation is loaded. Set ``BELLOPT_PURE_PYTHON=1`` to force the
fallback.
"""
import functools
import os

if os.environ.get("BELLOPT_PURE_PYTHON", "") == "1":
    from bellopt import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from bellopt import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from bellopt import _pykernels as _impl

        BACKEND = "python"

distance_sum = _impl.distance_sum


@functools.lru_cache(maxsize=256)
def _cached_blocks(nmax, angle):
    blocks = tuple(_impl.rotation_matrices(nmax, angle))
    for b in blocks:
        b.setflags(write=False)
    return blocks


def rotation_blocks(nmax, angle):
    """Cached, read-only rotation blocks for photon numbers 0..nmax."""
    nmax = int(nmax)
    angle = float(angle)
    # round the cache key up to a multiple of 16 so growing cutoffs reuse work
    key = max(16, -(-nmax // 16) * 16)
    return _cached_blocks(key, angle)[: nmax + 1]


def rotation_matrix(n, angle):
    """Single (n+1)x(n+1) rotation block."""
    return rotation_blocks(n, angle)[n]
