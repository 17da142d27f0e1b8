"""Pure numpy versions of the compiled kernels (same signatures)."""
import math

import numpy as np


def rotation_matrices(nmax, angle):
    """Rotation blocks for per-side photon numbers 0..nmax.

    Entry ``[j, k]`` of block ``n`` is the amplitude of ``|j, n-j>`` in the
    rotated (+, -) basis carried by ``|k, n-k>`` in the (H, V) basis.

    Block ``n`` is built from block ``n-1`` by adding one photon through both
    neighbouring columns, ``n|k, n-k> = sqrt(k) a_H^+|k-1, n-k> +
    sqrt(n-k) a_V^+|k, n-k-1>``, which keeps the recursion stable.
    """
    c, s = math.cos(angle), math.sin(angle)
    cur = np.ones((1, 1))
    out = [cur]
    for n in range(1, int(nmax) + 1):
        prev = cur
        up = np.sqrt(np.arange(1, n + 1))[:, None] * prev  # A^+ : row j -> j+1
        down = np.sqrt(np.arange(n, 0, -1))[:, None] * prev  # B^+ : row j -> j
        h = np.zeros((n + 1, n))
        h[1:] += c * up
        h[:-1] -= s * down
        v = np.zeros((n + 1, n))
        v[1:] += s * up
        v[:-1] += c * down
        ks = np.arange(n + 1)
        cur = np.zeros((n + 1, n + 1))
        cur[:, 1:] += h * np.sqrt(ks[1:])
        cur[:, :-1] += v * np.sqrt(n - ks[:-1])
        cur /= n
        out.append(cur)
    return out


def distance_sum(probs, fa, fb):
    """Sum of probs[i, j] * |fa[i] - fb[j]|."""
    probs = np.asarray(probs, dtype=float)
    fa = np.asarray(fa, dtype=float)
    fb = np.asarray(fb, dtype=float)
    if fa.shape[0] != probs.shape[0] or fb.shape[0] != probs.shape[1]:
        raise ValueError("weight vectors do not match the probability block")
    return float(np.sum(probs * np.abs(fa[:, None] - fb[None, :])))
