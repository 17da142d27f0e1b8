# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for photon-number rotation blocks and outcome sums."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs

cnp.import_array()


def rotation_matrices(int nmax, double angle):
    """Rotation blocks for per-side photon numbers 0..nmax.

    Entry ``[j, k]`` of block ``n`` is the amplitude of ``|j, n-j>`` in the
    rotated (+, -) basis carried by ``|k, n-k>`` in the (H, V) basis.
    Built with the same two-column photon-adding recursion as the numpy path.
    """
    cdef double c = cos(angle), s = sin(angle)
    cdef Py_ssize_t n, j, k
    cdef double up, down, wk, wv, inv_n
    cdef cnp.ndarray[cnp.float64_t, ndim=2] prev, cur
    cdef double[:, ::1] pv, cv
    out = []
    cur = np.ones((1, 1), dtype=np.float64)
    out.append(cur)
    for n in range(1, nmax + 1):
        prev = cur
        cur = np.zeros((n + 1, n + 1), dtype=np.float64)
        pv = prev
        cv = cur
        inv_n = 1.0 / <double>n
        for k in range(n + 1):
            # sqrt(k) a_H^+ |k-1, n-k>, with a_H^+ = c A^+ - s B^+
            if k >= 1:
                wk = sqrt(<double>k) * inv_n
                for j in range(n):
                    up = sqrt(<double>(j + 1)) * pv[j, k - 1]
                    down = sqrt(<double>(n - j)) * pv[j, k - 1]
                    cv[j + 1, k] += wk * c * up
                    cv[j, k] -= wk * s * down
            # sqrt(n-k) a_V^+ |k, n-k-1>, with a_V^+ = s A^+ + c B^+
            if k < n:
                wv = sqrt(<double>(n - k)) * inv_n
                for j in range(n):
                    up = sqrt(<double>(j + 1)) * pv[j, k]
                    down = sqrt(<double>(n - j)) * pv[j, k]
                    cv[j + 1, k] += wv * s * up
                    cv[j, k] += wv * c * down
        out.append(cur)
    return out


def distance_sum(double[:, ::1] probs, double[::1] fa, double[::1] fb):
    """Sum of probs[i, j] * |fa[i] - fb[j]|."""
    cdef Py_ssize_t i, j
    cdef Py_ssize_t na = probs.shape[0], nb = probs.shape[1]
    cdef double total = 0.0
    if fa.shape[0] != na or fb.shape[0] != nb:
        raise ValueError("weight vectors do not match the probability block")
    for i in range(na):
        for j in range(nb):
            total += probs[i, j] * fabs(fa[i] - fb[j])
    return total
