"""Compiled and numpy kernels must agree."""
import numpy as np
import pytest

from bellopt import _pykernels, kernels

try:
    from bellopt import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


@needs_ext
@pytest.mark.parametrize("angle", [0.0, 0.3, -1.1, 2.9])
def test_rotation_backends_agree(angle):
    a = _pykernels.rotation_matrices(60, angle)
    b = _ckernels.rotation_matrices(60, angle)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=1e-13)


@needs_ext
@pytest.mark.parametrize("shape", [(1, 1), (4, 7), (31, 26)])
def test_distance_backends_agree(shape):
    rng = np.random.default_rng(3)
    p = np.ascontiguousarray(rng.random(shape))
    fa, fb = rng.random(shape[0]), rng.random(shape[1])
    assert _ckernels.distance_sum(p, fa, fb) == pytest.approx(_pykernels.distance_sum(p, fa, fb), rel=1e-13)


def test_distance_sum_reference():
    p = np.array([[0.2, 0.3], [0.1, 0.4]])
    fa, fb = np.array([0.0, 1.0]), np.array([0.5, 2.0])
    expected = sum(p[i, j] * abs(fa[i] - fb[j]) for i in range(2) for j in range(2))
    assert kernels.distance_sum(p, fa, fb) == pytest.approx(expected)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_cached_blocks_read_only():
    u = kernels.rotation_matrix(5, 0.2)
    with pytest.raises(ValueError):
        u[0, 0] = 1.0


def test_forced_fallback_gives_same_result():
    import os
    import subprocess
    import sys

    code = (
        "from bellopt import BACKEND, fock, inequalities as iq;"
        "s = fock.bsv_state(0.7, 30);"
        "print(BACKEND, repr(iq.chained_distance_value(s, 3).lhs))"
    )
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, BELLOPT_PURE_PYTHON=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, value = res.stdout.split()
        out[flag] = (backend, float(value))
    assert out["1"][0] == "python"
    assert out["1"][1] == pytest.approx(out["0"][1], abs=1e-12)
