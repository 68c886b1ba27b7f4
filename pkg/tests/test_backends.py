import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from sostree import _core, _kernels_py

try:
    from sostree import _kernels as _kc
except ImportError:  # pure-Python install
    _kc = None

needs_ext = pytest.mark.skipif(_kc is None, reason="compiled extension not built")


def test_backend_name():
    assert _core.BACKEND in ("cython", "python")


def test_pure_python_switch():
    env = dict(os.environ, SOSTREE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import sostree; print(sostree.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout
    assert out.strip() == "python"


@needs_ext
@pytest.mark.parametrize("n", [1, 2, 4, 7])
@pytest.mark.parametrize("theta, p, q", [(0.1125, 0.5, 1.0), (0.9, 0.5, 1.0), (0.4, 2.0, 0.7)])
def test_residue_sums_identical(n, theta, p, q):
    lt = np.log(theta)
    assert_array_equal(_kc.residue_sums(n, lt, p, q, 400), _kernels_py.residue_sums(n, lt, p, q, 400))


@needs_ext
def test_window_sum_identical():
    z = np.array([1.0, 4.5, 1.0, 0.3])
    for c in (-3, 0, 5):
        assert _kc.window_sum(c, z, np.log(0.3), 0.5, 1.0, 0, 120) == _kernels_py.window_sum(
            c, z, np.log(0.3), 0.5, 1.0, 0, 120)


@needs_ext
@pytest.mark.parametrize("tau", [5.0, 8.0, 9.0])
def test_uff_identical(tau):
    a, b = np.meshgrid(np.linspace(0.05, 9, 37), np.linspace(0.05, 9, 41))
    for x, y in zip(a.ravel(), b.ravel()):
        assert tuple(_kc.uff_residuals(x, y, tau)) == tuple(_kernels_py.uff_residuals(x, y, tau))
    assert_array_equal(np.asarray(_kc.uff_candidate_cells(tau, 0.02, 600)),
                       np.asarray(_kernels_py.uff_candidate_cells(tau, 0.02, 600)))


@needs_ext
def test_sampling_kernels_identical():
    rng = np.random.default_rng(3)
    raw = rng.integers(0, 2**64, size=5000, dtype=np.uint64)
    u1, u2 = _kc.uniforms_from_raw(raw), _kernels_py.uniforms_from_raw(raw)
    assert_array_equal(u1, u2)
    assert np.all((u1 >= 0) & (u1 < 1))
    W = 10
    cdfs = np.cumsum(rng.random((4, 2 * W + 3)), axis=1)
    cdfs /= cdfs[:, -1:]
    cdfs[:, -1] = 1.0
    assert_array_equal(_kc.inverse_cdf(cdfs[0], u1), _kernels_py.inverse_cdf(cdfs[0], u1))
    V = 2**12 - 1
    h1, t1 = _kc.tree_heights(2, u1[:V] if len(u1) >= V else np.resize(u1, V), cdfs, W)
    h2, t2 = _kernels_py.tree_heights(2, u1[:V] if len(u1) >= V else np.resize(u1, V), cdfs, W)
    assert_array_equal(h1, h2)
    assert t1 == t2


def test_inverse_cdf_edges():
    cdf = np.array([0.25, 0.5, 1.0])
    assert_array_equal(_kernels_py.inverse_cdf(cdf, np.array([0.0, 0.25, 0.49, 0.5, 0.999999])), [0, 1, 1, 2, 2])
