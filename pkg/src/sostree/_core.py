"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``SOSTREE_PURE_PYTHON=1`` is set, the numpy reference
kernels are used.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

if os.environ.get("SOSTREE_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

residue_sums = _impl.residue_sums
window_sum = _impl.window_sum
uff_residuals = _impl.uff_residuals
uff_candidate_cells = _impl.uff_candidate_cells
uniforms_from_raw = _impl.uniforms_from_raw
inverse_cdf = _impl.inverse_cdf
tree_heights = _impl.tree_heights
