"""Pure-Python / numpy reference kernels.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and the same floating-point operation order, so both backends agree to the
last bit on the sums and exactly on the integer outputs.
"""
import math

import numpy as np


def _neumaier_add(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


def residue_sums(n, log_theta, p, q_w, M):
    """Sums of ``theta**(alpha(|m|)|m|)`` over each residue class of ``m`` mod ``n``, ``|m| <= M``.

    Terms are visited by ascending ``|m|`` with ``m`` and ``-m`` paired, and
    each class accumulates with Neumaier compensation.
    """
    s = [0.0] * n
    c = [0.0] * n
    for t in range(M + 1):
        w = math.exp((p if t % 2 == 0 else q_w) * t * log_theta)
        r = t % n
        s[r], c[r] = _neumaier_add(s[r], c[r], w)
        if t:
            r = (-t) % n
            s[r], c[r] = _neumaier_add(s[r], c[r], w)
    return np.array([s[r] + c[r] for r in range(n)])


def window_sum(center, values, log_theta, p, q_w, lo, hi):
    """Compensated ``sum_{lo <= |t| <= hi} theta**alpha_weight(t) * values[(center + t) mod n]``.

    ``t`` runs by ascending ``|t|`` with ``+t`` before ``-t``.
    """
    n = len(values)
    s = 0.0
    c = 0.0
    for t in range(lo, hi + 1):
        w = math.exp((p if t % 2 == 0 else q_w) * t * log_theta)
        s, c = _neumaier_add(s, c, w * values[(center + t) % n])
        if t:
            s, c = _neumaier_add(s, c, w * values[(center - t) % n])
    return s + c


def uff_residuals(a, b, tau):
    """Both residuals of the k=2 alternating system, broadcasting over arrays."""
    den = a * a + b * b + tau + 2.0
    f1 = a * den - (tau * a * a + 2.0 * b * b + 2.0)
    f2 = b * den - (tau * b * b + 2.0 * a * a + 2.0)
    return f1, f2


def uff_candidate_cells(tau, h, N):
    """Grid cells of ``[h, N h]^2`` on whose corners both residuals take both signs (zero counts as both)."""
    g = h * np.arange(1, N + 1, dtype=float)
    a, b = np.meshgrid(g, g, indexing="ij")
    f1, f2 = uff_residuals(a, b, tau)

    def straddles(f):
        corners = np.stack([f[:-1, :-1], f[1:, :-1], f[:-1, 1:], f[1:, 1:]])
        return (corners.min(axis=0) <= 0.0) & (corners.max(axis=0) >= 0.0)

    mask = straddles(f1) & straddles(f2)
    return np.argwhere(mask).astype(np.int64)


def uniforms_from_raw(raw):
    """Map raw 64-bit words to doubles in [0, 1) using the top 53 bits."""
    return (np.asarray(raw, dtype=np.uint64) >> np.uint64(11)).astype(float) * 2.0 ** -53


def inverse_cdf(cdf, u):
    """Index of the first bucket whose cumulative probability exceeds ``u``."""
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1).astype(np.int64)


def tree_heights(k, uniforms, cdfs, W):
    """Heights of a complete k-ary tree in breadth-first order, root pinned to 0.

    ``cdfs[r]`` is the cumulative distribution over ``2W + 3`` buckets for a
    parent whose height is ``r`` mod the period: a folded left tail, offsets
    ``-W..W`` and a folded right tail.  Returns the heights and the number of
    draws that landed in a tail bucket.
    """
    n = cdfs.shape[0]
    V = len(uniforms)
    heights = np.zeros(V, dtype=np.int64)
    tail_hits = 0
    start = 1
    while start < V:
        stop = min(V, start * k + 1) if k > 1 else start + 1
        v = np.arange(start, stop)
        parents = heights[(v - 1) // k]
        cls = parents % n
        buckets = np.empty(len(v), dtype=np.int64)
        for r in np.unique(cls):
            sel = cls == r
            buckets[sel] = inverse_cdf(cdfs[r], uniforms[v[sel]])
        tail_hits += int(np.count_nonzero((buckets == 0) | (buckets == 2 * W + 2)))
        offsets = np.clip(buckets - 1, 0, 2 * W) - W
        heights[v] = parents + offsets
        start = stop
    return heights, tail_hits
