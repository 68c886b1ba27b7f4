"""Transition kernel of the tree-indexed Markov chain built from a periodic boundary law.

A child of a vertex at height ``i`` moves to height ``j`` with probability

    P(i, j) = l(j) Q(j, i) / sum_s l(s) Q(s, i),     l = z = u**k.

For a periodic law the denominator is the circulant row value ``N[i mod n]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _core
from .model import ModelParams
from .periodic_system import PeriodicBoundaryLaw, build_matrix, row_values
from .series import DEFAULT_EPS, tail_bound, truncation_length

MAX_TAIL_MASS = 1e-6
WARN_TAIL_MASS = 1e-9  # below this the edge folding bias is negligible


class WindowTooSmall(ArithmeticError):
    """The probability mass outside the sampling window is too large."""


@dataclass(frozen=True)
class TransitionRow:
    """Probabilities ``P(center, j)`` for ``j`` in ``[center - W, center + W]``."""

    center: int
    window: int
    probs: np.ndarray
    tail_mass_bound: float
    left_tail: float
    right_tail: float

    @property
    def heights(self) -> np.ndarray:
        return np.arange(self.center - self.window, self.center + self.window + 1)

    @property
    def gradients(self) -> np.ndarray:
        return np.arange(-self.window, self.window + 1)

    def bucket_cdf(self) -> np.ndarray:
        """Cumulative distribution over ``[left tail, window..., right tail]``, ending at exactly 1."""
        masses = np.concatenate([[self.left_tail], self.probs, [self.right_tail]])
        cdf = np.cumsum(masses)
        cdf /= cdf[-1]
        cdf[-1] = 1.0
        return cdf


@dataclass(frozen=True)
class NormalisabilityVerdict:
    normalisable: bool
    witness: float
    inner_sums: np.ndarray

    @property
    def verdict(self) -> str:
        return "Normalisable" if self.normalisable else "NotNormalisable"

    def partial_outer_sum_lower_bound(self, L: int, k: int) -> float:
        """Lower bound ``(2L + 1) g_min**(k+1)`` of the outer sum over ``|x| <= L``."""
        return (2 * L + 1) * self.witness ** (k + 1)


@dataclass(frozen=True)
class GradientSample:
    depth: int
    k: int
    heights: np.ndarray  # breadth-first vertex order, root first
    tail_hits: int

    @property
    def parents(self) -> np.ndarray:
        return (np.arange(1, len(self.heights)) - 1) // self.k

    @property
    def gradients(self) -> np.ndarray:
        """Child minus parent height for every edge, indexed by child vertex - 1."""
        return self.heights[1:] - self.heights[self.parents]

    def edges(self):
        return list(zip(self.parents.tolist(), range(1, len(self.heights))))


def _tail(center, law, params, lo, eps):
    """``sum_{|t| >= lo} Q(t) l(center + t)`` on each side, plus the geometric remainder."""
    z = law.boundary_values(params.k)
    M = max(truncation_length(params, eps), lo)
    lt = params.log_theta
    left = right = 0.0
    for t in range(lo, M + 1):
        w = math.exp((params.p if t % 2 == 0 else params.q_w) * t * lt)
        right += w * z[(center + t) % law.n]
        left += w * z[(center - t) % law.n]
    rem = 0.5 * tail_bound(M, params) * float(np.max(z))
    return left + rem, right + rem


def transition_row(i: int, law: PeriodicBoundaryLaw, params: ModelParams, W: int = 50,
                   eps: float = DEFAULT_EPS) -> TransitionRow:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if W < 1:
        raise ValueError("window must be >= 1")
    n = law.n
    z = law.boundary_values(params.k)
    denom = row_values(law.array(), build_matrix(n, params, eps), params.k)[i % n]
    offs = np.arange(-W, W + 1)
    expo = np.where(offs % 2 == 0, params.p, params.q_w) * np.abs(offs)
    probs = z[(i + offs) % n] * np.exp(expo * params.log_theta) / denom
    left, right = _tail(i, law, params, W + 1, eps)
    return TransitionRow(int(i), int(W), probs, (left + right) / denom, left / denom, right / denom)


def check_normalisability(law: PeriodicBoundaryLaw, params: ModelParams,
                          eps: float = DEFAULT_EPS) -> NormalisabilityVerdict:
    """Normalisability of a positive periodic law.

    The inner sums ``g(x) = sum_y Q(x, y) l(y)`` are periodic in ``x`` with
    minimum ``g_min > 0``, so the outer sum of ``g(x)**(k+1)`` over all heights
    diverges.  ``g_min`` is returned as the witness.
    """
    g = row_values(law.array(), build_matrix(law.n, params, eps), params.k)
    # the truncation error of each inner sum is bounded by the tail bound times max l
    g_lower = g - tail_bound(truncation_length(params, eps), params) * float(np.max(law.boundary_values(params.k)))
    witness = float(np.min(g_lower))
    return NormalisabilityVerdict(normalisable=not witness > 0, witness=witness, inner_sums=g)


def _check_tail(worst):
    if worst >= MAX_TAIL_MASS:
        raise WindowTooSmall(f"tail mass {worst:.3g} >= {MAX_TAIL_MASS:g}; increase the window")
    if worst >= WARN_TAIL_MASS:
        warnings.warn(f"tail mass {worst:.3g} folded into the window edges", RuntimeWarning, stacklevel=3)


def _bucket_cdfs(law, params, W, eps):
    rows = [transition_row(r, law, params, W, eps) for r in range(law.n)]
    _check_tail(max(r.tail_mass_bound for r in rows))
    return np.vstack([r.bucket_cdf() for r in rows])


def _uniforms(seed: int, count: int, stream: int) -> np.ndarray:
    # Philox is counter-based: the i-th output depends only on (seed, stream, i)
    bg = np.random.Philox(key=[int(seed) & (2**64 - 1), int(stream)])
    return _core.uniforms_from_raw(bg.random_raw(count))


def tree_size(k: int, depth: int) -> int:
    return depth + 1 if k == 1 else (k ** (depth + 1) - 1) // (k - 1)


def sample_tree(law: PeriodicBoundaryLaw, params: ModelParams, depth: int, seed: int, W: int = 50,
                eps: float = DEFAULT_EPS) -> GradientSample:
    """Heights on a rooted complete k-ary tree of the given depth, root pinned to 0.

    Vertex ``v`` (breadth-first, root 0) draws its height with the ``v``-th
    output of a Philox stream keyed by ``seed``, so the result does not depend
    on traversal order.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    cdfs = _bucket_cdfs(law, params, W, eps)
    V = tree_size(params.k, depth)
    heights, tail_hits = _core.tree_heights(params.k, _uniforms(seed, V, 0), cdfs, W)
    return GradientSample(depth, params.k, heights, tail_hits)


def sample_transitions(i: int, law: PeriodicBoundaryLaw, params: ModelParams, count: int, seed: int,
                       W: int = 50, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``count`` independent gradients ``j - i`` drawn from the row at height ``i``."""
    row = transition_row(i, law, params, W, eps)
    _check_tail(row.tail_mass_bound)
    buckets = _core.inverse_cdf(row.bucket_cdf(), _uniforms(seed, count, 1))
    return np.clip(buckets - 1, 0, 2 * W) - W


def exact_gradient_probs(r: int, law: PeriodicBoundaryLaw, params: ModelParams, W: int = 50,
                         eps: float = DEFAULT_EPS) -> np.ndarray:
    """Sampling distribution of gradients ``-W..W`` from height class ``r``, tails folded to the edges."""
    row = transition_row(r, law, params, W, eps)
    p = row.probs.copy()
    p[0] += row.left_tail
    p[-1] += row.right_tail
    return p / p.sum()
