"""Period-n fixed-point system for boundary laws, and its multi-start Newton solver.

For an ``n``-periodic law ``u`` (normalized ``u[0] = 1``) the boundary-law
recursion collapses to

    u[i] * N[0] = N[i],     N[i] = sum_r c[(r - i) mod n] * u[r]**k,

where ``c`` holds the residue-class weight sums.  The matrix
``entry(i, r) = c[(r - i) mod n]`` is circulant.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _core
from .model import ModelParams
from .series import DEFAULT_EPS, residue_vector, truncation_length

log = logging.getLogger(__name__)

DEDUPE_TOL = 1e-8
ILL_CONDITIONED = 1e8
DEGENERATE_MERGE_RADIUS = 1e-4
LABEL_TOL = 1e-7
DEGENERATE_LABEL_TOL = 1e-5
START_VALUES = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
MAX_STARTS = 625


@dataclass(frozen=True)
class PeriodicBoundaryLaw:
    """Positive ``n``-periodic law ``u[0..n-1]``, normalized so that ``u[0] = 1``."""

    u: tuple

    def __init__(self, u: Sequence[float]):
        u = tuple(float(x) for x in u)
        if not u:
            raise ValueError("a periodic law needs at least one value")
        if any(not x > 0 for x in u):
            raise ValueError(f"law values must be positive, got {u}")
        if u[0] != 1.0:
            raise ValueError("u[0] must be 1; use PeriodicBoundaryLaw.normalized")
        object.__setattr__(self, "u", u)

    @classmethod
    def normalized(cls, values: Sequence[float]) -> "PeriodicBoundaryLaw":
        values = [float(x) for x in values]
        return cls([1.0] + [x / values[0] for x in values[1:]])

    @classmethod
    def constant(cls, n: int) -> "PeriodicBoundaryLaw":
        return cls([1.0] * n)

    @property
    def n(self) -> int:
        return len(self.u)

    def array(self) -> np.ndarray:
        return np.array(self.u)

    def boundary_values(self, k: int) -> np.ndarray:
        """The boundary law ``l = z = u**k`` on one period."""
        return self.array() ** k

    def __call__(self, i: int) -> float:
        return self.u[i % self.n]

    def shifted(self, s: int) -> "PeriodicBoundaryLaw":
        """Translate by ``s`` sites, then renormalize."""
        return PeriodicBoundaryLaw.normalized([self(i + s) for i in range(self.n)])

    def distance(self, other: "PeriodicBoundaryLaw") -> float:
        return float(np.max(np.abs(self.array() - other.array())))


@dataclass(frozen=True)
class CoefficientMatrix:
    """Circulant matrix generated by ``c``: ``entry(i, r) = c[(r - i) mod n]``."""

    c: np.ndarray

    @property
    def n(self) -> int:
        return len(self.c)

    def entry(self, i: int, r: int) -> float:
        return float(self.c[(r - i) % self.n])

    def dense(self) -> np.ndarray:
        n = self.n
        idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
        return np.asarray(self.c)[idx]

    def row_sums(self) -> np.ndarray:
        return self.dense().sum(axis=1)


@dataclass(frozen=True)
class Solution:
    law: PeriodicBoundaryLaw
    residual: float
    label: str
    condition: float = 1.0


@dataclass
class SolutionSet:
    solutions: list = field(default_factory=list)
    n_starts: int = 0
    n_failed: int = 0
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def laws(self) -> list:
        return [s.law for s in self.solutions]

    def with_label(self, *labels: str) -> list:
        return [s for s in self.solutions if s.label in labels]


def build_matrix(n: int, params: ModelParams, eps: float = DEFAULT_EPS) -> CoefficientMatrix:
    return CoefficientMatrix(residue_vector(n, params, eps))


def row_values(u: np.ndarray, matrix: CoefficientMatrix, k: int) -> np.ndarray:
    """``N[i] = sum_r entry(i, r) u[r]**k`` for all rows."""
    return matrix.dense() @ (np.asarray(u, dtype=float) ** k)


def residual(law: PeriodicBoundaryLaw, matrix: CoefficientMatrix, k: int) -> np.ndarray:
    """``r[i] = u[i] N[0] - N[i]``; ``r[0]`` vanishes identically."""
    if law.n != matrix.n:
        raise ValueError(f"law period {law.n} does not match matrix size {matrix.n}")
    u = law.array()
    N = row_values(u, matrix, k)
    return u * N[0] - N


def fixed_point_map(u: Sequence[float], matrix: CoefficientMatrix, k: int) -> np.ndarray:
    """``u -> N(u) / N[0](u)``; invariant under ``u -> s u``."""
    N = row_values(np.asarray(u, dtype=float), matrix, k)
    return N / N[0]


def jacobian(u: np.ndarray, matrix: CoefficientMatrix, k: int) -> np.ndarray:
    """Full ``n x n`` Jacobian of ``u -> u * N[0] - N`` (all indices treated as free)."""
    u = np.asarray(u, dtype=float)
    C = matrix.dense()
    G = C * (k * u ** (k - 1))[None, :]  # dN_i / du_r
    N0 = C[0] @ u**k
    return N0 * np.eye(len(u)) + np.outer(u, G[0]) - G


def free_indices(n: int, ansatz: str | None) -> np.ndarray:
    if ansatz is None or ansatz == "full":
        return np.arange(1, n)
    if ansatz == "alternating":
        if n % 2:
            raise ValueError("the alternating ansatz needs an even period")
        return np.arange(1, n, 2)
    raise ValueError(f"unknown ansatz {ansatz!r}")


def default_starts(n: int, ansatz: str | None = None) -> list:
    """Start grid ``{1/8, 1/4, ..., 16}`` on every free coordinate.

    When the grid would exceed ``MAX_STARTS`` points a fixed, seeded subset is used.
    """
    free = free_indices(n, ansatz)
    grid = list(itertools.product(START_VALUES, repeat=len(free)))
    if len(grid) > MAX_STARTS:
        pick = np.random.default_rng(0).choice(len(grid), size=MAX_STARTS, replace=False)
        grid = [grid[i] for i in sorted(pick)]
    starts = []
    for g in grid:
        u = np.ones(n)
        u[free] = g
        starts.append(PeriodicBoundaryLaw(u))
    return starts


def _newton(u0, matrix, k, free, tol, max_iter):
    """Damped Newton from ``u0``; returns ``(u, max|F|, cond)`` or ``None`` on failure."""
    u = np.array(u0, dtype=float)
    C = matrix.dense()

    def F(v):
        w = u.copy()
        w[free] = v
        N = C @ w**k
        return (w * N[0] - N)[free]

    v = u[free].copy()
    f = F(v)
    fn = np.max(np.abs(f)) if len(f) else 0.0
    # keep going while the residual still drops: degenerate roots converge
    # only linearly and need the extra steps to reach ~sqrt(machine eps)
    for _ in range(max_iter):
        if fn == 0.0:
            break
        w = u.copy()
        w[free] = v
        J = jacobian(w, matrix, k)[np.ix_(free, free)]
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        for _halving in range(41):
            cand = v + lam * step
            if np.all(cand > 0):
                fc = F(cand)
                fcn = np.max(np.abs(fc))
                if fcn < fn:
                    break
            lam *= 0.5
        else:
            break
        v, f, fn = cand, fc, fcn
        if np.max(np.abs(lam * step)) <= 1e-15 * (1.0 + np.max(np.abs(v))):
            break
    if not fn < tol or not np.all(np.isfinite(v)):
        return None
    w = u.copy()
    w[free] = v
    J = jacobian(w, matrix, k)[np.ix_(free, free)]
    cond = float(np.linalg.cond(J)) if len(free) else 1.0
    return w, float(fn), cond


def merge_roots(points, conds, residual_fn, tol):
    """Cluster converged root estimates; returns ``[(representative, cond), ...]``.

    Points closer than ``DEDUPE_TOL`` are one root.  Newton pins a degenerate
    root only to about the square (or cube) root of machine precision, so
    ill-conditioned points within ``DEGENERATE_MERGE_RADIUS`` are also merged
    when the residual stays below ``tol`` at their midpoint; such clusters
    are represented by their mean, otherwise by the smallest-residual member.
    """
    clusters = []  # [anchor, members, conds]
    for p, c in zip(points, conds):
        p = np.asarray(p, dtype=float)
        for cl in clusters:
            d = np.max(np.abs(p - cl[0]))
            if d < DEDUPE_TOL or (
                    max(c, max(cl[2])) >= ILL_CONDITIONED and d < DEGENERATE_MERGE_RADIUS
                    and residual_fn(0.5 * (p + cl[0])) < tol):
                cl[1].append(p)
                cl[2].append(c)
                break
        else:
            clusters.append([p, [p], [c]])
    out = []
    for anchor, members, cs in clusters:
        if max(cs) >= ILL_CONDITIONED:
            out.append((np.mean(members, axis=0), max(cs)))
        else:
            best = min(range(len(members)), key=lambda i: residual_fn(members[i]))
            out.append((members[best], cs[best]))
    return out


def _is_alternating(u: np.ndarray, tol: float) -> bool:
    return len(u) % 2 == 0 and bool(np.all(np.abs(u[0::2] - 1.0) <= tol))


def classify(law: PeriodicBoundaryLaw, tol: float = LABEL_TOL) -> str:
    """Structural label of a solution.

    ``constant``: the free state ``u = 1``.  ``symmetric`` / ``asymmetric``:
    even sites equal 1 and the odd sites all agree / differ.  ``translate``:
    a shift of such an alternating law.  ``other``: none of the above.
    """
    u = law.array()
    if np.all(np.abs(u - 1.0) <= tol):
        return "constant"
    if _is_alternating(u, tol):
        odd = u[1::2]
        return "symmetric" if np.ptp(odd) <= tol else "asymmetric"
    for s in range(1, law.n):
        if _is_alternating(law.shifted(s).array(), tol):
            return "translate"
    return "other"


def solve_newton(n: int, params: ModelParams, starts: Iterable | None = None,
                 tol: float = 1e-10, eps: float = DEFAULT_EPS, ansatz: str | None = None,
                 max_iter: int = 200) -> SolutionSet:
    """Multi-start damped Newton for all positive ``n``-periodic laws.

    Parameters
    ----------
    ansatz : {None, "full", "alternating"}
        ``None``/``"full"`` solves for every ``u[1..n-1]``; ``"alternating"``
        pins all even sites to 1 and solves for the odd ones only.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    matrix = build_matrix(n, params, eps)
    free = free_indices(n, ansatz)
    starts = default_starts(n, ansatz) if starts is None else list(starts)
    if not starts:
        raise ValueError("need at least one start")
    out = SolutionSet(n_starts=len(starts))
    points, conds = [], []
    for s in starts:
        u0 = s.array() if isinstance(s, PeriodicBoundaryLaw) else np.asarray(s, dtype=float)
        res = _newton(u0, matrix, params.k, free, tol, max_iter)
        if res is None:
            out.n_failed += 1
            continue
        points.append(res[0])
        conds.append(res[2])
    if out.n_failed:
        log.info("%d of %d starts did not converge", out.n_failed, out.n_starts)

    def max_residual(u):
        return float(np.max(np.abs(residual(PeriodicBoundaryLaw(np.r_[1.0, u[1:]]), matrix, params.k))))

    for u, cond in sorted(merge_roots(points, conds, max_residual, tol), key=lambda t: tuple(t[0])):
        law = PeriodicBoundaryLaw(np.r_[1.0, u[1:]])
        if cond >= ILL_CONDITIONED:
            out.warnings.append(f"near-singular Jacobian (cond={cond:.3g}) at u={law.u}")
        label = classify(law, LABEL_TOL if cond < ILL_CONDITIONED else DEGENERATE_LABEL_TOL)
        out.solutions.append(Solution(law, max_residual(u), label, cond))
    return out


def raw_rhs(i: int, law: PeriodicBoundaryLaw, params: ModelParams, eps: float = DEFAULT_EPS) -> float:
    """Right side of the raw recursion at height ``i``: ``(S(i) / S(0))**k``.

    ``S(i) = sum_j Q(i, j) z_j`` is summed directly over ``|j - i| <= M`` on the
    integer line, without folding into residue classes.
    """
    M = truncation_length(params, eps)
    z = law.boundary_values(params.k)
    lt = params.log_theta
    s_i = _core.window_sum(i, z, lt, params.p, params.q_w, 0, M)
    s_0 = _core.window_sum(0, z, lt, params.p, params.q_w, 0, M)
    return (s_i / s_0) ** params.k


def verify_periodicity_reduction(law: PeriodicBoundaryLaw, params: ModelParams, i_range: int = 8,
                                 eps: float = DEFAULT_EPS) -> float:
    """Max ``|rhs(i) - rhs(i + n)|`` over ``i in [1, i_range]`` of the raw recursion."""
    return max(abs(raw_rhs(i, law, params, eps) - raw_rhs(i + law.n, law, params, eps))
               for i in range(1, i_range + 1))


def raw_equation_residual(law: PeriodicBoundaryLaw, params: ModelParams, i_range: int = 8,
                          eps: float = DEFAULT_EPS) -> float:
    """Max ``|z_i - rhs(i)|`` over ``|i| <= i_range``: does the law solve the unfolded recursion?"""
    z = law.boundary_values(params.k)
    return max(abs(z[i % law.n] - raw_rhs(i, law, params, eps)) for i in range(-i_range, i_range + 1))
