"""Closed-form analysis of the alternating period-4 laws for k = 2, 2p = q_w = 1.

With ``u = (1, a, 1, b)`` and ``tau = theta + 1/theta`` the fixed-point system
reduces to

    a (a^2 + b^2 + tau + 2) = tau a^2 + 2 b^2 + 2
    b (a^2 + b^2 + tau + 2) = tau b^2 + 2 a^2 + 2

Symmetric solutions ``a = b`` are roots of ``2a^3 - (tau+2)a^2 + (tau+2)a - 2``.
Asymmetric ones go through ``x = a + b`` and ``y = ab``, which satisfy

    (tau-2) x^2 - (tau^2-4) x + tau^2 + 4 tau = 0,   (tau-2) y = 2(tau-2) x - 2(tau+1).

The ``x`` roots are real once ``P(tau) = tau^3 - 2tau^2 - 20tau - 8 >= 0``;
``a, b`` then exist on a branch when its discriminant ``D1`` (smaller ``x``)
or ``D2`` (larger ``x``) is non-negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _core
from .model import ModelParams
from .periodic_system import merge_roots
from .polyroot import P_TAU, Q_TAU, bisect
from .series import se1_coefficients

DISTINCT_TOL = 1e-10
CRITICAL_REL_TOL = 1e-9


@dataclass(frozen=True)
class XYPoint:
    x: float
    y: float
    branch: str  # "minus" (x1, discriminant D1) or "plus" (x2, discriminant D2)


@dataclass(frozen=True)
class Pair:
    a: float
    b: float
    kind: str  # "symmetric", "asym_branch1", "asym_branch2"

    def law_values(self) -> tuple:
        return (1.0, self.a, 1.0, self.b)


@dataclass(frozen=True)
class CriticalTaus:
    tau1: float
    tau2: float
    tau3: float
    p_residual: float
    q_residual: float
    d1_at_tau3: float
    d2_at_tau2: float


@dataclass(frozen=True)
class CountReport:
    tau: float
    n_symmetric: int
    n_asym_ordered: int
    n_asym_unordered: int
    n_degenerate: int
    paper_thm2_count: int
    d1_sign: int
    d2_sign: int
    is_critical: bool

    @property
    def n_total_ordered(self) -> int:
        return self.n_symmetric + self.n_asym_ordered


def _check_tau(tau):
    tau = float(tau)
    if not tau > 2.0:
        raise ValueError(f"tau must exceed 2, got {tau!r}")
    return tau


def uff_residual(pair: Pair, tau: float) -> tuple:
    """Residuals of both equations with the denominator cleared."""
    f1, f2 = _core.uff_residuals(float(pair.a), float(pair.b), float(tau))
    return float(f1), float(f2)


def reduced_coefficients(theta: float) -> tuple:
    """Period-4 closed-form sums rescaled by ``(1 - theta^2)/theta``.

    In the solvable case these are exactly ``(2, tau, 2, tau + 2, 1)``
    for ``(A, B, C, D, E)``.
    """
    c = se1_coefficients(ModelParams(theta, 0.5, 1.0, 2))
    s = (1.0 - theta * theta) / theta
    return tuple(v * s for v in (c.A, c.B, c.C, c.D, c.E))


def derive_uff_from_se1(theta: float) -> float:
    """Max deviation of the rescaled closed-form sums from ``(2, tau, 2, tau+2, 1)``."""
    tau = theta + 1.0 / theta
    target = (2.0, tau, 2.0, tau + 2.0, 1.0)
    return max(abs(a - b) for a, b in zip(reduced_coefficients(theta), target))


def symmetric_cubic(a: float, tau: float) -> float:
    return 2 * a**3 - (tau + 2) * a**2 + (tau + 2) * a - 2


def symmetric_solutions(tau: float) -> list:
    """Values ``a = b`` of the symmetric branch, ascending.

    ``a = 1`` always; for ``tau > 4`` the quadratic ``2a^2 - tau a + 2``
    contributes two reciprocal roots.
    """
    tau = _check_tau(tau)
    disc = tau * tau - 16.0
    if disc <= 0.0:
        return [1.0]
    s = math.sqrt(disc)
    big = (tau + s) / 4.0
    # product of the two roots is exactly 1
    return [1.0 / big, 1.0, big]


def p_tau(tau: float) -> float:
    return P_TAU(tau)


def q_tau(tau: float) -> float:
    return Q_TAU(tau)


def _sqrt_term(tau):
    """``sqrt((tau-2) P(tau))``, or ``None`` when it is imaginary."""
    v = (tau - 2.0) * P_TAU(tau)
    return math.sqrt(v) if v >= 0.0 else None


def discriminants(tau: float) -> tuple:
    """``(D1, D2)``; ``None`` entries when ``P(tau) < 0`` makes them complex."""
    tau = _check_tau(tau)
    s = _sqrt_term(tau)
    if s is None:
        return None, None
    base = tau**3 - 8 * tau**2 + 4 * tau + 40
    t = (6.0 - tau) * s
    pre = 2.0 * (tau - 2.0)
    # base^2 - t^2 = 4 (tau - 8) Q(tau): take the larger factor directly and
    # the smaller from the product, avoiding cancellation near its zero
    prod = pre * pre * 4.0 * (tau - 8.0) * Q_TAU(tau)
    if base == 0.0 and t == 0.0:
        return 0.0, 0.0
    if (base >= 0.0) == (t >= 0.0):
        d1 = pre * (base + t)
        return d1, prod / d1
    d2 = pre * (base - t)
    return prod / d2, d2


def xy_solutions(tau: float) -> list:
    """Real roots ``x`` of the (a+b) quadratic with their ``y = ab``; branch "minus" first."""
    tau = _check_tau(tau)
    s = _sqrt_term(tau)
    if s is None:
        return []
    t2 = tau - 2.0
    xs = [((t2 * (tau + 2.0)) - s) / (2.0 * t2), ((t2 * (tau + 2.0)) + s) / (2.0 * t2)]
    pts = [XYPoint(x, 2.0 * x - 2.0 * (tau + 1.0) / t2, br) for x, br in zip(xs, ("minus", "plus"))]
    if s == 0.0:
        return pts[:1]
    return pts


def _branch_pairs(pt: XYPoint):
    """Ordered pairs from one ``(x, y)``; ``None`` for a double root, ``[]`` if complex."""
    disc = pt.x * pt.x - 4.0 * pt.y
    if abs(disc) <= CRITICAL_REL_TOL * pt.x * pt.x:
        return None
    if disc < 0.0:
        return []
    s = math.sqrt(disc)
    hi = (pt.x + s) / 2.0
    lo = pt.y / hi  # avoids cancellation in (x - s) / 2
    if abs(hi - lo) <= DISTINCT_TOL:
        return None
    return [(hi, lo), (lo, hi)]


def asymmetric_solutions(tau: float, with_degenerate: bool = False):
    """Ordered pairs ``(a, b)``, ``a != b``, both positive.

    With ``with_degenerate=True`` also returns the branch double roots
    ``a = b = x/2`` as a separate list of ``Pair`` (kind ``degenerate_branch*``).
    """
    tau = _check_tau(tau)
    out, degenerate = [], []
    for pt in xy_solutions(tau):
        kind = "asym_branch1" if pt.branch == "minus" else "asym_branch2"
        pairs = _branch_pairs(pt)
        if pairs is None:
            degenerate.append(Pair(pt.x / 2.0, pt.x / 2.0, "degenerate_" + kind[-7:]))
            continue
        out.extend(Pair(a, b, kind) for a, b in pairs if a > 0 and b > 0)
    return (out, degenerate) if with_degenerate else out


def alternating_pairs(tau: float) -> list:
    """Every ``(a, b)`` of the alternating system: symmetric then asymmetric."""
    return [Pair(a, a, "symmetric") for a in symmetric_solutions(tau)] + asymmetric_solutions(tau)


def critical_taus(tol: float = 1e-12) -> CriticalTaus:
    """Critical values of tau.

    ``tau1``: positive root of ``P`` (bracketed on [5, 6]); ``tau2``: real root
    of ``Q`` (bracketed on [6, 7]); ``tau3 = 8`` where ``D1`` vanishes.
    """
    tau1 = bisect(P_TAU, 5.0, 6.0, tol)
    tau2 = bisect(Q_TAU, 6.0, 7.0, tol)
    d1, _ = discriminants(8.0)
    _, d2 = discriminants(tau2)
    return CriticalTaus(tau1, tau2, 8.0, abs(P_TAU(tau1)), abs(Q_TAU(tau2)), abs(d1), abs(d2))


def _sign(v, scale):
    if v is None:
        return -1
    if abs(v) <= CRITICAL_REL_TOL * scale:
        return 0
    return 1 if v > 0 else -1


def paper_thm2_count(tau: float, crit: CriticalTaus | None = None) -> int:
    """Number of measures the published theorem assigns to ``tau`` (reported, never asserted)."""
    crit = crit or _CRIT
    if tau <= crit.tau1:
        return 0
    if abs(tau - crit.tau2) <= CRITICAL_REL_TOL * crit.tau2:
        return 2
    if tau < crit.tau2:
        return 1
    if abs(tau - 8.0) <= CRITICAL_REL_TOL * 8.0:
        return 4
    if tau < 8.0:
        return 3
    return 5


def count_report(tau: float) -> CountReport:
    tau = _check_tau(tau)
    sym = symmetric_solutions(tau)
    asym, degenerate = asymmetric_solutions(tau, with_degenerate=True)
    d1, d2 = discriminants(tau)
    scale = 2.0 * (tau - 2.0) * (abs(tau) ** 3 + 8 * tau**2 + 4 * tau + 40)
    s1, s2 = _sign(d1, scale), _sign(d2, scale)
    near = lambda t: abs(tau - t) <= CRITICAL_REL_TOL * t  # noqa: E731
    critical = (near(4.0) or near(_CRIT.tau1) or near(_CRIT.tau2) or near(8.0)
                or s1 == 0 or s2 == 0 or bool(degenerate))
    return CountReport(
        tau=tau,
        n_symmetric=len(sym),
        n_asym_ordered=len(asym),
        n_asym_unordered=len(asym) // 2,
        n_degenerate=len(degenerate),
        paper_thm2_count=paper_thm2_count(tau),
        d1_sign=s1,
        d2_sign=s2,
        is_critical=critical,
    )


def uff_jacobian(a: float, b: float, tau: float) -> np.ndarray:
    den = a * a + b * b + tau + 2.0
    return np.array([
        [den + 2 * a * a - 2 * tau * a, 2 * a * b - 4 * b],
        [2 * a * b - 4 * a, den + 2 * b * b - 2 * tau * b],
    ])


def polish_pair(a: float, b: float, tau: float, max_iter: int = 50):
    """Two-dimensional Newton on the cleared system; ``None`` if it fails or leaves the orthant."""
    v = np.array([a, b], dtype=float)
    for _ in range(max_iter):
        f = np.array(_core.uff_residuals(v[0], v[1], tau))
        if np.max(np.abs(f)) == 0.0:
            break
        try:
            step = np.linalg.solve(uff_jacobian(v[0], v[1], tau), -f)
        except np.linalg.LinAlgError:
            return None
        v = v + step
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            return None
        if np.max(np.abs(step)) <= 1e-15 * (1.0 + np.max(np.abs(v))):
            break
    f = np.array(_core.uff_residuals(v[0], v[1], tau))
    return (float(v[0]), float(v[1])) if np.max(np.abs(f)) < 1e-9 else None


def grid_census(tau: float, h: float = 0.01, upper: float = 12.0, dedupe: float = 1e-6) -> list:
    """Brute-force solutions on ``(0, upper]^2``: sign-straddling cells, Newton-polished, deduplicated.

    Independent of the discriminant analysis; used to cross-check it.
    """
    tau = _check_tau(tau)
    N = int(round(upper / h))
    cells = _core.uff_candidate_cells(tau, h, N)
    points, conds = [], []
    for i, j in cells:
        # cell [(i+1)h, (i+2)h] x [(j+1)h, (j+2)h]; start from its centre
        r = polish_pair((i + 1.5) * h, (j + 1.5) * h, tau)
        if r is None:
            continue
        points.append(np.array(r))
        conds.append(float(np.linalg.cond(uff_jacobian(r[0], r[1], tau))))

    def max_residual(v):
        return float(np.max(np.abs(_core.uff_residuals(v[0], v[1], tau))))

    merged = merge_roots(points, conds, max_residual, 1e-9)
    found = []
    for v, _ in merged:
        if not any(max(abs(v[0] - s[0]), abs(v[1] - s[1])) < dedupe for s in found):
            found.append((float(v[0]), float(v[1])))
    return sorted(found)


_CRIT = critical_taus()
