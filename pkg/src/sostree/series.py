"""Residue-class weight sums with explicit geometric tail bounds.

For a period ``n`` the fixed-point equations only involve the sums
``c[d] = sum_{m = d mod n} theta**(alpha(|m|)|m|)``.  They are truncated at
``|m| <= M`` with ``M`` chosen from the bound
``sum_{|m| > M} theta**(alpha|m|) <= 2 theta**(c0 (M+1)) / (1 - theta**c0)``,
``c0 = min(p, q_w)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _core
from .model import ModelParams

DEFAULT_EPS = 1e-14
MAX_TRUNCATION = 10**6


class TruncationError(ArithmeticError):
    """The truncation length needed for the requested accuracy exceeds the cap."""


@dataclass(frozen=True)
class WeightSum:
    value: float
    tail_bound: float
    truncation_M: int


@dataclass(frozen=True)
class Se1Coefficients:
    """Closed-form period-4 sums: A odd classes, B and C the 0 and 2 classes, D the even total, E = A/2."""

    A: float
    B: float
    C: float
    D: float
    E: float


def tail_bound(M: int, params: ModelParams) -> float:
    """Upper bound on the weight mass at ``|m| > M``."""
    r = params.min_weight * params.log_theta
    return 2.0 * math.exp(r * (M + 1)) / -math.expm1(r)


def truncation_length(params: ModelParams, eps: float = DEFAULT_EPS) -> int:
    """Smallest ``M >= 1`` whose tail bound is below ``eps``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    r = params.min_weight * params.log_theta
    if not r < 0:
        raise ValueError("theta**min(p, q_w) must be below 1 for the sums to converge")
    # 2 exp(r (M+1)) / (1 - exp(r)) < eps  <=>  M + 1 > log(eps (1 - e^r) / 2) / r
    M = max(1, math.ceil(math.log(eps * -math.expm1(r) / 2.0) / r) - 1)
    while tail_bound(M, params) >= eps:
        M += 1
    if M > MAX_TRUNCATION:
        raise TruncationError(
            f"truncation M={M} exceeds cap {MAX_TRUNCATION} (theta={params.theta}, eps={eps})")
    return M


@lru_cache(maxsize=256)
def _residue_vector(n: int, log_theta: float, p: float, q_w: float, M: int) -> np.ndarray:
    out = _core.residue_sums(n, log_theta, p, q_w, M)
    out.setflags(write=False)
    return out


def residue_vector(n: int, params: ModelParams, eps: float = DEFAULT_EPS) -> np.ndarray:
    """All ``n`` residue sums ``c[0..n-1]`` from a single pass."""
    if int(n) != n or n < 1:
        raise ValueError(f"period must be an integer >= 1, got {n!r}")
    M = truncation_length(params, eps)
    return _residue_vector(int(n), params.log_theta, float(params.p), float(params.q_w), M)


def residue_weight_sum(d: int, n: int, params: ModelParams, eps: float = DEFAULT_EPS) -> WeightSum:
    """Sum of ``theta**alpha_weight(m)`` over all integers ``m = d (mod n)``."""
    M = truncation_length(params, eps)
    c = residue_vector(n, params, eps)
    return WeightSum(float(c[d % n]), tail_bound(M, params), M)


def se1_coefficients(params: ModelParams) -> Se1Coefficients:
    """Closed forms of the period-4 sums, valid for any p, q_w > 0."""
    t = params.theta
    tq, t2p = t**params.q_w, t ** (2 * params.p)
    t4p = t2p * t2p
    one_m_2q = 1.0 - tq * tq
    E = tq / one_m_2q
    return Se1Coefficients(
        A=2.0 * E,
        B=(1.0 + t4p) / (1.0 - t4p),
        C=2.0 * t2p / (1.0 - t4p),
        D=(1.0 + t2p) / (1.0 - t2p),
        E=E,
    )
