"""Model parameters, parity weight and transfer kernel of the generalized SOS model.

The interaction along an edge with height difference ``m`` carries the
Boltzmann weight ``theta ** (alpha(|m|) * |m|)`` where ``alpha`` is ``p`` on
even differences and ``q_w`` on odd ones.  Coupling and inverse temperature
only enter through ``theta = exp(-J * beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of the model.

    Attributes
    ----------
    theta : float
        ``exp(-J beta)``, strictly inside (0, 1).
    p : float
        Weight of even height differences.
    q_w : float
        Weight of odd height differences.
    k : int
        Order of the Cayley tree (each vertex has ``k + 1`` neighbours).
    """

    theta: float
    p: float = 0.5
    q_w: float = 1.0
    k: int = 2

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ValueError(f"theta must lie in (0, 1), got {self.theta!r}")
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p!r}")
        if not self.q_w > 0:
            raise ValueError(f"q_w must be positive, got {self.q_w!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")

    @classmethod
    def from_tau(cls, tau: float, p: float = 0.5, q_w: float = 1.0, k: int = 2) -> "ModelParams":
        return cls(theta_from_tau(tau), p, q_w, k)

    @property
    def log_theta(self) -> float:
        return math.log(self.theta)

    @property
    def tau(self) -> float:
        return tau_from_theta(self.theta)

    @property
    def min_weight(self) -> float:
        """Smallest per-unit exponent, used by every geometric tail bound."""
        return min(self.p, self.q_w)

    @property
    def is_special_k2(self) -> bool:
        """True for the exactly solvable case k = 2, 2p = q_w = 1."""
        return self.k == 2 and self.q_w == 1.0 and 2.0 * self.p == 1.0


def alpha_weight(m: int, params: ModelParams) -> float:
    """Exponent ``alpha(|m|) * |m|`` of the edge weight for a height difference ``m``."""
    a = abs(int(m))
    return (params.p if a % 2 == 0 else params.q_w) * a


def transfer_q(i: int, j: int, params: ModelParams) -> float:
    """Transfer kernel ``Q(i, j) = theta ** alpha_weight(i - j)``, evaluated in log space."""
    return math.exp(alpha_weight(i - j, params) * params.log_theta)


def theta_from_tau(tau: float) -> float:
    """Invert ``tau = theta + 1/theta`` on (0, 1).

    Uses ``2 / (tau + sqrt(tau**2 - 4))``, algebraically equal to
    ``(tau - sqrt(tau**2 - 4)) / 2`` but free of cancellation for large tau.
    """
    tau = float(tau)
    if not tau > 2.0:
        raise ValueError(f"tau must exceed 2, got {tau!r}")
    return 2.0 / (tau + math.sqrt((tau - 2.0) * (tau + 2.0)))


def tau_from_theta(theta: float) -> float:
    if not (0.0 < theta < 1.0):
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    return theta + 1.0 / theta
