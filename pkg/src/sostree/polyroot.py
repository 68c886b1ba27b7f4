"""Small polynomial toolkit: sign variations, bracketed bisection, cubic discriminant."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence


@dataclass(frozen=True)
class Poly:
    """Real polynomial with coefficients in descending degree."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence[float]):
        coeffs = tuple(float(c) for c in coeffs)
        if len(coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        if coeffs[0] == 0.0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        # Horner
        acc = 0.0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def cauchy_bound(self) -> float:
        """All real roots satisfy ``|x| < 1 + max |a_i / a_lead|``."""
        lead = self.coeffs[0]
        return 1.0 + max(abs(c / lead) for c in self.coeffs[1:])


# The two cubics whose roots are the critical tau values.
P_TAU = Poly([1, -2, -20, -8])
Q_TAU = Poly([1, -8, 16, -32])


def descartes_positive_bound(poly: Poly) -> int:
    """Number of sign changes in the coefficient sequence (zeros skipped).

    Upper bound on the number of positive roots, with the same parity.
    """
    signs = [c > 0 for c in poly.coeffs if c != 0.0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
           max_iter: int = 200) -> float:
    """Midpoint bisection on a sign-changing bracket.

    Stops once the bracket is narrower than ``tol`` (or an endpoint hits an
    exact zero) and returns the midpoint of the final bracket.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = float(lo), float(hi)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not flo * fhi < 0:
        raise ValueError(f"f({lo}) and f({hi}) do not bracket a root")
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cubic_discriminant(poly: Poly) -> float:
    """Discriminant 18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2 of a cubic."""
    if poly.degree != 3:
        raise ValueError(f"expected a cubic, got degree {poly.degree}")
    a, b, c, d = poly.coeffs
    return 18 * a * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * a * c**3 - 27 * a**2 * d**2


def scan_real_roots(poly: Poly, lo: float, hi: float, step: float = 1e-3,
                    tol: float = 1e-12) -> list[float]:
    """Real roots on [lo, hi] found by a dense sign scan refined with bisection.

    Misses roots of even multiplicity; exact grid zeros are reported as-is.
    """
    roots = []
    n = max(1, int(round((hi - lo) / step)))
    x0, f0 = lo, poly(lo)
    if f0 == 0.0:
        roots.append(x0)
    for i in range(1, n + 1):
        x1 = lo + (hi - lo) * i / n
        f1 = poly(x1)
        if f1 == 0.0:
            roots.append(x1)
        elif f0 != 0.0 and (f0 < 0) != (f1 < 0):
            roots.append(bisect(poly, x0, x1, tol))
        x0, f0 = x1, f1
    return roots
