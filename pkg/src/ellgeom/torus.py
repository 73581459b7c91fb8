"""Group and divisor-class arithmetic on a complex torus E = C/(Z + tau*Z).

Points are stored as reduced representatives a + b*tau with a, b in [0, 1);
two points are equal when their difference is within a configured tolerance
of a lattice vector.  A line bundle on E is recorded by its degree together
with the Abel-Jacobi sum of any divisor representing it: this pair
classifies the bundle completely, so tensor/dual/triviality reduce to
integer and torus arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = ["Torus", "TorusPoint", "DivisorClass"]


@dataclass(frozen=True)
class TorusPoint:
    """A point of E, held as the reduced representative in {a + b*tau : 0 <= a, b < 1}."""

    z: complex


@dataclass(frozen=True)
class DivisorClass:
    """Line-bundle class on E: first Chern number and Abel-Jacobi point."""

    degree: int
    aj: TorusPoint


class Torus:
    """The curve E = C/(Z + tau*Z) with its point-equality tolerance.

    tau near the real axis (Im tau < 0.1) is rejected: the theta series
    built on top of this lattice degrade there.
    """

    def __init__(self, tau: complex = 1j, tol: float = 1e-9):
        tau = complex(tau)
        if not cmath.isfinite(tau):
            raise ValueError("tau must be finite")
        if tau.imag < 0.1:
            raise ValueError("Im(tau) must be at least 0.1")
        limit = min(1.0, tau.imag) / 4.0
        tol = float(tol)
        if not 0.0 < tol < limit:
            raise ValueError(f"tolerance must lie in (0, {limit:g})")
        self.tau = tau
        self.tol = tol

    def __repr__(self) -> str:
        return f"Torus(tau={self.tau!r}, tol={self.tol!r})"

    # ------------------------------------------------------------------ lattice

    def coords(self, z: complex) -> tuple[float, float]:
        """Real coefficients (a, b) with z = a + b*tau."""
        b = z.imag / self.tau.imag
        a = z.real - b * self.tau.real
        return a, b

    def from_coords(self, a: float, b: float) -> "TorusPoint":
        return self.reduce(a + b * self.tau)

    def reduce(self, z: complex) -> TorusPoint:
        """Reduce z modulo Z + tau*Z into the fundamental parallelogram."""
        z = complex(z)
        if not cmath.isfinite(z):
            raise ValueError("cannot reduce a non-finite number")
        a, b = self.coords(z)
        a -= math.floor(a)
        b -= math.floor(b)
        # float guard: a - floor(a) can round up to 1.0 for large inputs
        if a >= 1.0:
            a -= 1.0
        if b >= 1.0:
            b -= 1.0
        return TorusPoint(a + b * self.tau)

    def zero(self) -> TorusPoint:
        return TorusPoint(0j)

    def lattice_distance(self, p: TorusPoint, q: TorusPoint | None = None) -> float:
        """Distance from p - q to the nearest lattice vector."""
        d = p.z - (q.z if q is not None else 0j)
        a, b = self.coords(d)
        best = math.inf
        for ka in (math.floor(a), math.ceil(a)):
            for kb in (math.floor(b), math.ceil(b)):
                best = min(best, abs(d - (ka + kb * self.tau)))
        return best

    def eq(self, p: TorusPoint, q: TorusPoint) -> bool:
        return self.lattice_distance(p, q) < self.tol

    def is_zero(self, p: TorusPoint) -> bool:
        return self.lattice_distance(p) < self.tol

    # ------------------------------------------------------------------ group law

    def add(self, p: TorusPoint, q: TorusPoint) -> TorusPoint:
        return self.reduce(p.z + q.z)

    def sub(self, p: TorusPoint, q: TorusPoint) -> TorusPoint:
        return self.reduce(p.z - q.z)

    def neg(self, p: TorusPoint) -> TorusPoint:
        return self.reduce(-p.z)

    def mul_int(self, m: int, p: TorusPoint) -> TorusPoint:
        return self.reduce(m * p.z)

    def torsion_points(self, n: int) -> list[TorusPoint]:
        """The n^2 points of E[n] as (a + b*tau)/n, in lexicographic (a, b) order."""
        if n < 1:
            raise ValueError("n must be a positive integer")
        return [self.reduce((a + b * self.tau) / n) for a in range(n) for b in range(n)]

    def solve_scaled(self, m: int, s: TorusPoint) -> list[TorusPoint]:
        """All m^2 solutions x of m*x = s, as the coset s/m + E[|m|].

        Solutions come in lexicographic (a, b) order of the torsion offset,
        for reproducibility.
        """
        if m == 0:
            raise ValueError("m must be nonzero")
        base = s.z / m
        k = abs(m)
        return [self.reduce(base + (a + b * self.tau) / k) for a in range(k) for b in range(k)]

    def random_point(self, rng) -> TorusPoint:
        a, b = rng.random(2)
        return TorusPoint(a + b * self.tau)

    # ------------------------------------------------------------------ divisor classes

    def divisor_class(self, points: list[TorusPoint], weights: list[int] | None = None) -> DivisorClass:
        """Class of the divisor sum(w_i * [p_i]): degree sum(w_i), AJ point sum(w_i * p_i)."""
        if weights is None:
            weights = [1] * len(points)
        if len(weights) != len(points):
            raise ValueError("points and weights must have equal length")
        deg = sum(weights)
        aj = self.reduce(sum((w * p.z for w, p in zip(weights, points)), 0j))
        return DivisorClass(deg, aj)

    def trivial_class(self) -> DivisorClass:
        return DivisorClass(0, self.zero())

    def tensor(self, A: DivisorClass, B: DivisorClass) -> DivisorClass:
        return DivisorClass(A.degree + B.degree, self.add(A.aj, B.aj))

    def dual_class(self, A: DivisorClass) -> DivisorClass:
        return DivisorClass(-A.degree, self.neg(A.aj))

    def is_trivial(self, A: DivisorClass) -> bool:
        return A.degree == 0 and self.is_zero(A.aj)

    def class_eq(self, A: DivisorClass, B: DivisorClass) -> bool:
        return A.degree == B.degree and self.eq(A.aj, B.aj)
