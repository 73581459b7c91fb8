"""Theta-function embedding of an elliptic curve into P^(n-1).

The basis of the degree-n complete linear system is realized by theta
functions with rational characteristics k/n at modulus n*tau,

    theta_k(x) = sum_m exp(pi*i*tau*n*(m + k/n)^2
                           + 2*pi*i*n*(m + k/n)*(x - s0/n)),

shifted by a calibrated offset s0 so that the zeros of every section sum
to 0 on the curve.  In these coordinates translation by n-torsion acts
through the finite Heisenberg group: a diagonal character matrix for
x -> x + 1/n and a cyclic coordinate shift for x -> x + tau/n, commuting
up to the scalar zeta = exp(2*pi*i/n).  The series is entire, so all
derivatives are term-wise and are used both for Newton polishing and for
osculating-hyperplane kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .torus import Torus, TorusPoint
from .zeros import find_torus_zeros

__all__ = [
    "ThetaBasis",
    "ProjPoint",
    "Hyperplane",
    "make_basis",
    "default_truncation",
    "heisenberg_generators",
    "commutant_dimension",
    "translation_matrix",
    "dual_translation_matrix",
    "verify_translation_action",
    "proj_distance",
    "pairing",
]

_TWO_PI_I = 2j * math.pi


def default_truncation(n: int, tau: complex) -> int:
    """Smallest cutoff keeping the dropped tail below ~1e-18, plus margin."""
    target = 18.0 * math.log(10.0)
    return math.ceil(math.sqrt(target / (math.pi * n * tau.imag))) + 4


def _normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.all(np.isfinite(v)):
        raise ValueError("cannot normalize a zero or non-finite coordinate tuple")
    v = v / norm
    lead = np.flatnonzero(np.abs(v) > 1e-8)[0]
    return v * np.exp(-1j * np.angle(v[lead]))


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """Point of P^(n-1): unit-norm coordinates, first nonzero entry real-positive."""

    coords: np.ndarray

    @classmethod
    def of(cls, v) -> "ProjPoint":
        return cls(_normalize(v))


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Point of the dual P^(n-1), normalized the same way as ProjPoint."""

    coords: np.ndarray

    @classmethod
    def of(cls, v) -> "Hyperplane":
        return cls(_normalize(v))


def proj_distance(u, v) -> float:
    """Fubini-Study sine distance between projective coordinate tuples."""
    a = np.asarray(u.coords if hasattr(u, "coords") else u, dtype=complex)
    b = np.asarray(v.coords if hasattr(v, "coords") else v, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    overlap = abs(np.vdot(a, b))
    return math.sqrt(max(0.0, 1.0 - min(1.0, overlap) ** 2))


def pairing(H: Hyperplane, p: ProjPoint) -> complex:
    """The bilinear incidence pairing sum_k H_k p_k."""
    return complex(np.sum(H.coords * p.coords))


class ThetaBasis:
    """Calibratable basis of the degree-n theta system on a torus.

    The basis is usable uncalibrated (s0 = 0), but hyperplane sections
    then have a common nonzero Abel sum; `calibrate` measures that sum on
    one section and absorbs it into s0, after which every section's zeros
    sum to 0.  Calibrate before sharing across threads; everything else
    is pure.
    """

    def __init__(self, n: int, torus: Torus, truncation: int | None = None,
                 s0: TorusPoint | None = None):
        if n < 3:
            raise ValueError("embedding degree n must be at least 3")
        self.n = int(n)
        self.torus = torus
        self.truncation = int(truncation) if truncation else default_truncation(n, torus.tau)
        if self.truncation < 1:
            raise ValueError("truncation must be positive")
        self._s0 = s0
        self._grids()

    def _grids(self) -> None:
        n, tau = self.n, self.torus.tau
        m = np.arange(-self.truncation, self.truncation + 1, dtype=float)
        k = np.arange(n, dtype=float)
        self._m = m
        self._char = m[None, :] + (k / n)[:, None]              # (n, terms)
        self._gauss = np.exp(1j * math.pi * tau * n * self._char**2)
        self._freq = _TWO_PI_I * n * self._char

    @property
    def s0(self) -> TorusPoint | None:
        return self._s0

    @property
    def calibrated(self) -> bool:
        return self._s0 is not None

    @property
    def offset(self) -> complex:
        return self._s0.z / self.n if self._s0 is not None else 0j

    # ------------------------------------------------------------ evaluation

    def eval_all(self, z, order: int = 0) -> np.ndarray:
        """Values theta_k^(order)(z) for all k: shape (n, len(z))."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        y = z - self.offset
        n = self.n
        # separable linear phase: exp(2 pi i n (m + k/n) y) = E_m(y) * W_k(y)
        em = np.exp(_TWO_PI_I * n * np.outer(self._m, y))
        wk = np.exp(_TWO_PI_I * np.outer(np.arange(n), y))
        weights = self._gauss if order == 0 else self._gauss * self._freq**order
        return (weights @ em) * wk

    def eval_one(self, k: int, x: TorusPoint, order: int = 0) -> complex:
        if not 0 <= k < self.n:
            raise ValueError(f"basis index k must lie in [0, {self.n})")
        return complex(self.eval_all(np.array([x.z]), order)[k, 0])

    def section(self, coeffs: np.ndarray, z, order: int = 0) -> np.ndarray:
        """Values of the section sum_k coeffs[k] * theta_k at the points z."""
        return np.asarray(coeffs, dtype=complex) @ self.eval_all(z, order)

    def section_factory(self, coeffs):
        """Derivative factory of a section, for the zero finder."""
        c = np.asarray(coeffs, dtype=complex)

        def deriv(order: int):
            return lambda z: self.section(c, z, order)

        return deriv

    # ------------------------------------------------------------ embedding

    def embed(self, x: TorusPoint) -> ProjPoint:
        v = self.eval_all(np.array([x.z]))[:, 0]
        return ProjPoint.of(v)

    # ------------------------------------------------------------ calibration

    def calibrate(self) -> TorusPoint:
        """Fix s0 so that section zero-sums vanish; idempotent."""
        if self._s0 is not None:
            return self._s0
        rng = np.random.default_rng(11)
        coeffs = rng.standard_normal(self.n) + 1j * rng.standard_normal(self.n)
        zs = find_torus_zeros(self.section_factory(coeffs), self.torus, expected=self.n)
        total = sum(m * p.z for p, m in zs.zeros)
        self._s0 = self.torus.reduce(-total)
        return self._s0

    # ------------------------------------------------------------ osculation

    def osculating_matrix(self, x: TorusPoint) -> np.ndarray:
        """Rows j = 0..n-1 of j-th derivatives of the basis at x, row-scaled."""
        rows = [self.eval_all(np.array([x.z]), order=j)[:, 0] for j in range(self.n)]
        mat = np.array(rows)
        scal = np.linalg.norm(mat, axis=1, keepdims=True)
        return mat / scal

    def osculating_hyperplane(self, x: TorusPoint) -> Hyperplane:
        """The hyperplane meeting the curve only at x, with full multiplicity n.

        Exists exactly when n*x = 0 on the calibrated curve; otherwise the
        order-n vanishing conditions are of full rank and a ValueError is
        raised.
        """
        mat = self.osculating_matrix(x)
        _, sing, vh = np.linalg.svd(mat)
        ratio = sing[-1] / sing[0]
        if ratio > 1e-8:
            raise ValueError(
                f"no osculating hyperplane at {x}: torsion condition fails "
                f"(singular-value ratio {ratio:.2e})"
            )
        return Hyperplane.of(vh[-1].conj())


def make_basis(n: int, tau: complex = 1j, tol: float = 1e-9,
               truncation: int | None = None) -> ThetaBasis:
    """Convenience factory: build and calibrate a basis on a fresh torus."""
    basis = ThetaBasis(n, Torus(tau=tau, tol=tol), truncation=truncation)
    basis.calibrate()
    return basis


# ---------------------------------------------------------------- Heisenberg


def heisenberg_generators(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Generators of the finite Heisenberg group: A*B = zeta*B*A.

    A is the character diagonal diag(1, zeta, ..., zeta^(n-1)); B is the
    cyclic shift with B e_j = e_(j+1 mod n).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    zeta = np.exp(_TWO_PI_I / n)
    A = np.diag(zeta ** np.arange(n))
    B = np.zeros((n, n), dtype=complex)
    B[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    return A, B


def commutant_dimension(mats) -> int:
    """Dimension of {X : XM = MX for all given M}, by rank of the linear system."""
    n = mats[0].shape[0]
    eye = np.eye(n)
    blocks = [np.kron(eye, M.T) - np.kron(M, eye) for M in mats]
    sing = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    return int(np.sum(sing < 1e-10 * sing[0]))


def _torsion_exponents(xi: TorusPoint, basis: ThetaBasis) -> tuple[int, int]:
    n, torus = basis.n, basis.torus
    a, b = torus.coords(xi.z)
    ia, ib = round(n * a), round(n * b)
    if max(abs(n * a - ia), abs(n * b - ib)) > 1e-6:
        raise ValueError(f"{xi} is not an n-torsion point for n={n}")
    return ia % n, ib % n


def translation_matrix(xi: TorusPoint, basis: ThetaBasis) -> np.ndarray:
    """Matrix M with embed(x + xi) = M . embed(x) projectively, xi in E[n].

    Translation by 1/n multiplies theta_k by zeta^k (matrix A); translation
    by tau/n shifts the characteristic k -> k+1 up to a common factor
    (matrix B^T).  A general (a + b*tau)/n therefore maps to A^a (B^T)^b.
    """
    a, b = _torsion_exponents(xi, basis)
    A, B = heisenberg_generators(basis.n)
    return np.linalg.matrix_power(A, a) @ np.linalg.matrix_power(B.T, b)


def dual_translation_matrix(xi: TorusPoint, basis: ThetaBasis) -> np.ndarray:
    """Action of translation on hyperplane coordinates: inverse transpose."""
    return np.linalg.inv(translation_matrix(xi, basis)).T


def verify_translation_action(xi: TorusPoint, basis: ThetaBasis,
                              samples: int = 50, seed: int = 123) -> float:
    """Max projective distance between embed(x + xi) and M(xi)*embed(x)."""
    M = translation_matrix(xi, basis)
    rng = np.random.default_rng(seed)
    torus = basis.torus
    worst = 0.0
    for _ in range(samples):
        x = torus.random_point(rng)
        lhs = basis.embed(torus.add(x, xi))
        rhs = M @ basis.embed(x).coords
        worst = max(worst, proj_distance(lhs, rhs))
    return worst
