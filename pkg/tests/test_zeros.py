"""Tests for the argument-principle zero finder.

The synthetic oracle is a product of translated odd Jacobi theta factors:
the odd theta vanishes exactly on the lattice, so a product of translates
has a fully known, lattice-periodic zero set with chosen multiplicities.
Derivatives of the product come from the Leibniz rule over the factors,
independent of anything in the package.
"""

import itertools
import math

import numpy as np
import pytest

from ellgeom import Torus
from ellgeom.zeros import CountMismatchError, ZeroSet, find_torus_zeros


def _odd_theta_factory(tau, trunc=8):
    """theta[1/2,1/2](z; tau): zeros exactly at Z + tau*Z, all simple."""
    m = np.arange(-trunc, trunc + 1) + 0.5

    def deriv(order):
        def ev(z):
            z = np.asarray(z, dtype=complex)
            phase = np.exp(
                1j * math.pi * tau * m**2 + 2j * math.pi * np.outer(z + 0.5, m)
            )
            return phase @ ((2j * math.pi * m) ** order * np.ones_like(m))

        return ev

    return deriv


def _product_factory(tau, roots_mults):
    """Derivative factory for prod_j t1(z - r_j)^(m_j) via the Leibniz rule."""
    base = _odd_theta_factory(tau)
    factors = []
    for r, m in roots_mults:
        factors.extend([r] * m)

    def deriv(order):
        # terms: map from per-factor derivative orders to coefficient
        terms = {tuple([0] * len(factors)): 1.0}
        for _ in range(order):
            nxt = {}
            for orders, c in terms.items():
                for i in range(len(factors)):
                    bumped = list(orders)
                    bumped[i] += 1
                    key = tuple(bumped)
                    nxt[key] = nxt.get(key, 0.0) + c
            terms = nxt

        def ev(z):
            z = np.asarray(z, dtype=complex)
            out = np.zeros_like(z)
            for orders, c in terms.items():
                term = np.full_like(z, c)
                for r, o in zip(factors, orders):
                    term = term * base(o)(z - r)
                out += term
            return out

        return ev

    return deriv


@pytest.fixture(params=[1j, 0.3 + 1.1j], ids=["tau_i", "tau_generic"])
def torus(request):
    return Torus(tau=request.param)


def _expect_zeros(torus, result: ZeroSet, wanted):
    assert result.total == sum(m for _, m in wanted)
    assert len(result.zeros) == len(wanted)
    got = list(result.zeros)
    for r, m in wanted:
        hit = [
            i
            for i, (p, mult) in enumerate(got)
            if torus.lattice_distance(p, torus.reduce(r)) < 1e-8 and mult == m
        ]
        assert hit, f"zero {r} (mult {m}) not found in {got}"
        got.pop(hit[0])
    assert not got


def test_simple_zeros(torus):
    tau = torus.tau
    wanted = [(0.31 + 0.62 * tau, 1), (0.74 + 0.18 * tau, 1), (0.12 + 0.12 * tau, 1)]
    res = find_torus_zeros(_product_factory(tau, wanted), torus, expected=3)
    _expect_zeros(torus, res, wanted)
    assert res.residual < 1e-9


def test_zero_at_lattice_corner(torus):
    # a zero at 0 sits on every corner of the standard cell; the window
    # shifting must step around it
    tau = torus.tau
    wanted = [(0j, 1), (0.5 + 0.5 * tau, 1)]
    res = find_torus_zeros(_product_factory(tau, wanted), torus, expected=2)
    _expect_zeros(torus, res, wanted)


def test_double_and_triple_zeros(torus):
    tau = torus.tau
    wanted = [(0.27 + 0.4 * tau, 2), (0.66 + 0.81 * tau, 1)]
    res = find_torus_zeros(_product_factory(tau, wanted), torus, expected=3)
    _expect_zeros(torus, res, wanted)

    wanted = [(0.55 + 0.25 * tau, 3)]
    res = find_torus_zeros(_product_factory(tau, wanted), torus, expected=3)
    _expect_zeros(torus, res, wanted)


def test_quadruple_zero(torus):
    tau = torus.tau
    wanted = [(0.35 + 0.71 * tau, 4), (0.81 + 0.13 * tau, 1)]
    res = find_torus_zeros(_product_factory(tau, wanted), torus, expected=5)
    _expect_zeros(torus, res, wanted)


def test_close_pair_resolved(torus):
    tau = torus.tau
    wanted = [(0.4 + 0.5 * tau, 1), (0.4 + 3e-4 + 0.5 * tau, 1)]
    res = find_torus_zeros(_product_factory(tau, wanted), torus, expected=2)
    _expect_zeros(torus, res, wanted)


def test_count_mismatch_raises(torus):
    tau = torus.tau
    wanted = [(0.31 + 0.62 * tau, 1), (0.74 + 0.18 * tau, 1)]
    with pytest.raises(CountMismatchError):
        find_torus_zeros(_product_factory(tau, wanted), torus, expected=5)


def test_zeros_sorted_deterministically(torus):
    tau = torus.tau
    wanted = [(0.9 + 0.9 * tau, 1), (0.1 + 0.2 * tau, 1), (0.5 + 0.5 * tau, 1)]
    factory = _product_factory(tau, wanted)
    a = find_torus_zeros(factory, torus, expected=3)
    b = find_torus_zeros(factory, torus, expected=3)
    assert [(p.z, m) for p, m in a.zeros] == [(p.z, m) for p, m in b.zeros]
    coords = [torus.coords(p.z) for p, _ in a.zeros]
    assert coords == sorted(coords)
