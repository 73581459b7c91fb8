"""Zero location on a complex torus via the argument principle.

The central routine finds all zeros, with multiplicities, of an entire
function inside one lattice cell by winding-number counting over an
adaptive quadtree of parallelogram boxes.  The functions handled here
(theta sections and their Wronskians) are quasi-periodic, so their zero
set is lattice-periodic and the search window can be translated freely;
a deterministic shift table retries whenever a zero lands too close to a
contour or to a subdivision line.

Winding numbers come from the discrete total argument change along box
contours, with edges refined until consecutive phase steps are small and
unambiguous; child winding numbers must sum to the parent's, which guards
against phase aliasing.  Simple zeros are polished by Newton iteration.
A zero of multiplicity m is polished as a simple zero of the (m-1)-st
derivative, which stays well conditioned where the function itself is
numerically flat.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .torus import Torus, TorusPoint

__all__ = ["ZeroSet", "find_torus_zeros", "RootIsolationError", "CountMismatchError"]

# factory: order j -> vectorized callable for the j-th derivative
DerivFactory = Callable[[int], Callable[[np.ndarray], np.ndarray]]

_WINDOW_SHIFTS = (
    (0.131718, 0.271772),
    (0.377913, 0.124137),
    (0.249164, 0.417391),
    (0.053311, 0.366725),
    (0.421956, 0.078919),
    (0.314159, 0.271828),
    (0.161803, 0.139581),
)
_SPLIT_FRACTIONS = (0.5, 0.44, 0.56, 0.38, 0.62)
_MAX_EDGE_POINTS = 4096


class RootIsolationError(RuntimeError):
    """Every window shift left a zero too close to some contour."""


class CountMismatchError(RuntimeError):
    """Winding total over a full cell disagrees with the expected zero count."""


class _ContourTrouble(Exception):
    pass


class _SplitBlocked(Exception):
    pass


@dataclass
class ZeroSet:
    """Zeros of one function in one lattice cell, sorted by lattice coordinates."""

    zeros: list[tuple[TorusPoint, int]]
    residual: float

    @property
    def total(self) -> int:
        return sum(m for _, m in self.zeros)


def find_torus_zeros(deriv: DerivFactory, torus: Torus, expected: int | None = None) -> ZeroSet:
    """All zeros of deriv(0) in one lattice cell, with multiplicities.

    ``deriv(j)`` must return a vectorized callable for the j-th derivative;
    orders up to the largest multiplicity present are requested.  When
    ``expected`` is given, a clean winding total differing from it raises
    CountMismatchError (a truncation/conditioning failure, not retryable).
    """
    f = deriv(0)
    df = deriv(1)
    for sa, sb in _WINDOW_SHIFTS:
        try:
            return _search_window(deriv, f, df, torus, sa, sb, expected)
        except _ContourTrouble:
            continue
    raise RootIsolationError("no window shift kept zeros clear of the contours")


# ---------------------------------------------------------------- contour work


def _edge_points(p: complex, q: complex, ts: np.ndarray) -> np.ndarray:
    return p + ts * (q - p)


def _refine_edge(f, p: complex, q: complex, ts: np.ndarray, vals: np.ndarray, floor: float) -> float:
    """Total argument change of f along [p, q], refining until steps are unambiguous."""
    for _ in range(20):
        if np.min(np.abs(vals)) <= floor:
            raise _ContourTrouble("contour point too close to a zero")
        ratio = vals[1:] / vals[:-1]
        darg = np.angle(ratio)
        swing = np.abs(np.log(np.abs(ratio)))
        bad = (np.abs(darg) > 0.9) | (swing > 1.2)
        if not bad.any():
            return float(darg.sum())
        if ts.size > _MAX_EDGE_POINTS:
            raise _ContourTrouble("edge refinement exhausted")
        mids = 0.5 * (ts[:-1][bad] + ts[1:][bad])
        new_vals = f(_edge_points(p, q, mids))
        ts = np.concatenate([ts, mids])
        vals = np.concatenate([vals, new_vals])
        order = np.argsort(ts)
        ts = ts[order]
        vals = vals[order]
    raise _ContourTrouble("edge refinement did not converge")


def _box_corners(box, tau: complex) -> list[complex]:
    a0, b0, da, db = box
    return [
        a0 + b0 * tau,
        (a0 + da) + b0 * tau,
        (a0 + da) + (b0 + db) * tau,
        a0 + (b0 + db) * tau,
    ]


def _box_winding(f, tau: complex, box) -> tuple[int, float]:
    """Winding number of f around the box contour and the contour max |f|."""
    corners = _box_corners(box, tau)
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    ts0 = np.linspace(0.0, 1.0, 9)
    pts = np.concatenate([_edge_points(p, q, ts0) for p, q in edges])
    vals = f(pts)
    if not np.all(np.isfinite(vals)):
        raise _ContourTrouble("non-finite contour value")
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0:
        raise _ContourTrouble("function vanishes on the whole contour")
    floor = 1e-10 * scale
    total = 0.0
    for i, (p, q) in enumerate(edges):
        total += _refine_edge(f, p, q, ts0.copy(), vals[9 * i : 9 * (i + 1)].copy(), floor)
    k = total / (2.0 * math.pi)
    w = round(k)
    if abs(k - w) > 0.2 or w < 0:
        raise _ContourTrouble(f"ambiguous winding total {k:.3f}")
    return w, scale


def _split_box(f, tau: complex, box, bscale: float):
    """Quarter the box along lines on which |f| stays safely above zero."""
    a0, b0, da, db = box
    floor = 1e-9 * bscale
    ts = np.linspace(0.0, 1.0, 17)

    def line_ok(frac: float, vertical: bool) -> bool:
        if vertical:
            pts = (a0 + frac * da) + (b0 + ts * db) * tau
        else:
            pts = (a0 + ts * da) + (b0 + frac * db) * tau
        return float(np.min(np.abs(f(pts)))) > floor

    fa = next((fr for fr in _SPLIT_FRACTIONS if line_ok(fr, True)), None)
    fb = next((fr for fr in _SPLIT_FRACTIONS if line_ok(fr, False)), None)
    if fa is None or fb is None:
        raise _SplitBlocked
    am, bm = fa * da, fb * db
    return [
        (a0, b0, am, bm),
        (a0 + am, b0, da - am, bm),
        (a0, b0 + bm, am, db - bm),
        (a0 + am, b0 + bm, da - am, db - bm),
    ]


# ---------------------------------------------------------------- polishing


def _newton(f, df, z0: complex, cap: float) -> complex | None:
    z = z0
    for _ in range(80):
        fz = complex(f(np.array([z]))[0])
        dz = complex(df(np.array([z]))[0])
        if dz == 0 or not (cmath.isfinite(fz) and cmath.isfinite(dz)):
            return None
        step = fz / dz
        z = z - step
        if abs(z - z0) > cap:
            return None
        if abs(step) < 1e-13 * (1.0 + abs(z)):
            return z
    return None


def _center(box, tau: complex) -> complex:
    a0, b0, da, db = box
    return (a0 + 0.5 * da) + (b0 + 0.5 * db) * tau


def _inside(box, tau: complex, z: complex, slack: float) -> bool:
    a0, b0, da, db = box
    b = z.imag / tau.imag
    a = z.real - b * tau.real
    return (a0 - slack * da <= a <= a0 + (1 + slack) * da) and (
        b0 - slack * db <= b <= b0 + (1 + slack) * db
    )


# ---------------------------------------------------------------- main search


def _search_window(deriv, f, df, torus, sa, sb, expected) -> ZeroSet:
    tau = torus.tau
    root_box = (sa, sb, 1.0, 1.0)
    w_total, scale = _box_winding(f, tau, root_box)
    if expected is not None and w_total != expected:
        raise CountMismatchError(
            f"found {w_total} zeros per cell, expected {expected}: "
            "truncation or conditioning failure"
        )
    noise_guard = 1e-11 * scale
    min_cluster = 2e-7 * (1.0 + abs(tau))
    isolate = 0.04 * (1.0 + abs(tau))
    found: list[tuple[complex, int]] = []
    stack: list[tuple[tuple, int, float]] = [(root_box, w_total, scale)]
    while stack:
        box, w, bscale = stack.pop()
        diam = abs(box[2]) + abs(box[3] * tau)
        if w == 1:
            if diam < min_cluster:
                found.append((_center(box, tau), 1))
                continue
            if diam < isolate:
                z = _newton(f, df, _center(box, tau), 4.0 * diam + 1e-9)
                if z is not None and _inside(box, tau, z, slack=0.45):
                    found.append((z, 1))
                    continue
        elif w >= 2 and (diam < min_cluster or bscale < noise_guard):
            z0 = _center(box, tau)
            z = _newton(deriv(w - 1), deriv(w), z0, 8.0 * diam + 1e-9)
            if z is None or not _inside(box, tau, z, slack=2.0):
                z = z0
            found.append((z, w))
            continue
        try:
            children = _split_box(f, tau, box, bscale)
        except _SplitBlocked:
            if w >= 2:
                # |f| is flat around a multiple zero; stop splitting here
                z0 = _center(box, tau)
                z = _newton(deriv(w - 1), deriv(w), z0, 8.0 * diam + 1e-9)
                if z is None or not _inside(box, tau, z, slack=2.0):
                    z = z0
                found.append((z, w))
                continue
            raise _ContourTrouble("cannot split around a simple zero")
        tally = 0
        kids = []
        for ch in children:
            wc, cscale = _box_winding(f, tau, ch)
            tally += wc
            if wc > 0:
                kids.append((ch, wc, cscale))
        if tally != w:
            raise _ContourTrouble("child windings do not sum to parent")
        stack.extend(kids)

    assert sum(m for _, m in found) == w_total
    # residuals are checked at the window representatives: f is only
    # quasi-periodic, so |f| at the reduced point would be rescaled
    fvals = np.abs(f(np.array([z for z, _ in found]))) if found else np.array([0.0])
    reduced = [(torus.reduce(z), m) for z, m in found]
    reduced.sort(key=lambda zm: torus.coords(zm[0].z))
    return ZeroSet(zeros=reduced, residual=float(np.max(fvals)) / scale)
