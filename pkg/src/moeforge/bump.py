"""Exact C^6 bump function on [0, 1] as a rational piecewise polynomial.

Construction: the tent map f, the operator

    (H w)(t) = w(2t)        for t <= 1/2
             = -w(2t - 1)   for t >= 1/2

applied five times (piecewise linear on the grid of multiples of 1/64),
then six-fold integration from 0, which equals
``h(x) = int_0^x (x-t)^5/5! H^5 f(t) dt``. Finally ``g = 2^21 h``.

Each piece stores its coefficients in the local variable ``s = x - b_i``
where ``b_i`` is the left breakpoint, which keeps float evaluation well
conditioned on the short dyadic pieces.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np

Poly = tuple  # ascending coefficients, Fractions

SUP_ROOT_TOL = 1e-13


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def peval(p: Poly, s):
    acc = 0 * s
    for c in reversed(p):
        acc = acc * s + c
    return acc


def pderiv(p: Poly) -> Poly:
    return _trim([i * c for i, c in enumerate(p)][1:] or [Fraction(0)])


def pinteg(p: Poly, const=Fraction(0)) -> Poly:
    return _trim([const] + [c / (i + 1) for i, c in enumerate(p)])


def pmul(p: Poly, q: Poly) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def pscale_arg(p: Poly, c) -> Poly:
    """Coefficients of ``s -> p(c s)``."""
    return tuple(a * c**i for i, a in enumerate(p))


@dataclass(frozen=True)
class PiecewisePoly:
    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]

    def __post_init__(self):
        assert len(self.breakpoints) == len(self.pieces) + 1

    @property
    def degree(self) -> int:
        return max(len(p) - 1 for p in self.pieces)

    def widths(self):
        b = self.breakpoints
        return [b[i + 1] - b[i] for i in range(len(self.pieces))]

    def scaled(self, c) -> "PiecewisePoly":
        return PiecewisePoly(self.breakpoints, tuple(tuple(c * a for a in p) for p in self.pieces))

    def derivative(self, order: int = 1) -> "PiecewisePoly":
        pieces = self.pieces
        for _ in range(order):
            pieces = tuple(pderiv(p) for p in pieces)
        return PiecewisePoly(self.breakpoints, pieces)

    def antiderivative(self) -> "PiecewisePoly":
        """Continuous antiderivative vanishing at the left end."""
        out = []
        acc = Fraction(0)
        for p, w in zip(self.pieces, self.widths()):
            q = pinteg(p, acc)
            out.append(q)
            acc = peval(q, w)
        return PiecewisePoly(self.breakpoints, tuple(out))

    def piece_index(self, x) -> int:
        i = bisect.bisect_right(self.breakpoints, x) - 1
        return min(max(i, 0), len(self.pieces) - 1)

    def __call__(self, x):
        """Value at x in [b_0, b_m]; exact for rational x."""
        i = self.piece_index(x)
        return peval(self.pieces[i], x - self.breakpoints[i])

    def right_limit_values(self, i: int, orders: Sequence[int]):
        """Derivatives of piece i at its right end."""
        w = self.breakpoints[i + 1] - self.breakpoints[i]
        p = self.pieces[i]
        out = []
        for j in orders:
            q = p
            for _ in range(j):
                q = pderiv(q)
            out.append(peval(q, w))
        return out

    def evaluate_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        bps = np.array([float(b) for b in self.breakpoints])
        idx = np.clip(np.searchsorted(bps, xs, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty_like(xs)
        for i, p in enumerate(self.pieces):
            mask = idx == i
            if mask.any():
                coeffs = [float(c) for c in reversed(p)]
                out[mask] = np.polyval(coeffs, xs[mask] - bps[i])
        return out

    def continuity_residues(self, max_order: int) -> list[Fraction]:
        """Jumps of derivatives 0..max_order across every interior breakpoint."""
        res = []
        orders = range(max_order + 1)
        for i in range(len(self.pieces) - 1):
            left = self.right_limit_values(i, orders)
            q = self.pieces[i + 1]
            for j in orders:
                res.append(left[j] - _deriv_at_zero(q, j))
        return res

    def to_dict(self) -> dict:
        return {
            "basis": "local: piece i is a polynomial in (x - breakpoints[i]), ascending powers",
            "breakpoints": [_frac_str(b) for b in self.breakpoints],
            "coeffs": [[_frac_str(c) for c in p] for p in self.pieces],
        }


def _deriv_at_zero(p: Poly, j: int):
    return p[j] * factorial(j) if j < len(p) else Fraction(0)


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def tent() -> PiecewisePoly:
    half = Fraction(1, 2)
    return PiecewisePoly(
        (Fraction(0), half, Fraction(1)),
        ((Fraction(0), Fraction(2)), (Fraction(1), Fraction(-2))),
    )


def apply_h(w: PiecewisePoly) -> PiecewisePoly:
    """Compress w into [0, 1/2] and its negative into [1/2, 1]."""
    half = Fraction(1, 2)
    bps = [b / 2 for b in w.breakpoints] + [half + b / 2 for b in w.breakpoints[1:]]
    first = [pscale_arg(p, 2) for p in w.pieces]
    second = [tuple(-c for c in q) for q in first]
    return PiecewisePoly(tuple(bps), tuple(first + second))


def moment(w: PiecewisePoly, k: int) -> Fraction:
    """Exact ``int_0^1 (1 - t)^k w(t) dt``."""
    total = Fraction(0)
    for b, p, width in zip(w.breakpoints, w.pieces, w.widths()):
        c = 1 - b
        weight = tuple(Fraction(comb(k, i)) * c ** (k - i) * (-1) ** i for i in range(k + 1))
        total += peval(pinteg(pmul(weight, p)), width)
    return total


@lru_cache(maxsize=1)
def build_bump() -> tuple[PiecewisePoly, PiecewisePoly]:
    """Return (h, g) with ``h(1) = 2^-21`` and ``g = 2^21 h``."""
    w = tent()
    for _ in range(5):
        w = apply_h(w)
    h = w
    for _ in range(6):
        h = h.antiderivative()
    return h, h.scaled(Fraction(2**21))


def bump_eval(p: PiecewisePoly, x, order: int = 0):
    """order-th derivative of the bump extended by 0 left of 0 and constant right of 1.

    Rational x gives an exact Fraction.
    """
    if not 0 <= order <= 7:
        raise ValueError(f"order must lie in 0..7, got {order}")
    exact = isinstance(x, (int, Fraction))
    lo, hi = p.breakpoints[0], p.breakpoints[-1]
    if x <= lo:
        return Fraction(0) if exact else 0.0
    if x >= hi:
        if order:
            return Fraction(0) if exact else 0.0
        v = p(hi)
        return v if exact else float(v)
    q = p.derivative(order) if order else p
    if exact:
        return q(Fraction(x))
    i = q.piece_index(x)
    coeffs = [float(c) for c in reversed(q.pieces[i])]
    return float(np.polyval(coeffs, x - float(q.breakpoints[i])))


def _piece_sup(p: Poly, width: Fraction) -> float:
    """max |p(s)| over s in [0, width]."""
    cands = [Fraction(0), width]
    dp = pderiv(p)
    if len(dp) == 2:
        r = -dp[0] / dp[1]
        if 0 < r < width:
            cands.append(r)
    elif len(dp) > 2:
        w = float(width)
        fdp = [float(c) for c in dp]
        roots = np.roots(fdp[::-1])
        for r in roots:
            if abs(r.imag) > 1e-9 * w or not -1e-9 * w < r.real < w * (1 + 1e-9):
                continue
            cands.append(Fraction(_polish_root(fdp, r.real, w)))
    return max(abs(float(peval(p, c))) for c in cands)


def _polish_root(fdp, r, w):
    """Bisection on the derivative around a numerical root, when it changes sign."""
    r = min(max(r, 0.0), w)
    f = lambda s: np.polyval(fdp[::-1], s)  # noqa: E731
    a, b = max(r - 1e-6 * w, 0.0), min(r + 1e-6 * w, w)
    fa, fb = f(a), f(b)
    if fa == 0 or fb == 0 or np.sign(fa) == np.sign(fb):
        return r
    while b - a > SUP_ROOT_TOL * max(w, 1.0):
        m = 0.5 * (a + b)
        fm = f(m)
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def bump_supnorms(g: PiecewisePoly, orders=range(1, 7)) -> dict[int, float]:
    """Sup-norms of the derivatives of g over [0, 1] (they vanish outside)."""
    out = {}
    for j in orders:
        d = g.derivative(j)
        out[j] = max(_piece_sup(p, w) for p, w in zip(d.pieces, d.widths()))
    return out
