"""Closed-form large-n limits: compressed projection norms, the optimal
output spectrum, entropies and the additivity-violation gap.

All entropies are in nats.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GapReport:
    k: int
    t: float
    phi1: float
    s_limit: float
    hw_half: float
    delta: float

    def to_dict(self) -> dict:
        return asdict(self)


def _unit_interval(name, x):
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")
    return x


def phi(u, t) -> float:
    """Norm of a trace-u projection compressed by a free projection of trace t.

    The expression is evaluated on the sorted pair so that ``phi(u, t)`` and
    ``phi(t, u)`` are bitwise equal.
    """
    u = _unit_interval("u", u)
    t = _unit_interval("t", t)
    a, b = (u, t) if u <= t else (t, u)
    if a + b >= 1.0:
        return 1.0
    return a + b - 2.0 * a * b + 2.0 * math.sqrt(a * b * (1.0 - a) * (1.0 - b))


def t_norm_two_level(lo, hi, u, t) -> float:
    """Limit norm of ``lo*I + (hi - lo)*Q`` with Q a projection of normalized trace u.

    Uses ``lo + (hi - lo) * phi(u, t)``: the compression of ``lo*I`` by p_t is
    ``lo*p_t``, which shifts the nonzero part of the spectrum rigidly.
    """
    lo = float(lo)
    hi = float(hi)
    if lo < 0 or hi < lo:
        raise DomainError(f"need hi >= lo >= 0, got lo={lo}, hi={hi}")
    if hi == lo:
        return lo
    return lo + (hi - lo) * phi(u, t)


def x_star(k: int, t) -> np.ndarray:
    """Entropy-minimizing point of the limit output set (as a spectrum)."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise DomainError(f"t must lie in (0, 1], got {t}")
    top = phi(1.0 / k, t)
    out = np.full(k, (1.0 - top) / (k - 1))
    out[0] = top
    return out


def entropy(p) -> float:
    """Shannon entropy in nats, with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def hw_upper_bound(k: int, r) -> float:
    """Entropy of ``(r, (1-r)/(k^2-1), ...)``, the largest entropy a k^2 spectrum
    with top eigenvalue r can have."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    r = float(r)
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    m = k * k - 1
    rest = (1.0 - r) / m
    return -r * math.log(r) - (1.0 - r) * math.log(rest)


def violation_gap(k: int, t) -> GapReport:
    """``S_limit - hw/2``; positive means the conjugate pair violates additivity."""
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    xs = x_star(k, t)
    s = entropy(xs)
    hw_half = hw_upper_bound(k, t) / 2.0
    return GapReport(k=k, t=t, phi1=float(xs[0]), s_limit=s, hw_half=hw_half, delta=s - hw_half)


def gamma_star(k: int, t) -> np.ndarray:
    """Limit spectrum of the Bell-state output of the conjugate pair, length k^2."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    t = _unit_interval("t", t)
    k2 = k * k
    out = np.full(k2, (1.0 - t) / k2)
    out[0] += t
    return out
