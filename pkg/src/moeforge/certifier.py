"""Deterministic certification of minimum-output-entropy additivity violation.

Everything that depends on the input dimension n is evaluated on ln n.
Counts that must be compared exactly (n against a threshold, t*k*n against
the integers) are held as Python integers inside :class:`ExtendedCount`.
Rounding is directed against validity by a relative margin (default 1e-9),
which dominates the ~1e-15 relative error of double-precision logarithms.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal, InvalidOperation
from fractions import Fraction
from functools import total_ordering

import numpy as np

from .errors import DomainError, NoViolationError, NumericalError
from .freelimits import GapReport, violation_gap

LN10 = math.log(10.0)
INV_E = math.exp(-1.0)

# constants of the concentration bounds
THRESHOLD_CONST_LN = math.log(3**4) + 31 * math.log(2.0)  # 3^4 * 2^31
NET_PROB_DENOM = 576.0
ROUGH_CONST_LN = math.log(3.0) + 23 * math.log(2.0)  # 3 * 2^23
CONC_CONST_LN = 31 * math.log(2.0)  # 2^31
CONC_DENOM = 64.0

DEFAULT_TARGET = 1e20
DEFAULT_MARGIN = 0.01
ROUNDING_MARGIN = 1e-9
GRID_POINTS = 400
GRID_LO = 1e-16


def _decimal_context(ln_value: float) -> Context:
    digits = int(abs(ln_value) / LN10) + 40
    return Context(prec=max(digits, 50))


def int_from_ln(ln_value: float, *, ceil: bool = True) -> int:
    """Integer nearest to ``exp(ln_value)`` in the requested direction."""
    ctx = _decimal_context(ln_value)
    val = ctx.exp(Decimal(ln_value))
    rounding = ROUND_CEILING if ceil else ROUND_FLOOR
    return int(val.to_integral_value(rounding=rounding, context=ctx))


@total_ordering
@dataclass(frozen=True, eq=False)
class ExtendedCount:
    """A positive count that may exceed the double range, held as its natural log.

    ``exact`` carries the integer value when it is known exactly; comparisons
    between two exact counts are then exact.
    """

    ln_value: float
    exact: int | None = None

    @classmethod
    def from_int(cls, n: int) -> "ExtendedCount":
        n = int(n)
        if n < 1:
            raise DomainError(f"count must be >= 1, got {n}")
        return cls(math.log(n), n)

    @classmethod
    def from_ln(cls, ln_value: float) -> "ExtendedCount":
        return cls(float(ln_value), None)

    @classmethod
    def parse(cls, text: str) -> "ExtendedCount":
        """Parse ``"184"``, ``"1e53"`` or ``"2.5E46"``; integral values stay exact."""
        try:
            dec = Decimal(str(text).strip())
        except InvalidOperation as exc:
            raise DomainError(f"cannot parse count {text!r}") from exc
        if not dec.is_finite() or dec <= 0:
            raise DomainError(f"count must be positive and finite, got {text!r}")
        if dec == dec.to_integral_value():
            return cls.from_int(int(dec))
        return cls(float(dec.ln(_decimal_context(float(dec.adjusted()) * LN10))), None)

    @property
    def exp10(self) -> int:
        if self.exact is not None:
            return len(str(self.exact)) - 1
        e = math.floor(self.ln_value / LN10)
        if 10.0 ** (self.ln_value / LN10 - e) >= 10.0:
            e += 1
        return e

    @property
    def significand(self) -> float:
        if self.exact is not None:
            s = str(self.exact)
            return float(s[0] + "." + (s[1:18] or "0"))
        return math.exp(self.ln_value - self.exp10 * LN10)

    def ceil_int(self) -> int:
        return self.exact if self.exact is not None else int_from_ln(self.ln_value)

    def __eq__(self, other):
        if not isinstance(other, ExtendedCount):
            return NotImplemented
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return self.ln_value == other.ln_value

    def __lt__(self, other):
        if not isinstance(other, ExtendedCount):
            return NotImplemented
        if self.exact is not None and other.exact is not None:
            return self.exact < other.exact
        return self.ln_value < other.ln_value

    def __hash__(self):
        return hash((self.ln_value, self.exact))

    def __str__(self):
        return f"{self.significand:.6g}e{self.exp10}"

    def to_dict(self) -> dict:
        out = {"significand": self.significand, "exp10": self.exp10, "ln_value": self.ln_value}
        if self.exact is not None:
            out["digits"] = str(self.exact)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "ExtendedCount":
        if obj.get("digits") is not None:
            return cls.from_int(int(obj["digits"]))
        if "ln_value" in obj:
            return cls.from_ln(obj["ln_value"])
        return cls.from_ln(math.log(obj["significand"]) + obj["exp10"] * LN10)


def _check_eps(eps, upper=1.0):
    eps = float(eps)
    if not 0.0 < eps < upper:
        raise DomainError(f"eps must lie in (0, {upper:g}), got {eps}")
    return eps


def threshold_ln(k: int, eps: float, ln_hint: float | None = None) -> tuple[float, int]:
    """Solve ``x = C + 2 ln(ln k + x)`` for x = ln n, C = ln(3^4 2^31 k^3 eps^-4).

    Newton iteration on ``x - C - 2 ln(ln k + x)``, started from ``ln_hint`` or
    from C (the bound without its log factor). Returns the root and the
    number of iterations used.
    """
    eps = _check_eps(eps)
    lnk = math.log(k)
    c = THRESHOLD_CONST_LN + 3 * lnk - 4 * math.log(eps)
    x = c if ln_hint is None else max(float(ln_hint), 1.0 - lnk)
    for it in range(1, 101):
        y = lnk + x
        x_new = x - (x - c - 2.0 * math.log(y)) / (1.0 - 2.0 / y)
        if abs(x_new - x) <= 1e-12 * abs(x_new):
            return x_new, it
        x = x_new
    raise NumericalError(f"threshold fixed point did not converge (k={k}, eps={eps})")


def n_threshold(
    k: int, eps: float, n_hint: ExtendedCount | None = None, rounding_margin: float = ROUNDING_MARGIN
) -> ExtendedCount:
    """Smallest n with ``n >= 3^4 2^31 ln^2(kn) k^3 eps^-4``, rounded up after a
    relative slack of ``rounding_margin``."""
    x, _ = threshold_ln(k, eps, None if n_hint is None else n_hint.ln_value)
    return ExtendedCount.from_int(int_from_ln(x + rounding_margin))


def _net_term(k: int, eps: float) -> float:
    return k * k * math.log(3.0 * k * k / eps)


def _concentration_term_ln(k: int, ln_n: float, eps: float) -> float:
    return ln_n - math.log(k) + 2.0 * math.log(eps) - math.log(NET_PROB_DENOM)


def log_prob_bound(
    k: int, n: ExtendedCount, eps: float, rounding_margin: float = ROUNDING_MARGIN
) -> float:
    """``k^2 ln(3k^2/eps) - (n/k) eps^2/576``, the log of the failure probability bound.

    The positive term is inflated and the negative term deflated by
    ``rounding_margin`` so that finite precision cannot favour validity.
    """
    eps = _check_eps(eps)
    pos = _net_term(k, eps) * (1.0 + rounding_margin)
    try:
        neg = math.exp(_concentration_term_ln(k, n.ln_value, eps)) * (1.0 - rounding_margin)
    except OverflowError:
        return -math.inf
    return pos - neg


def n_for_log_prob(
    k: int, eps: float, target: float, rounding_margin: float = ROUNDING_MARGIN
) -> ExtendedCount:
    """Smallest integer n with ``log_prob_bound(k, n, eps) <= -target``."""
    eps = _check_eps(eps)
    need = _net_term(k, eps) * (1.0 + rounding_margin) + target
    ln_n = (
        math.log(need)
        + math.log(k)
        + math.log(NET_PROB_DENOM)
        - 2.0 * math.log(eps)
        - math.log1p(-rounding_margin)
    )
    # 1e-12 absorbs the float error of re-evaluating log_prob_bound at this n
    return ExtendedCount.from_int(int_from_ln(ln_n + 1e-12))


def entropy_loss(k: int, eps: float) -> float:
    """``3 k eps |ln eps|``: entropy lost when moving by eps in Frobenius norm."""
    return 3.0 * k * eps * abs(math.log(eps))


def solve_epsilon(k: int, delta: float, margin: float = DEFAULT_MARGIN) -> float:
    """Largest eps in (0, 1/e] with ``3 k eps |ln eps| <= (1 - margin) delta``."""
    if delta <= 0:
        raise NoViolationError(f"gap {delta} is nonpositive; no eps exists")
    if not 0.0 <= margin < 1.0:
        raise DomainError(f"margin must lie in [0, 1), got {margin}")
    goal = (1.0 - margin) * delta
    if entropy_loss(k, INV_E) <= goal:
        return INV_E
    lo, hi = -745.0, -1.0
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if entropy_loss(k, math.exp(mid)) <= goal:
            lo = mid
        else:
            hi = mid
    return math.exp(lo)


@dataclass(frozen=True)
class Certificate:
    k: int
    t: Fraction
    n: ExtendedCount
    d_over_kn: Fraction
    epsilon: float | None
    delta: float
    entropy_loss: float | None
    n_threshold: ExtendedCount | None
    log_prob_bound: float | None
    target_log_confidence: float
    valid: bool
    reasons: tuple[str, ...] = ()
    gap: GapReport | None = None
    epsilon_rule: str = "optimized"
    margin: float = DEFAULT_MARGIN
    rounding_margin: float = ROUNDING_MARGIN
    n_log_prob: ExtendedCount | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        def ext(x):
            return None if x is None else x.to_dict()

        return {
            "k": self.k,
            "t": [self.t.numerator, self.t.denominator],
            "n": ext(self.n),
            "d_over_kn": [self.d_over_kn.numerator, self.d_over_kn.denominator],
            "epsilon": self.epsilon,
            "epsilon_rule": self.epsilon_rule,
            "delta": self.delta,
            "entropy_loss": self.entropy_loss,
            "n_threshold": ext(self.n_threshold),
            "n_log_prob": ext(self.n_log_prob),
            "log_prob_bound": self.log_prob_bound,
            "target": self.target_log_confidence,
            "margin": self.margin,
            "rounding_margin": self.rounding_margin,
            "gap": None if self.gap is None else self.gap.to_dict(),
            "valid": self.valid,
            "reasons": list(self.reasons),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Certificate":
        def ext(x):
            return None if x is None else ExtendedCount.from_dict(x)

        t = Fraction(*obj["t"])
        return cls(
            k=int(obj["k"]),
            t=t,
            n=ext(obj["n"]),
            d_over_kn=Fraction(*obj.get("d_over_kn", [t.numerator, t.denominator])),
            epsilon=obj["epsilon"],
            delta=obj["delta"],
            entropy_loss=obj["entropy_loss"],
            n_threshold=ext(obj["n_threshold"]),
            log_prob_bound=obj["log_prob_bound"],
            target_log_confidence=obj["target"],
            valid=bool(obj["valid"]),
            reasons=tuple(obj["reasons"]),
            gap=None if obj.get("gap") is None else GapReport(**obj["gap"]),
            epsilon_rule=obj.get("epsilon_rule", "optimized"),
            margin=obj.get("margin", DEFAULT_MARGIN),
            rounding_margin=obj.get("rounding_margin", ROUNDING_MARGIN),
            n_log_prob=ext(obj.get("n_log_prob")),
        )


def _slack(k, ln_n, delta, target, rounding_margin, eps):
    """Smallest normalized slack of the three eps-dependent conditions."""
    x_thr, _ = threshold_ln(k, eps)
    s_thr = ln_n - (x_thr + rounding_margin)
    s_loss = math.log(delta) - math.log(entropy_loss(k, eps))
    lp = log_prob_bound(k, ExtendedCount.from_ln(ln_n), eps, rounding_margin)
    s_lp = (math.inf if lp == -math.inf else math.asinh(-lp)) - math.asinh(target)
    return min(s_thr, s_loss, s_lp)


def optimize_epsilon(
    k: int,
    n: ExtendedCount,
    delta: float,
    target: float = DEFAULT_TARGET,
    margin: float = DEFAULT_MARGIN,
    rounding_margin: float = ROUNDING_MARGIN,
) -> float:
    """Choose eps maximizing the smallest validity slack.

    eps is confined to ``(0, eps_cap]`` with ``eps_cap = solve_epsilon(k, delta, margin)``.
    A log grid (with eps_cap appended) locates the best bracket, then golden
    section refines it; the refined point replaces the grid point only when
    strictly better, so a maximum at eps_cap is returned exactly.
    """
    cap = solve_epsilon(k, delta, margin)
    lo = min(GRID_LO, cap)
    grid = np.geomspace(lo, INV_E, GRID_POINTS)
    grid = np.append(grid[grid < cap], cap)
    f = lambda e: _slack(k, n.ln_value, delta, target, rounding_margin, float(e))  # noqa: E731
    vals = [f(e) for e in grid]
    i = int(np.argmax(vals))
    best_e, best_v = float(grid[i]), vals[i]
    if len(grid) < 3:
        return best_e
    a = math.log(grid[max(i - 1, 0)])
    b = math.log(grid[min(i + 1, len(grid) - 1)])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(math.exp(c)), f(math.exp(d))
    for _ in range(80):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(math.exp(d))
    cand = math.exp(c if fc >= fd else d)
    if cand <= cap and f(cand) > best_v:
        return cand
    return best_e


def certify(
    k: int,
    t,
    n: ExtendedCount,
    target_log_confidence: float = DEFAULT_TARGET,
    eps: float | None = None,
    margin: float = DEFAULT_MARGIN,
    rounding_margin: float = ROUNDING_MARGIN,
) -> Certificate:
    """Check whether (k, t, n) certifies additivity violation with failure
    probability at most ``exp(-target_log_confidence)``."""
    t = Fraction(t)
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    if not isinstance(n, ExtendedCount):
        n = ExtendedCount.from_int(n)
    gap = violation_gap(k, t)
    reasons = []
    if gap.delta <= 0:
        reasons.append("no-gap")
    d = t * k * n.exact if n.exact is not None else None
    if d is None or d.denominator != 1:
        reasons.append("d-not-integral")

    rule = "given"
    if eps is None and gap.delta > 0:
        eps = optimize_epsilon(k, n, gap.delta, target_log_confidence, margin, rounding_margin)
        rule = "optimized"
    loss = thr = lp = n_lp = None
    if eps is None:
        rule = "none"
    else:
        eps = float(eps)
        if not 0.0 < eps <= INV_E:
            reasons.append("eps-out-of-range")
        if 0.0 < eps < 1.0:
            loss = entropy_loss(k, eps)
            thr = n_threshold(k, eps, rounding_margin=rounding_margin)
            lp = log_prob_bound(k, n, eps, rounding_margin)
            n_lp = n_for_log_prob(k, eps, target_log_confidence, rounding_margin)
            if not loss < gap.delta:
                reasons.append("entropy-loss-exceeds-gap")
            if n < thr:
                reasons.append("n-below-threshold")
            if n < n_lp or lp > -target_log_confidence:
                reasons.append("log-prob-too-weak")
    return Certificate(
        k=k,
        t=t,
        n=n,
        d_over_kn=t,
        epsilon=eps,
        delta=gap.delta,
        entropy_loss=loss,
        n_threshold=thr,
        log_prob_bound=lp,
        target_log_confidence=float(target_log_confidence),
        valid=not reasons,
        reasons=tuple(reasons),
        gap=gap,
        epsilon_rule=rule,
        margin=margin,
        rounding_margin=rounding_margin,
        n_log_prob=n_lp,
    )


def verify_certificate(cert: Certificate) -> Certificate:
    """Recompute a certificate from its inputs and its recorded eps."""
    return certify(
        cert.k,
        cert.t,
        cert.n,
        cert.target_log_confidence,
        eps=cert.epsilon,
        margin=cert.margin,
        rounding_margin=cert.rounding_margin,
    )


def integral_step(k: int, t) -> int:
    """Smallest positive n with t*k*n integral."""
    return (Fraction(t) * k).denominator


def minimal_n(
    k: int,
    t,
    target_log_confidence: float = DEFAULT_TARGET,
    margin: float = DEFAULT_MARGIN,
    rounding_margin: float = ROUNDING_MARGIN,
) -> tuple[ExtendedCount, Certificate]:
    """Smallest n (a multiple of :func:`integral_step`) that :func:`certify` accepts.

    Bisection on ln n down to 1e-6, then exact integer bisection over the
    remaining bracket. The result depends on the eps selection rule.
    """
    t = Fraction(t)
    gap = violation_gap(k, t)
    if gap.delta <= 0:
        raise NoViolationError(f"violation gap at k={k}, t={t} is {gap.delta:.3g} <= 0")
    step = integral_step(k, t)

    def cert_at(m: int) -> Certificate:
        return certify(
            k, t, ExtendedCount.from_int(m * step), target_log_confidence,
            margin=margin, rounding_margin=rounding_margin,
        )

    def mult_from_ln(x: float) -> int:
        return max(1, -(-int_from_ln(x) // step))

    cap = solve_epsilon(k, gap.delta, margin)
    x_hi = max(threshold_ln(k, cap)[0], n_for_log_prob(k, cap, target_log_confidence).ln_value)
    x_hi += 1e-3
    for _ in range(200):
        if cert_at(mult_from_ln(x_hi)).valid:
            break
        x_hi += 1.0
    else:
        raise NumericalError("could not bracket the minimal n")
    x_lo = x_hi - 1.0
    while x_lo > 0 and cert_at(mult_from_ln(x_lo)).valid:
        x_lo -= 1.0
    x_lo = max(x_lo, 0.0)
    while x_hi - x_lo > 1e-6:
        mid = 0.5 * (x_lo + x_hi)
        if cert_at(mult_from_ln(mid)).valid:
            x_hi = mid
        else:
            x_lo = mid
    hi = mult_from_ln(x_hi)
    lo = mult_from_ln(x_lo)
    if cert_at(lo).valid:
        if lo == 1:
            hi = 1
        else:
            raise NumericalError("lower bracket unexpectedly valid")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cert_at(mid).valid:
            hi = mid
        else:
            lo = mid
    best = cert_at(hi)
    return best.n, best


@dataclass(frozen=True)
class ScanResult:
    t: float
    rows: tuple[GapReport, ...]
    least_violating_k: int | None

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "least_violating_k": self.least_violating_k,
            "rows": [r.to_dict() for r in self.rows],
        }


def scan_min_k(t, k_min: int, k_max: int, workers: int = 1) -> ScanResult:
    """Violation gaps for every k in [k_min, k_max] and the least k with a positive gap."""
    if k_min > k_max:
        raise DomainError(f"empty range [{k_min}, {k_max}]")
    ks = range(max(k_min, 2), k_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = tuple(pool.map(lambda k: violation_gap(k, t), ks))
    else:
        rows = tuple(violation_gap(k, t) for k in ks)
    least = next((r.k for r in rows if r.delta > 0), None)
    return ScanResult(float(t), rows, least)


@dataclass(frozen=True)
class FirstEstimate:
    """Closed-form right-hand sides of the two single-matrix deviation bounds."""

    rough_ln: float
    rough_vacuous: bool
    conc_ln: float
    conc_hypothesis: bool
    conc_threshold_ln: float

    def to_dict(self) -> dict:
        return {
            "rough_ln": self.rough_ln,
            "rough_vacuous": self.rough_vacuous,
            "conc_ln": self.conc_ln,
            "conc_hypothesis": self.conc_hypothesis,
            "conc_threshold_ln": self.conc_threshold_ln,
        }


def first_estimate_bound(k: int, n: ExtendedCount, eps: float) -> FirstEstimate:
    """Evaluate ``3*2^23 ln^2(kn)/(kn) eps^-4`` and ``2 exp(-kn eps^2/64)`` in log space.

    The second bound applies only when ``kn >= 2^31 ln^2(kn) eps^-4``.
    """
    eps = _check_eps(eps)
    ln_kn = n.ln_value + math.log(k)
    if ln_kn <= 0:
        raise DomainError("kn must exceed 1")
    ln_ln2 = 2.0 * math.log(ln_kn)
    rough = ROUGH_CONST_LN + ln_ln2 - ln_kn - 4.0 * math.log(eps)
    conc_thr = CONC_CONST_LN + ln_ln2 - 4.0 * math.log(eps)
    try:
        conc = math.log(2.0) - math.exp(ln_kn + 2.0 * math.log(eps) - math.log(CONC_DENOM))
    except OverflowError:
        conc = -math.inf
    return FirstEstimate(
        rough_ln=rough,
        rough_vacuous=rough >= 0.0,
        conc_ln=conc,
        conc_hypothesis=ln_kn >= conc_thr,
        conc_threshold_ln=conc_thr,
    )


def explain_lines(cert: Certificate) -> list[str]:
    """Human-readable inequality chain behind a certificate."""
    g = cert.gap
    out = [
        f"channel: k={cert.k}, t={cert.t}, n={cert.n} (ln n = {cert.n.ln_value:.6f}), d = t*k*n",
        "gap (nats):",
        f"  ||e_1||_(t) = phi(1/k, t)                     = {g.phi1:.10f}",
        f"  S_(k,t) = H(x_t*)                             = {g.s_limit:.10f}",
        f"  half Bell-state entropy bound H(t, ...)/2     = {g.hw_half:.10f}",
        f"  delta = S_(k,t) - bound/2                     = {g.delta:.6e}",
    ]
    if cert.epsilon is None:
        out.append("no eps: the gap is nonpositive, certification impossible")
    else:
        out += [
            f"eps ({cert.epsilon_rule}, loss capped at (1-{cert.margin})*delta) = {cert.epsilon:.6e}",
            f"  entropy loss 3k eps|ln eps| (entropy continuity) = {cert.entropy_loss:.6e}"
            f"  {'<' if cert.entropy_loss < cert.delta else '>='} delta",
        ]
        if cert.n_threshold is not None:
            thr = cert.n_threshold
            out += [
                f"  n threshold 3^4*2^31*ln^2(kn)*k^3*eps^-4 (concentration theorem) = {thr}"
                f"  (ln {thr.ln_value:.6f})  {'<=' if thr <= cert.n else '>'} n",
                f"  ln P(fail) <= k^2 ln(3k^2/eps) - (n/k) eps^2/576 (concentration theorem)"
                f" = {cert.log_prob_bound:.6e}",
                f"  target: ln P(fail) <= -{cert.target_log_confidence:.3g}",
            ]
            fe = first_estimate_bound(cert.k, cert.n, cert.epsilon)
            out += [
                f"  single-matrix rough bound 3*2^23 ln^2(kn)/(kn) eps^-4: ln = {fe.rough_ln:.6e}"
                f"{' (vacuous)' if fe.rough_vacuous else ''}",
                f"  single-matrix concentration 2 exp(-kn eps^2/64): ln = {fe.conc_ln:.6e},"
                f" hypothesis kn >= 2^31 ln^2(kn) eps^-4 {'holds' if fe.conc_hypothesis else 'fails'}",
            ]
        if g.delta > 0 and cert.n.ln_value > 0:
            # eps at which this n sits exactly on the threshold
            x = cert.n.ln_value
            c = THRESHOLD_CONST_LN + 3 * math.log(cert.k) + 2 * math.log(math.log(cert.k) + x)
            eps_n = math.exp((c - x) / 4.0)
            if eps_n < 1.0:
                out.append(
                    f"  eps needed for n to meet the threshold = {eps_n:.6e};"
                    f" its entropy loss {entropy_loss(cert.k, eps_n):.6e}"
                    f" vs delta {g.delta:.6e}"
                )
    out.append(f"valid: {cert.valid}" + (f"  reasons: {', '.join(cert.reasons)}" if cert.reasons else ""))
    return out
