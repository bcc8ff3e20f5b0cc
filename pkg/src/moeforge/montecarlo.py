"""Finite-size random experiments on the channel

    X  ->  id_k (x) tr_n( U P X P^* U^* ),

with U Haar on U(kn) and P the isometry onto the first d coordinates.

Only the first d columns of U enter, so the channel is handled through the
isometry ``V = U[:, :d]`` reshaped to ``(k, n, d)``. Per-trial seeds are
derived from ``(master_seed, trial_index)``, which makes every result
independent of how trials are distributed over workers.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .certifier import ExtendedCount
from .errors import DomainError, ShapeError
from .freelimits import gamma_star
from .matops import (
    ChannelParams,
    density_project,
    haar_unitary,
    hermitize,
    random_density,
    random_pure_state,
)

EIGEN_FLOOR = 1e-300
MAX_BELL_K2 = 4096
MAX_NET_K = 3


def derive_seed(master_seed: int, index: int) -> int:
    """Counter-based 64-bit seed for trial ``index``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def run_trials(fn: Callable[[int], object], trials: int, master_seed: int, workers: int = 1) -> list:
    """Evaluate ``fn(derive_seed(master_seed, i))`` for i in range(trials), in index order."""
    seeds = [derive_seed(master_seed, i) for i in range(trials)]
    if workers <= 1 or trials <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


@dataclass(frozen=True)
class TrialReport:
    trials: int
    per_trial: tuple[float, ...]
    mean: float
    stddev: float
    min: float
    max: float
    master_seed: int

    @classmethod
    def from_values(cls, values: Sequence[float], master_seed: int) -> "TrialReport":
        vals = tuple(float(v) for v in values)
        if not vals:
            raise DomainError("a trial report needs at least one trial")
        m = math.fsum(vals) / len(vals)
        var = math.fsum((v - m) ** 2 for v in vals) / (len(vals) - 1) if len(vals) > 1 else 0.0
        return cls(len(vals), vals, m, math.sqrt(var), min(vals), max(vals), int(master_seed))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_trial"] = list(self.per_trial)
        return d

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial_index", "observable"])
        for i, v in enumerate(self.per_trial):
            w.writerow([i, repr(v)])
        return buf.getvalue()


def _isometry(u, p: ChannelParams) -> np.ndarray:
    u = np.asarray(u)
    if u.shape != (p.kn, p.kn):
        raise ShapeError(f"unitary must be {p.kn}x{p.kn}, got {u.shape}")
    return u[:, : p.d].reshape(p.k, p.n, p.d)


def apply_channel(u, p: ChannelParams, x) -> np.ndarray:
    """Channel output for a d x d input matrix."""
    v = _isometry(u, p)
    x = np.asarray(x)
    if x.shape != (p.d, p.d):
        raise ShapeError(f"input must be {p.d}x{p.d}, got {x.shape}")
    vx = np.einsum("asi,ij->asj", v, x)
    out = np.einsum("asj,bsj->ab", vx, v.conj())
    return (out + out.conj().T) / 2


def apply_channel_pure(u, p: ChannelParams, x) -> np.ndarray:
    """Channel output for the pure state x x^* (x need not be normalized)."""
    v = _isometry(u, p)
    w = np.einsum("asi,i->as", v, np.asarray(x))
    return w @ w.conj().T


def compression(u, p: ChannelParams, a) -> np.ndarray:
    """The d x d matrix ``P^* U^* (A (x) I_n) U P``."""
    v = _isometry(u, p)
    a = hermitize(a, name="A")
    if a.shape != (p.k, p.k):
        raise ShapeError(f"A must be {p.k}x{p.k}, got {a.shape}")
    av = np.einsum("ab,bsj->asj", a, v)
    m = np.einsum("asi,asj->ij", v.conj(), av)
    return (m + m.conj().T) / 2


def compressed_norm(u, p: ChannelParams, a) -> float:
    """Largest eigenvalue of the compression of ``A (x) I_n``."""
    return float(np.linalg.eigvalsh(compression(u, p, a))[-1])


def empirical_t_norm(
    p: ChannelParams, a, trials: int, master_seed: int, workers: int = 1
) -> TrialReport:
    """Compressed norms of A over independent Haar unitaries."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    a = hermitize(a, name="A")

    def one(seed):
        return compressed_norm(haar_unitary(p.kn, seed), p, a)

    return TrialReport.from_values(run_trials(one, trials, master_seed, workers), master_seed)


def duality_check(u, p: ChannelParams, n_states: int, n_tests: int, master_seed: int) -> float:
    """Largest ``tr(X A) - compressed_norm(A)`` over sampled outputs X and tests A.

    Outputs come from Haar-random pure inputs, tests are projections of
    random Hermitian matrices onto the density matrices. The value is <= 0
    up to rounding.
    """
    if n_states < 1 or n_tests < 1:
        raise DomainError("counts must be >= 1")
    rng = np.random.default_rng(derive_seed(master_seed, 0))
    outs = np.stack([apply_channel_pure(u, p, random_pure_state(p.d, rng)) for _ in range(n_states)])
    worst = -math.inf
    for _ in range(n_tests):
        a = random_density(p.k, rng)
        norm = compressed_norm(u, p, a)
        vals = np.einsum("xab,ba->x", outs, a).real
        worst = max(worst, float(vals.max()) - norm)
    return worst


def attainment_gap(u, p: ChannelParams, a, n_states: int, master_seed: int) -> float:
    """``compressed_norm(A) - max_x tr(A Phi(x x^*))`` over sampled pure inputs."""
    rng = np.random.default_rng(derive_seed(master_seed, 1))
    m = compression(u, p, a)
    best = -math.inf
    for _ in range(n_states):
        x = random_pure_state(p.d, rng)
        best = max(best, float(np.vdot(x, m @ x).real))
    return float(np.linalg.eigvalsh(m)[-1]) - best


def bell_output(u, p: ChannelParams) -> np.ndarray:
    """``[Phi (x) conj(Phi)](E_d)`` as a k^2 x k^2 matrix, index (a, a') slow-fast.

    With Q = V V^* the projection onto the range of the isometry,
    ``rho[(a,a'),(b,b')] = (1/d) sum_{s,s'} Q[(a,s),(a',s')] conj(Q[(b,s),(b',s')])``.
    """
    if p.k * p.k > MAX_BELL_K2:
        raise DomainError(f"k^2 = {p.k * p.k} exceeds the limit {MAX_BELL_K2}")
    v = _isometry(u, p).reshape(p.kn, p.d)
    q = (v @ v.conj().T).reshape(p.k, p.n, p.k, p.n)
    r = q.transpose(0, 2, 1, 3).reshape(p.k * p.k, p.n * p.n)
    rho = (r @ r.conj().T) / p.d
    return (rho + rho.conj().T) / 2


@dataclass(frozen=True)
class BellResult:
    spectrum: np.ndarray
    lambda_max: float

    def l1_to(self, target) -> float:
        return float(np.abs(self.spectrum - np.asarray(target)).sum())


def bell_experiment(p: ChannelParams, master_seed: int) -> BellResult:
    """Spectrum (descending) of the Bell-state output for one Haar unitary."""
    if p.k * p.k > MAX_BELL_K2:
        raise DomainError(f"k^2 = {p.k * p.k} exceeds the limit {MAX_BELL_K2}")
    rho = bell_output(haar_unitary(p.kn, master_seed), p)
    spec = np.linalg.eigvalsh(rho)[::-1].copy()
    return BellResult(spec, float(spec[0]))


def bell_trials(p: ChannelParams, trials: int, master_seed: int, workers: int = 1) -> list[BellResult]:
    return run_trials(lambda s: bell_experiment(p, s), trials, master_seed, workers)


def bell_summary(p: ChannelParams, results: Sequence[BellResult], master_seed: int) -> dict:
    g = gamma_star(p.k, p.t)
    return {
        "k": p.k,
        "n": p.n,
        "t": [p.t.numerator, p.t.denominator],
        "d": p.d,
        "lower_bound_d_over_kn": p.d / p.kn,
        "lambda_max": TrialReport.from_values([r.lambda_max for r in results], master_seed).to_dict(),
        "l1_to_gamma_star": TrialReport.from_values([r.l1_to(g) for r in results], master_seed).to_dict(),
        "mean_spectrum": np.mean([r.spectrum for r in results], axis=0).tolist(),
        "gamma_star": g.tolist(),
    }


def output_entropy(rho) -> float:
    """Von Neumann entropy (nats) with eigenvalues floored at 1e-300 inside the log."""
    w = np.linalg.eigvalsh(rho)
    w = np.clip(w, 0.0, None)
    return float(-np.sum(w * np.log(np.maximum(w, EIGEN_FLOOR))))


def entropy_gradient(u, p: ChannelParams, x) -> np.ndarray:
    """Euclidean gradient of ``x -> H(Phi(x x^*))``: ``2 V^* ((-ln rho - I) (x) I_n) V x``."""
    v = _isometry(u, p)
    w = np.einsum("asi,i->as", v, x)
    rho = w @ w.conj().T
    lam, vec = np.linalg.eigh((rho + rho.conj().T) / 2)
    lam = np.maximum(lam, EIGEN_FLOOR)
    g_out = (vec * (-np.log(lam) - 1.0)) @ vec.conj().T
    return 2.0 * np.einsum("asi,as->i", v.conj(), g_out @ w)


def _descend(u, p, x, max_iters, armijo=1e-4, step0=1.0):
    f = output_entropy(apply_channel_pure(u, p, x))
    for _ in range(max_iters):
        g = entropy_gradient(u, p, x)
        g = g - x * np.vdot(x, g).real  # tangent to the sphere
        gg = float(np.vdot(g, g).real)
        if gg < 1e-28:
            break
        s = step0
        while s > 1e-12:
            y = x - s * g
            y = y / np.linalg.norm(y)
            fy = output_entropy(apply_channel_pure(u, p, y))
            if fy <= f - armijo * s * gg:
                break
            s *= 0.5
        else:
            break
        x, f = y, fy
    return f, x


def min_entropy_search(
    u, p: ChannelParams, restarts: int = 50, max_iters: int = 200, master_seed: int = 0,
    workers: int = 1,
) -> tuple[float, np.ndarray, list[float]]:
    """Multi-start projected gradient descent for the minimum output entropy.

    Returns the best entropy, its input state and the per-restart results.
    The best value is an upper bound on the true minimum.
    """
    if restarts < 1:
        raise DomainError("restarts must be >= 1")

    def one(seed):
        x0 = random_pure_state(p.d, np.random.default_rng(seed))
        return _descend(u, p, x0, max_iters)

    runs = run_trials(one, restarts, master_seed, workers)
    best = min(range(restarts), key=lambda i: runs[i][0])
    return runs[best][0], runs[best][1], [r[0] for r in runs]


@dataclass(frozen=True)
class NetSpec:
    """Half-integer grid of self-adjoint matrices scaled by ``u = sqrt(2) eps / (3 k^2)``."""

    k: int
    eps: float
    signed: bool = True

    @property
    def u(self) -> float:
        return math.sqrt(2.0) * self.eps / (3.0 * self.k * self.k)

    @property
    def grid_half_width(self) -> int:
        return math.ceil(1.0 / self.u)

    def nearest(self, a) -> np.ndarray:
        """Net point whose real and imaginary parts are closest to those of A."""
        u = self.u
        g = self.grid_half_width
        lo = -g if self.signed else 0

        def snap(x):
            m = np.floor(x / u) + 0.5
            # last admissible half-integers inside [lo, g]
            return np.clip(m, lo + 0.5, g - 0.5) * u

        a = np.asarray(a)
        re = snap(a.real)
        im = snap(a.imag)
        m = np.tril(re) + 1j * np.tril(im, -1)
        return m + np.tril(m, -1).conj().T


def net_size_bound(spec: NetSpec) -> ExtendedCount:
    """``(1/u + 1)^(k^2)`` in extended range."""
    return ExtendedCount.from_ln(spec.k**2 * math.log1p(1.0 / spec.u))


def net_cover_check(spec: NetSpec, trials: int, master_seed: int) -> tuple[float, ExtendedCount]:
    """Largest distance from a random density matrix to the projected nearest net point."""
    if spec.k > MAX_NET_K:
        raise DomainError(f"k={spec.k} too large for the net check (max {MAX_NET_K})")
    rng = np.random.default_rng(derive_seed(master_seed, 0))
    worst = 0.0
    for _ in range(trials):
        a = random_density(spec.k, rng)
        pm = density_project(spec.nearest(a))
        worst = max(worst, float(np.linalg.norm(a - pm)))
    return worst, net_size_bound(spec)
