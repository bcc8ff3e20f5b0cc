"""Dense complex Hermitian linear algebra.

Tensor convention: in C^k (x) C^n the k-factor is the slow index, so the
row index of a (k*n)-dimensional object factors as ``i * n + s`` with
``i`` in ``range(k)`` kept and ``s`` in ``range(n)`` traced out.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DomainError, MatrixFileError, ShapeError

# deviation above WARN_TOL is reported, above HERMITIAN_TOL rejected
HERMITIAN_WARN_TOL = 1e-12
HERMITIAN_TOL = 1e-8


@dataclass(frozen=True)
class ChannelParams:
    """Geometry of the random channel: output dim k, environment dim n,
    ratio t and input dim d with ``1 <= d <= t*k*n``."""

    k: int
    n: int
    t: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        if self.k < 1 or self.n < 1:
            raise DomainError(f"k and n must be >= 1, got k={self.k}, n={self.n}")
        if not 0 < self.t <= 1:
            raise DomainError(f"t must lie in (0, 1], got {self.t}")
        if not 1 <= self.d <= self.t * self.k * self.n:
            raise DomainError(
                f"d={self.d} violates 1 <= d <= t*k*n = {float(self.t * self.k * self.n)}"
            )

    @classmethod
    def from_ratio(cls, k: int, n: int, t) -> "ChannelParams":
        """Largest admissible input dimension, ``d = floor(t*k*n)``."""
        t = Fraction(t)
        return cls(k, n, t, int(t * k * n))

    @property
    def kn(self) -> int:
        return self.k * self.n


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Sample a Haar-distributed unitary of size ``dim``.

    QR of a complex Ginibre matrix, with the columns of Q rephased by
    ``r_ii / |r_ii|`` so that the result does not depend on the QR gauge.
    ``seed`` is anything accepted by :func:`numpy.random.default_rng`.
    """
    if dim < 1:
        raise ShapeError(f"invalid dimension {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def hermitize(h, name: str = "matrix") -> np.ndarray:
    """Return ``(H + H^*)/2`` after checking that H is square and nearly Hermitian."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {h.shape}")
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if dev > HERMITIAN_TOL:
        raise ShapeError(f"{name} is not Hermitian (deviation {dev:.3g})")
    if dev > HERMITIAN_WARN_TOL:
        warnings.warn(f"{name} deviates from Hermitian by {dev:.3g}; symmetrizing", stacklevel=2)
    return (h + h.conj().T) / 2


def hermitian_eigen(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching unitary eigenvector matrix."""
    h = hermitize(h)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def partial_trace_right(m, k: int, n: int) -> np.ndarray:
    """Trace out the second (fast) factor of C^k (x) C^n."""
    m = np.asarray(m)
    if m.shape != (k * n, k * n):
        raise ShapeError(f"expected shape {(k * n, k * n)}, got {m.shape}")
    return np.trace(m.reshape(k, n, k, n), axis1=1, axis2=3)


def simplex_project(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ShapeError("cannot project an empty vector")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector has non-finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def density_project(h) -> np.ndarray:
    """Frobenius-nearest density matrix: simplex-project the spectrum in H's eigenbasis."""
    w, v = hermitian_eigen(h)
    p = simplex_project(w)
    out = (v * p) @ v.conj().T
    return (out + out.conj().T) / 2


def is_density(rho, tol: float = 1e-10) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        return False
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return bool(w[0] >= -tol and abs(np.trace(rho).real - 1.0) <= tol)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """GUE-like Hermitian matrix with unit-variance entries."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Density matrix drawn as the projection of a random Hermitian matrix."""
    return density_project(random_hermitian(dim, rng))


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return x / np.linalg.norm(x)


def read_matrix(path) -> np.ndarray:
    """Read ``{"dim": int, "entries": [[re, im], ...]}`` (row-major) and symmetrize."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFileError("<root>", f"invalid JSON ({exc})") from exc
    return matrix_from_dict(obj)


def matrix_from_dict(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFileError("<root>", "expected a JSON object")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MatrixFileError("dim", f"expected a positive integer, got {dim!r}")
    entries = obj.get("entries")
    if not isinstance(entries, list):
        raise MatrixFileError("entries", "expected a list of [re, im] pairs")
    if len(entries) != dim * dim:
        raise MatrixFileError("entries", f"expected {dim * dim} entries, got {len(entries)}")
    vals = np.empty(dim * dim, dtype=complex)
    for i, e in enumerate(entries):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)
        ):
            raise MatrixFileError(f"entries[{i}]", f"expected [re, im] numbers, got {e!r}")
        vals[i] = complex(e[0], e[1])
    try:
        return hermitize(vals.reshape(dim, dim), name="entries")
    except ShapeError as exc:
        raise MatrixFileError("entries", str(exc)) from exc


def matrix_to_dict(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def write_matrix(path, m) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(m)) + "\n")
