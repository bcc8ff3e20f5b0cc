import json
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moeforge.errors import DomainError, MatrixFileError, ShapeError
from moeforge.matops import (
    ChannelParams,
    density_project,
    haar_unitary,
    hermitian_eigen,
    hermitize,
    is_density,
    matrix_from_dict,
    matrix_to_dict,
    partial_trace_right,
    random_density,
    random_hermitian,
    random_pure_state,
    read_matrix,
    simplex_project,
    write_matrix,
)


def test_channel_params_bounds():
    p = ChannelParams.from_ratio(3, 20, Fraction(1, 3))
    assert (p.d, p.kn) == (20, 60)
    assert ChannelParams.from_ratio(2, 128, Fraction(1, 4)).d == 64
    with pytest.raises(DomainError):
        ChannelParams(3, 20, Fraction(1, 3), 21)
    with pytest.raises(DomainError):
        ChannelParams(3, 20, Fraction(0), 1)
    with pytest.raises(DomainError):
        ChannelParams(3, 20, Fraction(3, 2), 1)


# --- haar_unitary ---

@pytest.mark.parametrize("seed", [0, 1, 2**63 - 1])
def test_haar_unitary_is_unitary(seed):
    u = haar_unitary(8, seed)
    assert np.allclose(u @ u.conj().T, np.eye(8), atol=1e-10)


def test_haar_unitary_dim_one():
    u = haar_unitary(1, 5)
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1.0) <= 1e-12


def test_haar_unitary_rejects_zero_dim():
    with pytest.raises(ShapeError):
        haar_unitary(0, 0)


def test_haar_unitary_seeded():
    assert np.array_equal(haar_unitary(6, 11), haar_unitary(6, 11))
    assert not np.array_equal(haar_unitary(6, 11), haar_unitary(6, 12))


def test_haar_trace_second_moment():
    # E|tr U|^2 = 1 for Haar U in any dimension
    vals = [abs(np.trace(haar_unitary(16, s))) ** 2 for s in range(10_000)]
    assert 0.9 <= np.mean(vals) <= 1.1


def test_haar_phase_distribution_not_biased():
    # without the r_ii phase fix the diagonal of Q has a biased phase
    d = np.array([haar_unitary(4, s)[0, 0] for s in range(4000)])
    assert abs(d.mean()) < 0.05


# --- hermitian_eigen ---

def test_eigen_examples():
    w, _ = hermitian_eigen(np.eye(3))
    assert np.allclose(w, [1, 1, 1])
    w, v = hermitian_eigen(np.diag([1.0, 3.0]))
    assert np.allclose(w, [3, 1])
    assert np.allclose(np.abs(v), [[0, 1], [1, 0]])


@pytest.mark.parametrize("dim", [1, 10, 64, 512])
def test_eigen_reconstruction(dim):
    h = random_hermitian(dim, np.random.default_rng(dim))
    w, v = hermitian_eigen(h)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-10)
    scale = max(1.0, np.abs(w).max())
    assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-10 * scale * max(1, dim / 10)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(ShapeError):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ShapeError):
        hermitian_eigen(np.ones((2, 3)))


def test_hermitize_warns_on_small_asymmetry():
    h = np.array([[1.0, 1e-10], [0.0, 1.0]])
    with pytest.warns(UserWarning):
        out = hermitize(h)
    assert np.allclose(out, out.conj().T)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hermitize(np.eye(2))


# --- partial_trace_right ---

def test_partial_trace_examples():
    rng = np.random.default_rng(3)
    a = random_hermitian(3, rng)
    assert np.allclose(partial_trace_right(np.kron(a, np.eye(4)), 3, 4), 4 * a)
    assert np.allclose(partial_trace_right(np.eye(12), 3, 4), 4 * np.eye(3))
    x = random_pure_state(12, rng)
    out = partial_trace_right(np.outer(x, x.conj()), 3, 4)
    assert abs(np.trace(out) - 1) <= 1e-12
    assert is_density(out)


def test_partial_trace_product_state():
    rng = np.random.default_rng(4)
    a, b = random_density(2, rng), random_density(5, rng)
    assert np.allclose(partial_trace_right(np.kron(a, b), 2, 5), a, atol=1e-12)


def test_partial_trace_shape_error():
    with pytest.raises(ShapeError):
        partial_trace_right(np.eye(6), 2, 4)


# --- simplex_project ---

@pytest.mark.parametrize(
    "v, expected",
    [((0.2, 0.8), (0.2, 0.8)), ((1.5, -0.5), (1.0, 0.0)), ((2.0, 2.0), (0.5, 0.5))],
)
def test_simplex_examples(v, expected):
    assert np.allclose(simplex_project(v), expected, atol=1e-15)


def test_simplex_rejects_empty():
    with pytest.raises(ShapeError):
        simplex_project([])


def _kkt_holds(v, p, tol=1e-9):
    # optimality: v_i - p_i = theta on the support, v_i <= theta off it
    support = p > 0
    theta = np.mean((v - p)[support])
    return (
        np.all(p >= 0)
        and abs(p.sum() - 1) <= tol
        and np.all(np.abs((v - p)[support] - theta) <= tol * max(1, np.abs(v).max()))
        and np.all(v[~support] <= theta + tol)
    )


@settings(max_examples=300, deadline=None)
@given(arrays(np.float64, st.integers(1, 12), elements=st.floats(-50, 50)))
def test_simplex_kkt(v):
    assert _kkt_holds(v, simplex_project(v))


# --- density_project ---

def test_density_project_fixes_states():
    rng = np.random.default_rng(5)
    for dim in (1, 2, 5):
        rho = random_density(dim, rng)
        assert np.max(np.abs(density_project(rho) - rho)) <= 1e-12


def test_density_project_examples():
    assert np.allclose(density_project(np.diag([1.5, -0.5])), np.diag([1.0, 0.0]), atol=1e-15)
    w = haar_unitary(2, 9)
    h = w @ np.diag([1.5, -0.5]) @ w.conj().T
    target = w @ np.diag([1.0, 0.0]) @ w.conj().T
    assert np.allclose(density_project(h), target, atol=1e-12)


def test_density_project_is_nonexpansive():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        dim = int(rng.integers(1, 7))
        a, b = random_hermitian(dim, rng), random_hermitian(dim, rng)
        lhs = np.linalg.norm(density_project(a) - density_project(b))
        assert lhs <= np.linalg.norm(a - b) + 1e-10


def test_random_density_is_density():
    rng = np.random.default_rng(7)
    assert all(is_density(random_density(d, rng)) for d in (1, 2, 3, 6))


# --- matrix files ---

def test_matrix_round_trip(tmp_path):
    a = random_hermitian(3, np.random.default_rng(8))
    path = tmp_path / "a.json"
    write_matrix(path, a)
    assert np.array_equal(read_matrix(path), a)


@pytest.mark.parametrize(
    "obj, field",
    [
        ([1, 2], "<root>"),
        ({"entries": []}, "dim"),
        ({"dim": 0, "entries": []}, "dim"),
        ({"dim": 2, "entries": "x"}, "entries"),
        ({"dim": 2, "entries": [[1, 0]] * 3}, "entries"),
        ({"dim": 1, "entries": [[1]]}, "entries[0]"),
        ({"dim": 2, "entries": [[1, 0], [1, 0], ["a", 0], [0, 0]]}, "entries[2]"),
        ({"dim": 2, "entries": [[1, 0], [1, 0], [0, 0], [0, 0]]}, "entries"),
    ],
)
def test_matrix_errors_name_field(obj, field):
    with pytest.raises(MatrixFileError) as info:
        matrix_from_dict(obj)
    assert info.value.field == field


def test_matrix_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{dim: 2")
    with pytest.raises(MatrixFileError) as info:
        read_matrix(path)
    assert info.value.field == "<root>"


def test_matrix_to_dict_layout():
    d = matrix_to_dict(np.array([[1, 1j], [-1j, 0]]))
    assert d == {"dim": 2, "entries": [[1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.0, 0.0]]}
    json.dumps(d)
