"""Fock-space operators and density matrices.

Oracles: matrix elements written out by hand, commutation relations and
known states (vacuum, Fock, coherent, thermal).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density, random_hermitian
from phononblockade.core import (
    DensityMatrix,
    Operator,
    Truncation,
    eig_hermitian,
    fock_state,
    identity,
    kron,
    ladder,
    number,
    solve_linear,
    vacuum,
)
from phononblockade.errors import DimensionMismatch, InvalidState, NotHermitian, SingularSystem


def test_truncation_rejects_bad_cutoffs():
    with pytest.raises(DimensionMismatch):
        Truncation(0, 3)
    with pytest.raises(DimensionMismatch):
        Truncation(2, 1)
    with pytest.raises(DimensionMismatch):
        Truncation(2.5, 3)


def test_composite_index_cavity_leftmost():
    dims = Truncation(3, 4)
    assert [dims.index(n, m) for n in range(3) for m in range(4)] == list(range(12))
    # number operators are diagonal in exactly that order
    na = np.real(np.diag(number(dims, "cavity").data))
    nb = np.real(np.diag(number(dims, "mechanical").data))
    assert np.allclose(na, [n for n in range(3) for _ in range(4)], atol=1e-14)
    assert np.allclose(nb, [m for _ in range(3) for m in range(4)], atol=1e-14)
    with pytest.raises(IndexError):
        dims.index(3, 0)


def test_mechanical_ladder_element():
    b = ladder(Truncation(1, 3), "mechanical").data
    assert b[1, 2] == pytest.approx(math.sqrt(2), abs=1e-15)
    assert b[1, 2] == pytest.approx(1.41421356, abs=1e-8)


def test_cavity_ladder_entries():
    dims = Truncation(2, 2)
    a = ladder(dims, "cavity").data
    expected = np.zeros((4, 4))
    for m in range(2):
        expected[dims.index(0, m), dims.index(1, m)] = 1.0
    assert np.array_equal(a, expected)


def test_ladder_matrix_elements_and_truncated_commutator():
    dims = Truncation(2, 5)
    b = ladder(dims, "mechanical").data
    for n in range(2):
        for m in range(1, 5):
            assert b[dims.index(n, m - 1), dims.index(n, m)] == pytest.approx(math.sqrt(m))
    comm = b @ b.conj().T - b.conj().T @ b
    # [b, b^dag] = 1 except on the top level, where it is 1 - n_b
    expected = np.diag([1.0 if m < 4 else -4.0 for _ in range(2) for m in range(5)])
    assert np.allclose(comm, expected, atol=1e-14)


def test_modes_commute():
    dims = Truncation(2, 3)
    na, nb = number(dims, "cavity").data, number(dims, "mechanical").data
    assert np.max(np.abs(na @ nb - nb @ na)) < 1e-14


def test_unknown_mode():
    with pytest.raises(ValueError):
        ladder(Truncation(2, 2), "optical")


def test_kron_examples(rng):
    assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))
    assert np.diag(kron(np.diag([0.0, 1.0]), np.eye(3))).tolist() == [0, 0, 0, 1, 1, 1]
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    assert np.max(np.abs(kron(a, b) @ kron(c, d) - kron(a @ c, b @ d))) < 1e-12
    with pytest.raises(DimensionMismatch):
        kron(np.ones((2, 3)), np.eye(2))


def test_operator_algebra_and_immutability():
    dims = Truncation(2, 3)
    b = ladder(dims, "mechanical")
    assert np.allclose((b.dag() @ b).data, number(dims, "mechanical").data)
    assert np.allclose((2 * b - b + identity(dims) - identity(dims)).data, b.data)
    assert np.allclose((-b).data, -b.data)
    with pytest.raises(ValueError):
        b.data[0, 1] = 5.0
    with pytest.raises(DimensionMismatch):
        b @ ladder(Truncation(3, 2), "mechanical")
    with pytest.raises(DimensionMismatch):
        Operator(dims, np.eye(5))
    assert (b + b.dag()).hermiticity_error() == 0.0
    assert b.hermiticity_error() > 0


def test_density_matrix_validation(rng):
    dims = Truncation(2, 2)
    DensityMatrix(dims, random_density(rng, 4))
    with pytest.raises(InvalidState):
        DensityMatrix(dims, np.diag([0.5, 0.5, 0.5, 0.0]))
    with pytest.raises(InvalidState):
        DensityMatrix(dims, np.diag([1.5, -0.5, 0.0, 0.0]))
    bad = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    bad[0, 1] = 0.1
    with pytest.raises(InvalidState):
        DensityMatrix(dims, bad)
    with pytest.raises(DimensionMismatch):
        DensityMatrix(dims, np.eye(3) / 3)


def test_fock_state_and_expectation():
    dims = Truncation(2, 4)
    rho = fock_state(dims, 1, 3)
    assert rho.expect(number(dims, "mechanical")) == pytest.approx(3.0)
    assert rho.expect(number(dims, "cavity")) == pytest.approx(1.0)
    assert vacuum(dims).expect(number(dims, "mechanical")) == 0.0
    assert vacuum(dims).min_eigenvalue() == pytest.approx(0.0, abs=1e-15)


def test_eig_hermitian_examples():
    vals, _ = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert vals.tolist() == [1.0, 2.0, 3.0]
    vals, vecs = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(vals, [-1.0, 1.0])
    # largest component of each eigenvector is real positive
    for k in range(2):
        j = np.argmax(np.abs(vecs[:, k]))
        assert vecs[j, k].imag == pytest.approx(0.0, abs=1e-15) and vecs[j, k].real > 0


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionMismatch):
        eig_hermitian(np.ones((2, 3)))


def test_eig_hermitian_degenerate_is_deterministic():
    m = np.diag([1.0, 1.0, 1.0, 2.0])
    first = eig_hermitian(m)
    for _ in range(3):
        again = eig_hermitian(m.copy())
        assert np.array_equal(first[0], again[0]) and np.array_equal(first[1], again[1])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_eig_hermitian_reconstructs(d, seed):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng, d)
    vals, vecs = eig_hermitian(m)
    assert np.all(np.diff(vals) >= 0)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, m, atol=1e-10)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(d), atol=1e-10)


def test_solve_linear_examples(rng):
    v = np.array([1.0, -2.0, 3.0])
    assert np.allclose(solve_linear(np.eye(3), v), v)
    assert np.allclose(solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 8.0])), [1.0, 2.0])
    a = rng.normal(size=(10, 10)) + 10 * np.eye(10)
    x = rng.normal(size=10) + 1j * rng.normal(size=10)
    assert np.max(np.abs(solve_linear(a, a @ x) - x)) < 1e-9


def test_solve_linear_real_stays_real():
    x = solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 8.0]))
    assert x.dtype == np.float64


def test_solve_linear_singular():
    with pytest.raises(SingularSystem):
        solve_linear(np.zeros((3, 3)), np.ones(3))
    with pytest.raises(DimensionMismatch):
        solve_linear(np.eye(3), np.ones(2))
