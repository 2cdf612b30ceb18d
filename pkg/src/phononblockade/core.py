"""Dense Fock-space kernel: truncations, operators, states and linear algebra.

Composite basis ordering is fixed once here: ``index = n_a * n_b + m_b``,
i.e. the cavity factor is leftmost in every Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DimensionMismatch, InvalidState, NotHermitian, SingularSystem

Mode = Literal["cavity", "mechanical"]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_SLACK = 1e-8


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Truncation:
    """Fock cutoffs: photon numbers ``0..n_a-1`` and phonon numbers ``0..n_b-1``."""

    n_a: int
    n_b: int

    def __post_init__(self):
        if int(self.n_a) != self.n_a or int(self.n_b) != self.n_b:
            raise DimensionMismatch(f"cutoffs must be integers, got {self}")
        if self.n_a < 1:
            raise DimensionMismatch(f"n_a must be >= 1, got {self.n_a}")
        if self.n_b < 2:
            raise DimensionMismatch(f"n_b must be >= 2, got {self.n_b}")

    @property
    def dim(self) -> int:
        return self.n_a * self.n_b

    def index(self, n_a: int, m_b: int) -> int:
        """Composite basis index of ``|n_a, m_b>``."""
        if not (0 <= n_a < self.n_a and 0 <= m_b < self.n_b):
            raise IndexError(f"|{n_a},{m_b}> outside truncation {self}")
        return n_a * self.n_b + m_b


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix acting on the composite space ``dims``."""

    dims: Truncation
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = _frozen(self.data)
        d = self.dims.dim
        if data.shape != (d, d):
            raise DimensionMismatch(f"operator shape {data.shape} does not match {self.dims}")
        object.__setattr__(self, "data", data)

    def dag(self) -> Operator:
        return Operator(self.dims, self.data.conj().T)

    def _check(self, other: Operator) -> None:
        if other.dims != self.dims:
            raise DimensionMismatch(f"{self.dims} vs {other.dims}")

    def __matmul__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.dims, self.data @ other.data)

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.dims, self.data + other.data)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.dims, self.data - other.data)

    def __mul__(self, scalar: complex) -> Operator:
        return Operator(self.dims, self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> Operator:
        return Operator(self.dims, -self.data)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T), initial=0.0))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite state (validated on construction)."""

    dims: Truncation
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = _frozen(self.data)
        d = self.dims.dim
        if data.shape != (d, d):
            raise DimensionMismatch(f"state shape {data.shape} does not match {self.dims}")
        herm = float(np.max(np.abs(data - data.conj().T)))
        if herm > HERMITIAN_TOL:
            raise InvalidState(f"density matrix not Hermitian (error {herm:.3e})")
        tr = np.trace(data)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"density matrix trace {tr} != 1")
        lam = float(np.linalg.eigvalsh(data)[0])
        if lam < -POSITIVITY_SLACK:
            raise InvalidState(f"density matrix has eigenvalue {lam:.3e}")
        object.__setattr__(self, "data", data)

    def expect(self, op: Operator) -> complex:
        if op.dims != self.dims:
            raise DimensionMismatch(f"{op.dims} vs {self.dims}")
        return complex(np.trace(self.data @ op.data))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.data)[0])


def fock_state(dims: Truncation, n_a: int, m_b: int) -> DensityMatrix:
    """Projector onto the product Fock state ``|n_a, m_b>``."""
    rho = np.zeros((dims.dim, dims.dim), dtype=complex)
    i = dims.index(n_a, m_b)
    rho[i, i] = 1.0
    return DensityMatrix(dims, rho)


def vacuum(dims: Truncation) -> DensityMatrix:
    return fock_state(dims, 0, 0)


def kron(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    for m in (lhs, rhs):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"kron expects square matrices, got shape {m.shape}")
    return np.kron(lhs, rhs)


def _destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def identity(dims: Truncation) -> Operator:
    return Operator(dims, np.eye(dims.dim, dtype=complex))


def ladder(dims: Truncation, which: Mode) -> Operator:
    """Annihilation operator ``a`` (cavity) or ``b`` (mechanical) on the composite space."""
    if which == "cavity":
        return Operator(dims, kron(_destroy(dims.n_a), np.eye(dims.n_b)))
    if which == "mechanical":
        return Operator(dims, kron(np.eye(dims.n_a), _destroy(dims.n_b)))
    raise ValueError(f"unknown mode {which!r}; expected 'cavity' or 'mechanical'")


def number(dims: Truncation, which: Mode) -> Operator:
    c = ladder(dims, which)
    return c.dag() @ c


def eig_hermitian(op: Operator | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix with deterministic output.

    Eigenvalues ascend; near-degenerate groups are ordered by the real parts
    of their eigenvectors (lexicographic), and each eigenvector is rephased so
    its largest-magnitude component is real and positive.
    """
    m = op.data if isinstance(op, Operator) else np.asarray(op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {m.shape}")
    err = float(np.max(np.abs(m - m.conj().T), initial=0.0))
    if err > HERMITIAN_TOL:
        raise NotHermitian(f"max |A - A^H| = {err:.3e}")
    vals, vecs = np.linalg.eigh(m)

    for k in range(vecs.shape[1]):
        v = vecs[:, k]
        j = int(np.argmax(np.abs(v) > np.abs(v).max() * (1 - 1e-9)))
        vecs[:, k] = v * (abs(v[j]) / v[j])

    scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
    tie = 1e-12 * scale
    order = list(range(len(vals)))
    groups, start = [], 0
    for k in range(1, len(vals) + 1):
        if k == len(vals) or vals[k] - vals[k - 1] > tie:
            groups.append(order[start:k])
            start = k
    order = []
    for grp in groups:
        order.extend(sorted(grp, key=lambda k: tuple(np.round(vecs[:, k].real, 12))))
    return vals[order], vecs[:, order]


def solve_linear(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Dense LU solve with a relative residual guard."""
    dtype = complex if np.iscomplexobj(a) or np.iscomplexobj(rhs) else float
    a = np.asarray(a, dtype=dtype)
    rhs = np.asarray(rhs, dtype=dtype)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {a.shape}")
    if rhs.shape != (a.shape[0],):
        raise DimensionMismatch(f"rhs length {rhs.shape} does not match {a.shape}")
    try:
        x = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("solution contains non-finite entries")
    resid = np.linalg.norm(a @ x - rhs)
    bound = 1e-10 * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(rhs))
    if resid > bound:
        raise SingularSystem(f"residual {resid:.3e} exceeds bound {bound:.3e}")
    return x
