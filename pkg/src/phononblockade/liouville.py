"""Lindblad generator, steady-state solver, time evolution and truncation control.

Vectorization is column stacking: ``vec(rho)[i + j*d] = rho[i, j]``, so
``X @ rho`` maps to ``kron(I, X)`` and ``rho @ X`` to ``kron(X.T, I)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from . import kernels
from .core import (
    DensityMatrix,
    HERMITIAN_TOL,
    Operator,
    Truncation,
    solve_linear,
    vacuum,
)
from .errors import (
    DimensionMismatch,
    InsufficientOccupation,
    NonConvergence,
    NonPositive,
    NotHermitian,
    SingularSystem,
    StepSizeUnderflow,
    TruncationExplosion,
)
from .model import CollapseChannel, SystemParams, build_heff, collapse_channels

DEFAULT_TOL = 1e-10
DEFAULT_TRUNCATION = Truncation(3, 10)
TOP_LEVEL_THRESHOLD = 1e-8
NEGATIVE_ERROR = 1e-6
NEGATIVE_CLIP = 1e-8
# composite dimension above which the generator is stored sparse
SPARSE_DIM = 24


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape(d, d, order="F")


@dataclass(frozen=True, eq=False)
class Liouvillian:
    dims: Truncation
    # dense ndarray, or scipy CSR matrix for large truncations
    matrix: np.ndarray = field(repr=False)
    # smallest nonzero dissipation rate; sets the evolution time scale
    min_rate: float = 0.0

    @property
    def is_sparse(self) -> bool:
        return sps.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def max_abs(self) -> float:
        m = abs(self.matrix)
        return float(m.max()) if m.shape[0] else 0.0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.dims.dim
        return unvec(self.matrix @ vec(rho), d)

    def residual(self, rho: np.ndarray) -> float:
        return float(np.linalg.norm(self.matrix @ vec(rho)))


@dataclass(frozen=True)
class SteadyStateReport:
    rho: DensityMatrix
    residual: float
    method: Literal["nullspace", "evolution"]
    truncation_converged: bool
    top_level_population: float

    @property
    def dims(self) -> Truncation:
        return self.rho.dims


def _sparse_generator(h: np.ndarray, jumps: Sequence[np.ndarray], rates: Sequence[float]) -> sps.csr_matrix:
    d = h.shape[0]
    eye = sps.identity(d, dtype=complex, format="csr")
    hnh = sps.csr_matrix(h, dtype=complex)
    parts = []
    for c, r in zip(jumps, rates):
        c = sps.csr_matrix(c, dtype=complex)
        hnh = hnh - 0.5j * r * (c.conj().T @ c)
        parts.append(r * sps.kron(c.conj(), c))
    m = -1j * sps.kron(eye, hnh) + 1j * sps.kron(hnh.conj(), eye)
    for p in parts:
        m = m + p
    return sps.csr_matrix(m)


def build_liouvillian(
    h: Operator, channels: Sequence[CollapseChannel], sparse: bool | None = None
) -> Liouvillian:
    """Matrix of ``rho -> -i[H, rho] + sum_c (r/2)(2 c rho c^dag - c^dag c rho - rho c^dag c)``.

    ``sparse=None`` picks a sparse representation above ``SPARSE_DIM``.
    """
    herm = h.hermiticity_error()
    if herm > HERMITIAN_TOL:
        raise NotHermitian(f"Hamiltonian not Hermitian (error {herm:.3e})")
    for ch in channels:
        if ch.operator.dims != h.dims:
            raise DimensionMismatch(f"channel acts on {ch.operator.dims}, Hamiltonian on {h.dims}")
    jumps = [ch.operator.data for ch in channels]
    rate_arr = np.array([ch.rate for ch in channels], dtype=float)
    if sparse is None:
        sparse = h.dims.dim > SPARSE_DIM
    if sparse:
        m = _sparse_generator(h.data, jumps, rate_arr)
    else:
        m = kernels.liouvillian_matrix(h.data, jumps, rate_arr)
    rates = [ch.rate for ch in channels if ch.rate > 0]
    return Liouvillian(h.dims, m, min(rates) if rates else 0.0)


def liouvillian_for(
    sp: SystemParams, dims: Truncation, cavity_detuning: float | None = None, sparse: bool | None = None
) -> Liouvillian:
    return build_liouvillian(build_heff(sp, dims, cavity_detuning), collapse_channels(sp, dims), sparse)


def top_populations(rho: np.ndarray, dims: Truncation) -> tuple[float, float]:
    """Marginal populations of the highest cavity and mechanical Fock levels.

    With a single cavity level the cavity is frozen in vacuum, so its top
    population is reported as zero.
    """
    p = np.real(np.diag(rho)).reshape(dims.n_a, dims.n_b)
    cav = float(p[-1].sum()) if dims.n_a > 1 else 0.0
    return cav, float(p[:, -1].sum())


def _finalize(L: Liouvillian, x: np.ndarray) -> tuple[DensityMatrix, float]:
    d = L.dims.dim
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    lam, vecs = np.linalg.eigh(rho)
    if lam[0] < -NEGATIVE_ERROR:
        raise NonPositive(f"steady state has eigenvalue {lam[0]:.3e}")
    if lam[0] < -NEGATIVE_CLIP:
        # roundoff-level negativity: project onto the PSD cone
        rho = (vecs * np.clip(lam, 0.0, None)) @ vecs.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
    return DensityMatrix(L.dims, rho), L.residual(rho)


def _nullspace_complex(L: Liouvillian) -> np.ndarray:
    d = L.dims.dim
    m = L.dense().copy()
    m[0, :] = vec(np.eye(d))
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    return solve_linear(m, rhs)


def _nullspace_sparse(L: Liouvillian) -> np.ndarray:
    """Trace-constrained null vector by sparse LU (first row -> trace)."""
    d = L.dims.dim
    m = sps.csr_matrix(L.matrix)
    trace_row = sps.csr_matrix(vec(np.eye(d)).astype(complex)[None, :])
    a = sps.vstack([trace_row, m[1:]], format="csc")
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    try:
        x = spla.splu(a).solve(rhs)
    except RuntimeError as exc:  # exactly singular factor
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("solution contains non-finite entries")
    resid = np.linalg.norm(a @ x - rhs)
    bound = 1e-10 * (spla.norm(a) * np.linalg.norm(x) + 1.0)
    if resid > bound:
        raise SingularSystem(f"residual {resid:.3e} exceeds bound {bound:.3e}")
    return x


def _nullspace(L: Liouvillian) -> np.ndarray:
    """Trace-constrained null vector, solved in real Hermitian coordinates.

    A Hermitian rho is parametrized by its diagonal and the real and
    imaginary parts of its upper triangle; the generator maps that real
    space to itself, so the system is real and four times cheaper to factor
    than its complex counterpart. The first diagonal equation is replaced by
    the trace condition.
    """
    if L.is_sparse:
        return _nullspace_sparse(L)
    d = L.dims.dim
    r = kernels.hermitian_generator(L.matrix, d)
    r[0, :] = 0.0
    r[0, :d] = 1.0
    rhs = np.zeros(d * d)
    rhs[0] = 1.0
    x = solve_linear(r, rhs)
    iu, ju = np.triu_indices(d, 1)
    nu = len(iu)
    rho = np.zeros((d, d), dtype=complex)
    rho[np.arange(d), np.arange(d)] = x[:d]
    rho[iu, ju] = x[d:d + nu] + 1j * x[d + nu:]
    rho[ju, iu] = x[d:d + nu] - 1j * x[d + nu:]
    return vec(rho)


def _rk4_propagator(m: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for the linear system ``v' = m v`` as a matrix."""
    n = m.shape[0]
    hm = h * m
    eye = np.eye(n, dtype=complex)
    p = eye + hm / 4.0
    p = eye + (hm @ p) / 3.0
    p = eye + (hm @ p) / 2.0
    return eye + hm @ p


def _step_size(L: Liouvillian, t_final: float, dt_max: float) -> tuple[float, int]:
    norm_inf = float(np.max(np.asarray(abs(L.matrix).sum(axis=1)), initial=0.0))
    h = dt_max if norm_inf == 0.0 else min(dt_max, 0.1 / norm_inf)
    if not h > 0 or h < 1e-15 * max(t_final, 1.0):
        raise StepSizeUnderflow(f"step size {h:.3e} too small for t_final = {t_final}")
    nsteps = max(1, math.ceil(t_final / h - 1e-12))
    if nsteps > 2**52:
        raise StepSizeUnderflow(f"{nsteps} steps required")
    return t_final / nsteps, nsteps


def _propagate(m: np.ndarray, v: np.ndarray, h: float, nsteps: int) -> np.ndarray:
    """Apply ``nsteps`` fixed RK4 steps.

    For long runs the one-step propagator is raised to the required power by
    repeated squaring, which reproduces the stepwise result to roundoff.
    """
    n = m.shape[0]
    if 4 * nsteps <= nsteps.bit_length() * n:
        for _ in range(nsteps):
            k1 = m @ v
            k2 = m @ (v + 0.5 * h * k1)
            k3 = m @ (v + 0.5 * h * k2)
            k4 = m @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return v
    p = _rk4_propagator(m, h)
    k = nsteps
    while k:
        if k & 1:
            v = p @ v
        k >>= 1
        if k:
            p = p @ p
    return v


def evolve(L: Liouvillian, rho0: DensityMatrix, t_final: float, dt_max: float = 0.1) -> DensityMatrix:
    """Fixed-step fourth-order Runge-Kutta integration of the master equation."""
    if rho0.dims != L.dims:
        raise DimensionMismatch(f"{rho0.dims} vs {L.dims}")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    if t_final == 0:
        return rho0
    h, nsteps = _step_size(L, t_final, dt_max)
    v = _propagate(L.dense(), vec(rho0.data).astype(complex), h, nsteps)
    rho = unvec(v, L.dims.dim)
    drift = abs(np.trace(rho) - np.trace(rho0.data))
    if drift > 1e-8:
        raise NonConvergence(f"trace drift {drift:.3e} during evolution")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(L.dims, rho / np.trace(rho).real)


def _evolve_to_steady(L: Liouvillian, tol: float, rho0: DensityMatrix | None = None) -> np.ndarray:
    if L.min_rate <= 0:
        raise NonConvergence("no dissipation: the evolution has no steady state")
    rho = vacuum(L.dims) if rho0 is None else rho0
    t = 50.0 / L.min_rate
    h, nsteps = _step_size(L, t, dt_max=0.1)
    v = vec(rho.data).astype(complex)
    p = _rk4_propagator(L.dense(), h)
    for _ in range(nsteps.bit_length()):
        p = p @ p
    # p now advances by at least t; keep applying until stationary
    for _ in range(40):
        v = p @ v
        if L.residual(unvec(v, L.dims.dim) / np.trace(unvec(v, L.dims.dim))) <= tol:
            break
        p = p @ p
    return v


def steady_state(L: Liouvillian, tol: float = DEFAULT_TOL, method: str = "nullspace") -> SteadyStateReport:
    """Unique stationary state of ``L``.

    The null-space solve replaces the first row of the generator with the
    trace functional. On solver failure, or when the residual exceeds ``tol``,
    the state is instead obtained by time evolution from the vacuum.
    """
    if method not in ("nullspace", "evolution"):
        raise ValueError(f"unknown method {method!r}")
    used = method
    rho = None
    if method == "nullspace":
        try:
            rho, resid = _finalize(L, _nullspace(L))
            if not resid <= tol:
                rho = None
        except (SingularSystem, NonPositive):
            rho = None
        if rho is None:
            used = "evolution"
    if rho is None:
        rho, resid = _finalize(L, _evolve_to_steady(L, tol))
        if not resid <= tol:
            raise NonConvergence(f"residual {resid:.3e} exceeds tolerance {tol:.1e} with both methods")
    cav, ph = top_populations(rho.data, L.dims)
    top = max(cav, ph)
    return SteadyStateReport(rho, resid, used, top < TOP_LEVEL_THRESHOLD, top)


def solve(
    sp: SystemParams,
    dims: Truncation = DEFAULT_TRUNCATION,
    tol: float = DEFAULT_TOL,
    cavity_detuning: float | None = None,
) -> SteadyStateReport:
    return steady_state(liouvillian_for(sp, dims, cavity_detuning), tol)


def _g2_and_n(rho: DensityMatrix) -> tuple[float | None, float]:
    from .observables import g2_zero, occupations

    n = occupations(rho)[1]
    try:
        return g2_zero(rho), n
    except InsufficientOccupation:
        return None, n


def _changed(new: float | None, old: float | None, tol: float) -> bool:
    if new is None or old is None:
        return (new is None) != (old is None)
    return abs(new - old) > tol * max(abs(new), abs(old), 1e-300)


def converge_truncation(
    sp: SystemParams,
    start: Truncation = DEFAULT_TRUNCATION,
    tol: float = 1e-6,
    *,
    max_nb: int = 64,
    max_dim: int = 120,
    steady_tol: float = DEFAULT_TOL,
    cavity_detuning: float | None = None,
) -> tuple[Truncation, SteadyStateReport]:
    """Grow the Fock cutoffs until the steady state stops depending on them.

    Converged means: g2(0) and the mean phonon number change by less than
    ``tol`` (relative) between successive sizes, and both top Fock levels
    hold less than 1e-8 population. Growth stops with
    :class:`TruncationExplosion` at ``max_nb`` phonon levels, at ``max_dim``
    composite levels, or when the phonon tail stops shrinking.
    """
    dims = start
    if sp.g == 0:
        # decoupled, undriven cavity stays in vacuum
        dims = Truncation(1, dims.n_b)
    elif dims.n_a < 2:
        dims = Truncation(2, dims.n_b)
    prev = None
    while True:
        rep = solve(sp, dims, steady_tol, cavity_detuning)
        g2, n = _g2_and_n(rep.rho)
        cav_top, ph_top = top_populations(rep.rho.data, dims)
        changed = prev is None or _changed(g2, prev[0], tol) or _changed(n, prev[1], tol)
        if not changed and max(cav_top, ph_top) < TOP_LEVEL_THRESHOLD:
            return dims, replace(rep, truncation_converged=True)
        if prev is not None and dims.n_b >= 16 and ph_top >= 0.5 * prev[2] and ph_top >= TOP_LEVEL_THRESHOLD:
            raise TruncationExplosion(
                f"phonon tail not resolving at n_b = {dims.n_b} (top population {ph_top:.2e}); "
                "parameters are outside the weak-drive regime"
            )
        grow_a = cav_top >= TOP_LEVEL_THRESHOLD
        grow_b = ph_top >= TOP_LEVEL_THRESHOLD
        if not (grow_a or grow_b):
            # tails are small but observables still move: enlarge the heavier tail
            grow_a, grow_b = cav_top > ph_top, cav_top <= ph_top
        n_a = dims.n_a + 1 if grow_a else dims.n_a
        # large steps while the tail is heavy, +2 once it is nearly resolved
        step = max(2, dims.n_b // 4) if ph_top > 100 * TOP_LEVEL_THRESHOLD else 2
        n_b = dims.n_b + step if grow_b else dims.n_b
        if n_b > max_nb:
            raise TruncationExplosion(f"n_b = {n_b} would exceed the cap {max_nb}")
        if n_a * n_b > max_dim:
            raise TruncationExplosion(f"composite dimension {n_a * n_b} would exceed the cap {max_dim}")
        prev = (g2, n, ph_top)
        dims = Truncation(n_a, n_b)

