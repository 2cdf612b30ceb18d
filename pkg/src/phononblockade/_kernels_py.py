"""Pure-Python/NumPy implementations of the hot kernels.

Same signatures as the compiled ``_kernels`` extension; used when the
extension is not built.
"""

import numpy as np


def liouvillian_matrix(h, jumps, rates):
    """Column-stacked Lindblad generator for ``h`` and jump operators ``jumps``."""
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    eye = np.eye(d)
    h_nh = h.copy()
    for c, r in zip(jumps, rates):
        c = np.asarray(c, dtype=complex)
        h_nh -= 0.5j * r * (c.conj().T @ c)
    m = -1j * np.kron(eye, h_nh) + 1j * np.kron(h_nh.conj(), eye)
    for c, r in zip(jumps, rates):
        if r == 0.0:
            continue
        c = np.asarray(c, dtype=complex)
        m += r * np.kron(c.conj(), c)
    return m


def rk4_affine(a, b, y0, h, nsteps):
    """Integrate ``y' = a @ y + b`` with ``nsteps`` classical RK4 steps of size ``h``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    y = np.array(y0, dtype=complex)
    for _ in range(int(nsteps)):
        k1 = a @ y + b
        k2 = a @ (y + 0.5 * h * k1) + b
        k3 = a @ (y + 0.5 * h * k2) + b
        k4 = a @ (y + h * k3) + b
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def hermitian_generator(m, d):
    """Real matrix of a Hermiticity-preserving generator in Hermitian coordinates.

    Coordinates are the diagonal of rho, then Re and Im of its strict upper
    triangle (row-major ``np.triu_indices`` order).
    """
    iu, ju = np.triu_indices(d, 1)
    diag = np.arange(d) * (d + 1)
    up = iu + ju * d
    low = ju + iu * d
    mt = np.ascontiguousarray(np.asarray(m).T)
    cols = np.concatenate([mt[diag], mt[up] + mt[low], 1j * (mt[up] - mt[low])], axis=0).T
    rows = np.concatenate([diag, up])
    return np.concatenate([cols[rows].real, cols[up].imag], axis=0)
