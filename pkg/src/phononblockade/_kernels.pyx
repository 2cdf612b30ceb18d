# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Liouvillian assembly and small affine RK4 loops."""

import numpy as np
cimport cython


def liouvillian_matrix(h, jumps, rates):
    cdef Py_ssize_t d = np.shape(h)[0]
    cdef Py_ssize_t i, j, k, l, row, q, nj = len(jumps)
    cdef double r
    cdef double complex cik

    h_nh_arr = np.array(h, dtype=complex, copy=True)
    cs = []
    rs = []
    for c, rate in zip(jumps, rates):
        c = np.ascontiguousarray(c, dtype=complex)
        h_nh_arr -= 0.5j * rate * (c.conj().T @ c)
        if rate != 0.0:
            cs.append(c)
            rs.append(float(rate))
    cdef double complex[:, ::1] hn = h_nh_arr
    out = np.zeros((d * d, d * d), dtype=complex)
    cdef double complex[:, ::1] m = out
    cdef const double complex[:, ::1] cv

    for j in range(d):
        for i in range(d):
            row = i + j * d
            for k in range(d):
                m[row, k + j * d] = m[row, k + j * d] - 1j * hn[i, k]
            for l in range(d):
                m[row, i + l * d] = m[row, i + l * d] + 1j * hn[j, l].conjugate()

    for q in range(len(cs)):
        cv = cs[q]
        r = rs[q]
        for j in range(d):
            for i in range(d):
                row = i + j * d
                for k in range(d):
                    cik = cv[i, k]
                    if cik == 0:
                        continue
                    for l in range(d):
                        if cv[j, l] != 0:
                            m[row, k + l * d] = m[row, k + l * d] + r * cik * cv[j, l].conjugate()
    return out


def rk4_affine(a, b, y0, double h, long nsteps):
    cdef const double complex[:, ::1] av = np.ascontiguousarray(a, dtype=complex)
    cdef const double complex[::1] bv = np.ascontiguousarray(b, dtype=complex)
    cdef Py_ssize_t n = av.shape[0]
    y_arr = np.array(y0, dtype=complex, copy=True)
    cdef double complex[::1] y = y_arr
    cdef double complex[:, ::1] k = np.zeros((4, n), dtype=complex)
    cdef double complex[::1] tmp = np.zeros(n, dtype=complex)
    cdef double complex acc
    cdef Py_ssize_t s, stage, i, j
    cdef double c
    for s in range(nsteps):
        for stage in range(4):
            if stage == 0:
                for i in range(n):
                    tmp[i] = y[i]
            else:
                c = 0.5 * h if stage < 3 else h
                for i in range(n):
                    tmp[i] = y[i] + c * k[stage - 1, i]
            for i in range(n):
                acc = bv[i]
                for j in range(n):
                    acc = acc + av[i, j] * tmp[j]
                k[stage, i] = acc
        for i in range(n):
            y[i] = y[i] + (h / 6.0) * (k[0, i] + 2.0 * k[1, i] + 2.0 * k[2, i] + k[3, i])
    return y_arr


def hermitian_generator(m, Py_ssize_t d):
    """Real matrix of a Hermiticity-preserving generator in Hermitian coordinates.

    Coordinates are the diagonal of rho, then Re and Im of its strict upper
    triangle (row-major ``np.triu_indices`` order).
    """
    cdef const double complex[:, ::1] mv = np.ascontiguousarray(m, dtype=complex)
    cdef Py_ssize_t nu = d * (d - 1) // 2
    cdef Py_ssize_t n = d + 2 * nu
    out = np.empty((n, n), dtype=float)
    cdef double[:, ::1] r = out
    cdef Py_ssize_t[::1] up = np.empty(nu, dtype=np.intp)
    cdef Py_ssize_t[::1] low = np.empty(nu, dtype=np.intp)
    cdef Py_ssize_t[::1] rows = np.empty(d + nu, dtype=np.intp)
    cdef Py_ssize_t i, j, q, p, row
    cdef double complex s, t
    q = 0
    for i in range(d):
        for j in range(i + 1, d):
            up[q] = i + j * d
            low[q] = j + i * d
            q += 1
    for i in range(d):
        rows[i] = i * (d + 1)
    for q in range(nu):
        rows[d + q] = up[q]
    for p in range(d + nu):
        row = rows[p]
        for i in range(d):
            r[p, i] = mv[row, i * (d + 1)].real
        for q in range(nu):
            s = mv[row, up[q]]
            t = mv[row, low[q]]
            r[p, d + q] = (s + t).real
            r[p, d + nu + q] = -(s - t).imag
        if p >= d:
            for i in range(d):
                r[p + nu, i] = mv[row, i * (d + 1)].imag
            for q in range(nu):
                s = mv[row, up[q]]
                t = mv[row, low[q]]
                r[p + nu, d + q] = (s + t).imag
                r[p + nu, d + nu + q] = (s - t).real
    return out
