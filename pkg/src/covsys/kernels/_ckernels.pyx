# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: exhaustive cocycle sweeps, twisted convolution, and
quasifree Gram assembly.  Mirrors covsys.kernels._pykernels exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin, sqrt

cnp.import_array()

ctypedef cnp.complex128_t cplx
ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64


cdef inline void _matmul(const cplx[:, ::1] a, const cplx[:, ::1] b, cplx[:, ::1] out, int d) noexcept nogil:
    cdef int i, j, k
    cdef cplx acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


cdef inline void _matmul_bdag(const cplx[:, ::1] a, const cplx[:, ::1] b, cplx[:, ::1] out, int d) noexcept nogil:
    # out = a @ b^dagger
    cdef int i, j, k
    cdef cplx acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[i, k] * b[j, k].conjugate()
            out[i, j] = acc


cdef inline void _adagmul(const cplx[:, ::1] a, const cplx[:, ::1] b, cplx[:, ::1] out, int d) noexcept nogil:
    # out = a^dagger @ b
    cdef int i, j, k
    cdef cplx acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[k, i].conjugate() * b[k, j]
            out[i, j] = acc


cdef inline double _maxdiff2(const cplx[:, ::1] a, const cplx[:, ::1] b, int d) noexcept nogil:
    # squared entrywise sup distance
    cdef int i, j
    cdef double best = 0.0, v
    cdef cplx delta
    for i in range(d):
        for j in range(d):
            delta = a[i, j] - b[i, j]
            v = delta.real * delta.real + delta.imag * delta.imag
            if v > best:
                best = v
    return best


def cocycle_residual_left(const cplx[:, :, :, ::1] values, const cplx[:, :, ::1] conj, const i64[:, ::1] table):
    cdef int n = table.shape[0]
    cdef int d = values.shape[2]
    cdef int x, y, z
    cdef double best = -1.0, v
    cdef int wx = 0, wy = 0, wz = 0
    cdef cplx sl, sr, cx, delta
    scratch = np.empty((4, d, d), dtype=np.complex128)
    cdef cplx[:, ::1] t1 = scratch[0]
    cdef cplx[:, ::1] t2 = scratch[1]
    cdef cplx[:, ::1] lhs = scratch[2]
    cdef cplx[:, ::1] rhs = scratch[3]
    if d == 1:
        with nogil:
            for x in range(n):
                cx = conj[x, 0, 0]
                for y in range(n):
                    for z in range(n):
                        sl = cx * values[y, z, 0, 0] * cx.conjugate()
                        sr = (values[x, y, 0, 0] * values[table[x, y], z, 0, 0]
                              * values[x, table[y, z], 0, 0].conjugate())
                        delta = sl - sr
                        v = delta.real * delta.real + delta.imag * delta.imag
                        if v > best:
                            best = v
                            wx = x
                            wy = y
                            wz = z
        return sqrt(best), (wx, wy, wz)
    with nogil:
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    # lhs = conj[x] @ values[y,z] @ conj[x]^dagger
                    _matmul(conj[x], values[y, z], t1, d)
                    _matmul_bdag(t1, conj[x], lhs, d)
                    # rhs = values[x,y] @ values[xy,z] @ values[x,yz]^dagger
                    _matmul(values[x, y], values[table[x, y], z], t2, d)
                    _matmul_bdag(t2, values[x, table[y, z]], rhs, d)
                    v = _maxdiff2(lhs, rhs, d)
                    if v > best:
                        best = v
                        wx = x
                        wy = y
                        wz = z
    return sqrt(best), (wx, wy, wz)


def cocycle_residual_right(const cplx[:, :, :, ::1] values, const cplx[:, :, ::1] conj, const i64[:, ::1] table):
    cdef int n = table.shape[0]
    cdef int d = values.shape[2]
    cdef int x, y, z
    cdef double best = -1.0, v
    cdef int wx = 0, wy = 0, wz = 0
    cdef cplx sl, sr, cy, delta
    scratch = np.empty((4, d, d), dtype=np.complex128)
    cdef cplx[:, ::1] t1 = scratch[0]
    cdef cplx[:, ::1] t2 = scratch[1]
    cdef cplx[:, ::1] lhs = scratch[2]
    cdef cplx[:, ::1] rhs = scratch[3]
    if d == 1:
        with nogil:
            for y in range(n):
                cy = conj[y, 0, 0]
                for z in range(n):
                    for x in range(n):
                        sl = cy.conjugate() * values[z, x, 0, 0] * cy
                        sr = (values[table[z, x], y, 0, 0].conjugate()
                              * values[z, table[x, y], 0, 0] * values[x, y, 0, 0])
                        delta = sl - sr
                        v = delta.real * delta.real + delta.imag * delta.imag
                        if v > best:
                            best = v
                            wx = x
                            wy = y
                            wz = z
        return sqrt(best), (wx, wy, wz)
    with nogil:
        for y in range(n):
            for z in range(n):
                for x in range(n):
                    # lhs = conj[y]^dagger @ values[z,x] @ conj[y]
                    _adagmul(conj[y], values[z, x], t1, d)
                    _matmul(t1, conj[y], lhs, d)
                    # rhs = values[zx,y]^dagger @ values[z,xy] @ values[x,y]
                    _adagmul(values[table[z, x], y], values[z, table[x, y]], t2, d)
                    _matmul(t2, values[x, y], rhs, d)
                    v = _maxdiff2(lhs, rhs, d)
                    if v > best:
                        best = v
                        wx = x
                        wy = y
                        wz = z
    return sqrt(best), (wx, wy, wz)


def twisted_convolve(const cplx[:, :, ::1] fvals, const cplx[:, :, :, ::1] gsig,
                     const cplx[:, :, :, ::1] xi, const i64[:, ::1] table, const i64[::1] inverse):
    cdef int n = table.shape[0]
    cdef int d = fvals.shape[1]
    cdef int x, y, i, j, z
    out_arr = np.zeros((n, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    scratch = np.empty((2, d, d), dtype=np.complex128)
    cdef cplx[:, ::1] t1 = scratch[0]
    cdef cplx[:, ::1] t2 = scratch[1]
    with nogil:
        for x in range(n):
            for y in range(n):
                z = table[inverse[y], x]
                _matmul(fvals[y], xi[y, z], t1, d)
                _matmul(t1, gsig[y, z], t2, d)
                for i in range(d):
                    for j in range(d):
                        out[x, i, j] = out[x, i, j] + t2[i, j]
    return out_arr


def quasifree_gram(const f64[:, :, ::1] zpts, const f64[:, :, ::1] eps, const f64[:, :, ::1] tmat,
                   const f64[::1] signs, const f64[::1] weights):
    cdef int nat = zpts.shape[0]
    cdef int p = zpts.shape[1]
    cdef int a, j, l, mu, nu
    cdef double phase, damp, dmu, dnu, mag
    out_arr = np.zeros((p, p), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    with nogil:
        for a in range(nat):
            for j in range(p):
                for l in range(p):
                    phase = 0.0
                    damp = 0.0
                    for mu in range(4):
                        dmu = zpts[a, j, mu] - zpts[a, l, mu]
                        for nu in range(4):
                            dnu = zpts[a, j, nu] - zpts[a, l, nu]
                            phase = phase + zpts[a, j, mu] * eps[a, mu, nu] * zpts[a, l, nu]
                            damp = damp + dmu * tmat[a, mu, nu] * dnu
                    phase = 0.5 * signs[a] * phase
                    mag = weights[a] * exp(-0.5 * damp)
                    out[j, l] = out[j, l] + mag * cos(phase) + 1j * (mag * sin(phase))
    return out_arr
