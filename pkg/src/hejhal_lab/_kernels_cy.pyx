# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops: Cauchy power sums and dense kernel assemblies.

Mirrors the API of ``_kernels_py``; selected at import time by ``_backend``.
"""

import numpy as np
cimport numpy as cnp


def cauchy_powersum(targets, nodes, dens, cw, int p):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] t = np.ascontiguousarray(targets, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zn = np.ascontiguousarray(nodes, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] wgt = (
        np.asarray(dens, dtype=np.complex128) * np.asarray(cw, dtype=np.complex128))
    cdef Py_ssize_t nt = t.shape[0], nn = zn.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(nt, dtype=np.complex128)
    cdef Py_ssize_t i, k
    cdef double complex acc, d, ker, ti
    for i in range(nt):
        acc = 0
        ti = t[i]
        if p == 1:
            for k in range(nn):
                acc = acc + wgt[k] / (zn[k] - ti)
        elif p == 2:
            for k in range(nn):
                d = zn[k] - ti
                acc = acc + wgt[k] / (d * d)
        else:
            for k in range(nn):
                d = zn[k] - ti
                ker = d
                for _ in range(p - 1):
                    ker = ker * d
                acc = acc + wgt[k] / ker
        out[i] = acc
    return out


def assemble_double_layer(z, cw, diag):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cc = np.ascontiguousarray(cw, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dd = np.ascontiguousarray(diag, dtype=np.float64)
    cdef Py_ssize_t n = zz.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, n))
    cdef Py_ssize_t i, j
    cdef double inv2pi = 1.0 / (2.0 * np.pi)
    cdef double complex q
    for i in range(n):
        for j in range(n):
            if i == j:
                out[i, i] = dd[i]
            else:
                q = cc[j] / (zz[j] - zz[i])
                out[i, j] = q.imag * inv2pi
    return out


def assemble_ks(z, T, sqrtw):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] tt = np.ascontiguousarray(T, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sw = np.ascontiguousarray(sqrtw, dtype=np.float64)
    cdef Py_ssize_t n = zz.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((n, n), dtype=np.complex128)
    cdef Py_ssize_t i, j
    cdef double complex pref = 1.0 / (2.0j * np.pi)
    cdef double complex d, ker
    for i in range(n):
        for j in range(n):
            if i == j:
                out[i, i] = 0
            else:
                d = zz[i] - zz[j]
                ker = tt[j] / d + (tt[i].conjugate()) / ((-d).conjugate())
                out[i, j] = pref * ker * sw[i] * sw[j]
    return out


def min_dist(targets, nodes):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] t = np.ascontiguousarray(targets, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zn = np.ascontiguousarray(nodes, dtype=np.complex128)
    cdef Py_ssize_t nt = t.shape[0], nn = zn.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nt)
    cdef Py_ssize_t i, k
    cdef double best, dx, dy, d2
    cdef double complex ti
    for i in range(nt):
        ti = t[i]
        best = 1e300
        for k in range(nn):
            dx = zn[k].real - ti.real
            dy = zn[k].imag - ti.imag
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
        out[i] = best ** 0.5
    return out
