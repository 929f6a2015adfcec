# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; see ``_pykernels`` for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, log, fabs, rint, fmod, INFINITY, M_PI

cnp.import_array()

cdef double _TAYLOR_CUTOFF = 1e-3


cdef inline double _sinc_pi(double x) nogil:
    cdef double y = M_PI * x
    cdef double y2, n, s
    if fabs(y) < _TAYLOR_CUTOFF:
        y2 = y * y
        return 1.0 - y2 / 6.0 + y2 * y2 / 120.0
    n = rint(x)
    s = sin(M_PI * (x - n))
    if fmod(n, 2.0) != 0.0:
        s = -s
    return s / y


def sinc_pi(x):
    cdef const double[::1] flat = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t i, n = flat.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _sinc_pi(flat[i])
    return out.reshape(np.shape(x))


def gram_matrix(nodes):
    cdef const double[:, ::1] t = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef Py_ssize_t l = t.shape[0], d = t.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((l, l))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t a, b, i
    cdef double v
    with nogil:
        for a in range(l):
            o[a, a] = 1.0
            for b in range(a + 1, l):
                v = 1.0
                for i in range(d):
                    v *= _sinc_pi(t[a, i] - t[b, i])
                o[a, b] = v
                o[b, a] = v
    return out


def sinc_synthesis(points, centers, coeffs):
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] s = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0], k = s.shape[0], d = p.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef Py_ssize_t a, j, i
    cdef double acc, v
    with nogil:
        for a in range(m):
            acc = 0.0
            for j in range(k):
                v = c[j]
                for i in range(d):
                    v *= _sinc_pi(p[a, i] - s[j, i])
                acc += v
            out[a] = acc
    return out


def cosine_sum(t, xi, w):
    cdef const double[::1] tt = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xi, dtype=np.float64)
    cdef const double[::1] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t m = tt.shape[0], q = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef Py_ssize_t a, j
    cdef double acc
    with nogil:
        for a in range(m):
            acc = 0.0
            for j in range(q):
                acc += ww[j] * cos(tt[a] * x[j])
            out[a] = acc
    return out


def log_abs_product(t, zeros, scales, Py_ssize_t skip=-1):
    cdef const double[::1] tt = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] z = np.ascontiguousarray(zeros, dtype=np.float64)
    cdef const double[::1] sc = np.ascontiguousarray(scales, dtype=np.float64)
    cdef Py_ssize_t m = tt.shape[0], r = z.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logabs = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sign = np.empty(m)
    cdef Py_ssize_t a, j
    cdef double acc, sg, diff, base = 0.0, basesg = 1.0
    with nogil:
        for j in range(r):
            if j == skip:
                continue
            base += log(fabs(sc[j]))
            if sc[j] < 0.0:
                basesg = -basesg
        for a in range(m):
            acc = base
            sg = basesg
            for j in range(r):
                if j == skip:
                    continue
                diff = tt[a] - z[j]
                if diff == 0.0:
                    sg = 0.0
                    break
                if diff < 0.0:
                    sg = -sg
                acc += log(fabs(diff))
            if sg == 0.0:
                logabs[a] = -INFINITY
            else:
                logabs[a] = acc
            sign[a] = sg
    return logabs, sign
