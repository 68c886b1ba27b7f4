# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; operation order mirrors ``_kernels_py`` exactly."""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs

cnp.import_array()


cdef inline Py_ssize_t _mod(Py_ssize_t a, Py_ssize_t n) nogil:
    cdef Py_ssize_t r = a % n
    if r < 0:
        r += n
    return r


cdef inline void _neumaier_add(double* s, double* c, double x) nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


cdef inline double _weight(Py_ssize_t t, double log_theta, double p, double q_w) nogil:
    cdef double pw = p if t % 2 == 0 else q_w
    return exp(pw * <double>t * log_theta)


def residue_sums(Py_ssize_t n, double log_theta, double p, double q_w, Py_ssize_t M):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c = np.zeros(n)
    cdef double* sp = <double*> s.data
    cdef double* cp = <double*> c.data
    cdef Py_ssize_t t, r
    cdef double w
    with nogil:
        for t in range(M + 1):
            w = _weight(t, log_theta, p, q_w)
            r = t % n
            _neumaier_add(&sp[r], &cp[r], w)
            if t:
                r = _mod(-t, n)
                _neumaier_add(&sp[r], &cp[r], w)
    return s + c


def window_sum(Py_ssize_t center, values, double log_theta, double p, double q_w,
               Py_ssize_t lo, Py_ssize_t hi):
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef double s = 0.0, c = 0.0, w
    cdef Py_ssize_t t
    with nogil:
        for t in range(lo, hi + 1):
            w = _weight(t, log_theta, p, q_w)
            _neumaier_add(&s, &c, w * v[_mod(center + t, n)])
            if t:
                _neumaier_add(&s, &c, w * v[_mod(center - t, n)])
    return s + c


def uff_residuals(a, b, tau):
    den = a * a + b * b + tau + 2.0
    f1 = a * den - (tau * a * a + 2.0 * b * b + 2.0)
    f2 = b * den - (tau * b * b + 2.0 * a * a + 2.0)
    return f1, f2


cdef inline bint _straddles(double f00, double f10, double f01, double f11) nogil:
    cdef double lo = f00, hi = f00
    if f10 < lo: lo = f10
    if f10 > hi: hi = f10
    if f01 < lo: lo = f01
    if f01 > hi: hi = f01
    if f11 < lo: lo = f11
    if f11 > hi: hi = f11
    return lo <= 0.0 and hi >= 0.0


def uff_candidate_cells(double tau, double h, Py_ssize_t N):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g = h * np.arange(1, N + 1, dtype=np.float64)
    cdef double[:, ::1] f1 = np.empty((N, N))
    cdef double[:, ::1] f2 = np.empty((N, N))
    cdef Py_ssize_t i, j, count = 0, cap = 64
    cdef double a, b, den
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((cap, 2), dtype=np.int64)
    with nogil:
        for i in range(N):
            a = g[i]
            for j in range(N):
                b = g[j]
                den = a * a + b * b + tau + 2.0
                f1[i, j] = a * den - (tau * a * a + 2.0 * b * b + 2.0)
                f2[i, j] = b * den - (tau * b * b + 2.0 * a * a + 2.0)
    for i in range(N - 1):
        for j in range(N - 1):
            if (_straddles(f1[i, j], f1[i + 1, j], f1[i, j + 1], f1[i + 1, j + 1])
                    and _straddles(f2[i, j], f2[i + 1, j], f2[i, j + 1], f2[i + 1, j + 1])):
                if count == cap:
                    cap *= 2
                    out = np.resize(out, (cap, 2))
                out[count, 0] = i
                out[count, 1] = j
                count += 1
    return out[:count].copy()


def uniforms_from_raw(raw):
    return (np.asarray(raw, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


cdef inline Py_ssize_t _bucket(const double* cdf, Py_ssize_t L, double u) nogil:
    # first index with cdf[idx] > u, clipped to L - 1
    cdef Py_ssize_t lo = 0, hi = L, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    if lo > L - 1:
        lo = L - 1
    return lo


def inverse_cdf(cdf, u):
    cdef double[::1] c = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = uu.shape[0], L = c.shape[0], i
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(m, dtype=np.int64)
    with nogil:
        for i in range(m):
            out[i] = _bucket(&c[0], L, uu[i])
    return out


def tree_heights(Py_ssize_t k, uniforms, cdfs, Py_ssize_t W):
    cdef double[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef double[:, ::1] cd = np.ascontiguousarray(cdfs, dtype=np.float64)
    cdef Py_ssize_t n = cd.shape[0], L = cd.shape[1], V = u.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] heights = np.zeros(V, dtype=np.int64)
    cdef cnp.int64_t* hp = <cnp.int64_t*> heights.data
    cdef Py_ssize_t v, parent_h, b, off
    cdef long tail_hits = 0
    with nogil:
        for v in range(1, V):
            parent_h = hp[(v - 1) // k]
            b = _bucket(&cd[_mod(parent_h, n), 0], L, u[v])
            if b == 0 or b == 2 * W + 2:
                tail_hits += 1
            off = b - 1
            if off < 0:
                off = 0
            elif off > 2 * W:
                off = 2 * W
            hp[v] = parent_h + off - W
    return heights, int(tail_hits)
