# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled matrix-element kernels; see ``_kernels_py`` for the reference."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, lgamma, sqrt

cnp.import_array()


cdef inline double _q_lm(long l, long m) nogil:
    return 0.5 + (1.0 - 4.0 * m * m) / (2.0 * (2 * l - 1) * (2 * l + 3))


cdef inline double _hyper(long n, long n2, long l) nogil:
    if n2 == n:
        return <double>n
    if n2 == n + 1:
        return 0.5 * sqrt(<double>((n - l) * (n + l + 1)))
    if n2 == n - 1:
        return 0.5 * sqrt(<double>((n - l - 1) * (n + l)))
    return 0.0


cdef double _lower_l(long n, long n2, long l, long m) nogil:
    cdef double angular, branch, scale, log_ratio, prefactor
    if n2 >= n + 2:
        return 0.0
    angular = <double>((l * l - m * m) * ((l - 1) * (l - 1) - m * m))
    if angular <= 0.0:
        return 0.0
    if n2 <= n - 2:
        branch = -1.0
    else:
        scale = (n - l) / (2.0 * n * (2 * l - 1))
        if n2 == n - 1:
            branch = scale * (n * n - 4 * n * l - l * l + n + 3 * l - 2) / (2.0 * (n - 1))
        elif n2 == n:
            branch = scale * (n - l + 1)
        else:
            branch = scale * (n - l + 1) * (n - l + 2) / (2.0 * (n + 1))
    log_ratio = 0.5 * (lgamma(n - l) + lgamma(n2 + l - 1)
                       - lgamma(n + l + 1) - lgamma(n2 - l + 2))
    prefactor = sqrt(angular / ((2 * l + 1) * (2 * l - 3)))
    return prefactor * 2.0 * n * n2 * exp(log_ratio) * branch


def q_lm(long l, long m):
    return _q_lm(l, m)


def hyper(long n, long n2, long l):
    return _hyper(n, n2, l)


def same_l(long n, long n2, long l, long m):
    return _q_lm(l, m) * _hyper(n, n2, l)


def lower_l(long n, long n2, long l, long m):
    return _lower_l(n, n2, l, m)


def fill_perturbation(ns, ls, long m):
    cdef cnp.ndarray[long, ndim=1] n_arr = np.ascontiguousarray(ns, dtype=np.int_)
    cdef cnp.ndarray[long, ndim=1] l_arr = np.ascontiguousarray(ls, dtype=np.int_)
    cdef Py_ssize_t size = n_arr.shape[0]
    cdef cnp.ndarray[double, ndim=2] v = np.zeros((size, size))
    cdef cnp.ndarray[double, ndim=2] t = np.zeros((size, size))
    cdef double[:, ::1] vv = v
    cdef double[:, ::1] tv = t
    cdef long[::1] nv = n_arr
    cdef long[::1] lv = l_arr
    cdef Py_ssize_t i, j
    cdef long n, l, n2, l2
    cdef double q, h, x
    with nogil:
        for i in range(size):
            n = nv[i]
            l = lv[i]
            q = _q_lm(l, m)
            for j in range(i, size):
                n2 = nv[j]
                l2 = lv[j]
                if l2 == l:
                    if n2 - n > 1:
                        continue
                    h = _hyper(n, n2, l)
                    tv[i, j] = h
                    tv[j, i] = h
                    vv[i, j] = q * h
                    vv[j, i] = q * h
                elif l2 == l + 2:
                    x = _lower_l(n2, n, l2, m)
                    vv[i, j] = x
                    vv[j, i] = x
                elif l2 > l + 2:
                    break
    return v, t
