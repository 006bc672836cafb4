# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: ETDRK4 stage updates, Clenshaw sums, theta series."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, cosh, sinh, M_PI

cnp.import_array()

BACKEND = "cython"


def etd_stage(const double complex[::1] e2, const double complex[::1] v,
              const double complex[::1] q, const double complex[::1] nv,
              double complex[::1] out):
    """out = e2*v + q*nv"""
    cdef Py_ssize_t i, n = v.shape[0]
    for i in range(n):
        out[i] = e2[i] * v[i] + q[i] * nv[i]
    return np.asarray(out)


def etd_stage_c(const double complex[::1] e2, const double complex[::1] a,
                const double complex[::1] q, const double complex[::1] nb,
                const double complex[::1] nv, double complex[::1] out):
    """out = e2*a + q*(2*nb - nv)"""
    cdef Py_ssize_t i, n = a.shape[0]
    for i in range(n):
        out[i] = e2[i] * a[i] + q[i] * (2.0 * nb[i] - nv[i])
    return np.asarray(out)


def etd_final(const double complex[::1] e, const double complex[::1] v,
              const double complex[::1] nv, const double complex[::1] na,
              const double complex[::1] nb, const double complex[::1] nc,
              const double complex[::1] f1, const double complex[::1] f2,
              const double complex[::1] f3, double complex[::1] out):
    """out = e*v + nv*f1 + 2*(na + nb)*f2 + nc*f3"""
    cdef Py_ssize_t i, n = v.shape[0]
    for i in range(n):
        out[i] = e[i] * v[i] + nv[i] * f1[i] + 2.0 * (na[i] + nb[i]) * f2[i] + nc[i] * f3[i]
    return np.asarray(out)


def clenshaw(const double[::1] c, const double[::1] x):
    """Evaluate sum_k c[k] T_k(x) for each x."""
    cdef Py_ssize_t i, k, m = x.shape[0], n = c.shape[0]
    cdef double ck, t
    res = np.empty(m)
    cdef double[::1] r = res
    cdef double[::1] b1 = np.zeros(m), b2 = np.zeros(m), xx = np.empty(m)
    for i in range(m):
        xx[i] = 2.0 * x[i]
    # outer loop over coefficients keeps the inner loop independent per x
    for k in range(n - 1, 0, -1):
        ck = c[k]
        for i in range(m):
            t = ck + xx[i] * b1[i] - b2[i]
            b2[i] = b1[i]
            b1[i] = t
    for i in range(m):
        r[i] = c[0] + 0.5 * xx[i] * b1[i] - b2[i]
    return res


def theta_sums(const double[::1] z, double nome, int nterms, bint hyperbolic):
    """Theta series and its first two z-derivatives.

    With ``hyperbolic`` false this is 1 + 2 sum q^(n^2) cos(2 pi n z);
    otherwise cos is replaced by cosh.
    """
    cdef Py_ssize_t i, m = z.shape[0]
    cdef int n
    cdef double qn, w, s0, s1, s2, arg, c, sn
    th = np.empty(m)
    d1 = np.empty(m)
    d2 = np.empty(m)
    cdef double[::1] t0 = th, t1 = d1, t2 = d2
    cdef double[::1] qp = np.array([nome ** (k * k) for k in range(1, nterms + 1)])
    for i in range(m):
        s0 = 1.0
        s1 = 0.0
        s2 = 0.0
        for n in range(1, nterms + 1):
            qn = 2.0 * qp[n - 1]
            w = 2.0 * M_PI * n
            arg = w * z[i]
            if hyperbolic:
                c = cosh(arg)
                sn = sinh(arg)
                s0 += qn * c
                s1 += qn * w * sn
                s2 += qn * w * w * c
            else:
                c = cos(arg)
                sn = sin(arg)
                s0 += qn * c
                s1 -= qn * w * sn
                s2 -= qn * w * w * c
        t0[i] = s0
        t1[i] = s1
        t2[i] = s2
    return th, d1, d2
