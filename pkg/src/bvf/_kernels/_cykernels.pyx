# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel for profile-likelihood evaluation.

Same contract as ``_pykernels.lehmann_sums``; see that module for the
parameter conventions. Plain C loops over contiguous memoryviews; libm exp/
expm1/log1p saturate on overflow instead of raising.
"""

from libc.math cimport exp, expm1, log1p

BACKEND = "cython"

WEIBULL = 0
GOMPERTZ = 1
LOMAX = 2


def lehmann_sums(int kind, double lam, const double[::1] x_all, const double[::1] x_unc):
    cdef Py_ssize_t i
    cdef Py_ssize_t n = x_all.shape[0]
    cdef Py_ssize_t m = x_unc.shape[0]
    cdef double a = 0.0
    cdef double b = 0.0

    if kind == WEIBULL:
        for i in range(n):
            a += exp(lam * x_all[i])
    elif kind == GOMPERTZ:
        for i in range(n):
            a += expm1(lam * x_all[i])
    elif kind == LOMAX:
        for i in range(n):
            a += log1p(lam * x_all[i])
        for i in range(m):
            b += log1p(lam * x_unc[i])
    else:
        raise ValueError(f"unknown kind code {kind}")
    return a, b
