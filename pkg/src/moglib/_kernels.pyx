# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled likelihood kernels and the Nelder-Mead driver.

Semantics match ``_kernels_py`` exactly; the simplex is a line-by-line port of
``numerics.simplex_minimize`` that calls the C objective without going back
through Python.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, exp, expm1, fabs, isfinite, INFINITY

cnp.import_array()


cdef inline void _terms(double alpha, double a, double b, double x,
                        double* ld, double* lp) noexcept nogil:
    cdef double e = a * x + 0.5 * b * x * x
    cdef double le = log(e)
    cdef double ea = exp(alpha * le)
    lp[0] = log(-expm1(-ea))
    ld[0] = log(alpha * (a + b * x)) + (alpha - 1.0) * le - ea


cdef double _nll_biv(const double* p, const double[::1] x1, const double[::1] x2,
                     const signed char[::1] region) noexcept nogil:
    cdef double alpha = p[0], a = p[1], b = p[2]
    cdef double t1 = p[3], t2 = p[4], t3 = p[5]
    cdef double c0 = log(t2 * (t1 + t3)), c1 = log(t1 * (t2 + t3)), c2 = log(t3)
    cdef double s = 0.0, ld1, lp1, ld2, lp2
    cdef Py_ssize_t i, n = x1.shape[0]
    cdef signed char r
    for i in range(n):
        r = region[i]
        _terms(alpha, a, b, x1[i], &ld1, &lp1)
        if r == 2:
            s += c2 + ld1 + (t1 + t2 + t3 - 1.0) * lp1
            continue
        _terms(alpha, a, b, x2[i], &ld2, &lp2)
        if r == 0:
            s += c0 + ld1 + ld2 + (t1 + t3 - 1.0) * lp1 + (t2 - 1.0) * lp2
        else:
            s += c1 + ld1 + ld2 + (t1 - 1.0) * lp1 + (t2 + t3 - 1.0) * lp2
    if isfinite(s):
        return -s
    return INFINITY


cdef double _nll_uni(const double* p, const double[::1] x) noexcept nogil:
    cdef double alpha = p[0], a = p[1], b = p[2], theta = p[3]
    cdef double s = 0.0, ld, lp
    cdef Py_ssize_t i, n = x.shape[0]
    for i in range(n):
        _terms(alpha, a, b, x[i], &ld, &lp)
        s += ld + (theta - 1.0) * lp
    s += n * log(theta)
    if isfinite(s):
        return -s
    return INFINITY


def negloglik_bivariate(params, x1, x2, region):
    cdef double[::1] p = np.ascontiguousarray(params, dtype=np.float64)
    return _nll_biv(&p[0], np.ascontiguousarray(x1, dtype=np.float64),
                    np.ascontiguousarray(x2, dtype=np.float64),
                    np.ascontiguousarray(region, dtype=np.int8))


def negloglik_univariate(params, x):
    cdef double[::1] p = np.ascontiguousarray(params, dtype=np.float64)
    return _nll_uni(&p[0], np.ascontiguousarray(x, dtype=np.float64))


cdef struct Problem:
    int kind
    int m
    double zlo
    double zhi


cdef double _objective(Problem* pr, const double* z, const Py_ssize_t* free,
                       double* params, const double[::1] x1, const double[::1] x2,
                       const signed char[::1] region) noexcept nogil:
    cdef int j
    cdef double v
    for j in range(pr.m):
        v = z[j]
        if v < pr.zlo:
            v = pr.zlo
        elif v > pr.zhi:
            v = pr.zhi
        params[free[j]] = exp(v)
    if pr.kind == 0:
        v = _nll_biv(params, x1, x2, region)
    else:
        v = _nll_uni(params, x1)
    if v != v:
        return INFINITY
    return v


def fit_simplex(int kind, z0, free, fixed, x1, x2, region, double step,
                double diam_tol, double val_tol, long max_iter, double zlo, double zhi):
    cdef double[::1] x1v = np.ascontiguousarray(x1, dtype=np.float64)
    cdef double[::1] x2v
    cdef signed char[::1] rv
    if kind == 0:
        x2v = np.ascontiguousarray(x2, dtype=np.float64)
        rv = np.ascontiguousarray(region, dtype=np.int8)
    else:
        x2v = x1v
        rv = np.zeros(1, dtype=np.int8)
    cdef Py_ssize_t[::1] fr = np.ascontiguousarray(free, dtype=np.intp)
    cdef double[::1] params = np.array(fixed, dtype=np.float64)
    cdef int n = fr.shape[0]
    cdef Problem pr
    pr.kind = kind
    pr.m = n
    pr.zlo = zlo
    pr.zhi = zhi

    cdef double[:, ::1] sim = np.empty((n + 1, n))
    cdef double[::1] fs = np.empty(n + 1)
    cdef double[::1] cen = np.empty(n)
    cdef double[::1] xr = np.empty(n)
    cdef double[::1] xe = np.empty(n)
    cdef double[::1] xc = np.empty(n)
    cdef double[::1] tmp = np.empty(n)
    cdef double[::1] z0v = np.ascontiguousarray(z0, dtype=np.float64)
    cdef double rho = 1.0, chi = 2.0, gam = 0.5, sig = 0.5
    cdef double f_r, f_e, f_c, ftmp, diam, d
    cdef long it = 0, nfev = 0
    cdef int reason = 2
    cdef int i, j, k, accepted

    with nogil:
        for i in range(n + 1):
            for j in range(n):
                sim[i, j] = z0v[j]
            if i > 0:
                sim[i, i - 1] += step
            fs[i] = _objective(&pr, &sim[i, 0], &fr[0], &params[0], x1v, x2v, rv)
            nfev += 1

        while True:
            # stable insertion sort of vertices by value
            for i in range(1, n + 1):
                ftmp = fs[i]
                for j in range(n):
                    tmp[j] = sim[i, j]
                k = i - 1
                while k >= 0 and fs[k] > ftmp:
                    fs[k + 1] = fs[k]
                    for j in range(n):
                        sim[k + 1, j] = sim[k, j]
                    k -= 1
                fs[k + 1] = ftmp
                for j in range(n):
                    sim[k + 1, j] = tmp[j]

            diam = 0.0
            for i in range(1, n + 1):
                for j in range(n):
                    d = fabs(sim[i, j] - sim[0, j])
                    if d > diam:
                        diam = d
            if diam < diam_tol:
                reason = 0
                break
            if isfinite(fs[n]) and fs[n] - fs[0] < val_tol:
                reason = 1
                break
            if it >= max_iter:
                break
            it += 1

            for j in range(n):
                cen[j] = 0.0
                for i in range(n):
                    cen[j] += sim[i, j]
                cen[j] /= n
            for j in range(n):
                xr[j] = cen[j] + rho * (cen[j] - sim[n, j])
            f_r = _objective(&pr, &xr[0], &fr[0], &params[0], x1v, x2v, rv)
            nfev += 1

            if f_r < fs[0]:
                for j in range(n):
                    xe[j] = cen[j] + chi * (xr[j] - cen[j])
                f_e = _objective(&pr, &xe[0], &fr[0], &params[0], x1v, x2v, rv)
                nfev += 1
                if f_e < f_r:
                    for j in range(n):
                        sim[n, j] = xe[j]
                    fs[n] = f_e
                else:
                    for j in range(n):
                        sim[n, j] = xr[j]
                    fs[n] = f_r
                continue
            if f_r < fs[n - 1]:
                for j in range(n):
                    sim[n, j] = xr[j]
                fs[n] = f_r
                continue
            accepted = 0
            if f_r < fs[n]:
                for j in range(n):
                    xc[j] = cen[j] + gam * (xr[j] - cen[j])
                f_c = _objective(&pr, &xc[0], &fr[0], &params[0], x1v, x2v, rv)
                nfev += 1
                if f_c <= f_r:
                    accepted = 1
            else:
                for j in range(n):
                    xc[j] = cen[j] + gam * (sim[n, j] - cen[j])
                f_c = _objective(&pr, &xc[0], &fr[0], &params[0], x1v, x2v, rv)
                nfev += 1
                if f_c < fs[n]:
                    accepted = 1
            if accepted:
                for j in range(n):
                    sim[n, j] = xc[j]
                fs[n] = f_c
                continue
            for i in range(1, n + 1):
                for j in range(n):
                    sim[i, j] = sim[0, j] + sig * (sim[i, j] - sim[0, j])
                fs[i] = _objective(&pr, &sim[i, 0], &fr[0], &params[0], x1v, x2v, rv)
                nfev += 1

    return np.asarray(sim[0]).copy(), float(fs[0]), int(it), int(nfev), reason
