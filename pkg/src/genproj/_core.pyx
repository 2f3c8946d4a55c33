# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the projection inner loops.

Twin of genproj._purepy (same algorithms, same kernel API); see that
module for the set encoding and the numerical notes on compensated
Armijo differences and the precision-floor exit.
"""

import numpy as np

from libc.math cimport fabs, pow, sqrt, log1p, expm1, copysign

NAME = "compiled"

DEF STALL_ETA = 1e-20

cdef int STATUS_TOL = 0
cdef int STATUS_FLOOR = 1
cdef int STATUS_MAXITER = 2


cdef double _powsum(double[::1] v, double p) noexcept:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        s += pow(fabs(v[i]), p)
    return s


cdef void _jmap_into(double[::1] v, double p, double[::1] out) noexcept:
    cdef double nv = pow(_powsum(v, p), 1.0 / p)
    cdef Py_ssize_t i
    cdef double w
    if nv == 0.0:
        for i in range(v.shape[0]):
            out[i] = 0.0
        return
    for i in range(v.shape[0]):
        w = v[i] / nv
        if w == 0.0:
            out[i] = 0.0
        else:
            out[i] = nv * copysign(pow(fabs(w), p - 1.0), w)


cdef void _proj(int kind, double[::1] sv1, double[::1] sv2, double s1, double s2,
                double[::1] z, double[::1] out, double[::1] work) noexcept:
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc, na2, viol, dist, tau, key
    if kind == 0:  # halfspace
        acc = 0.0
        na2 = 0.0
        for i in range(n):
            acc += sv1[i] * z[i]
            na2 += sv1[i] * sv1[i]
        viol = acc - s1
        if viol <= 0.0:
            for i in range(n):
                out[i] = z[i]
        else:
            for i in range(n):
                out[i] = z[i] - (viol / na2) * sv1[i]
    elif kind == 1:  # hyperplane
        acc = 0.0
        na2 = 0.0
        for i in range(n):
            acc += sv1[i] * z[i]
            na2 += sv1[i] * sv1[i]
        viol = acc - s1
        for i in range(n):
            out[i] = z[i] - (viol / na2) * sv1[i]
    elif kind == 2:  # box
        for i in range(n):
            out[i] = z[i]
            if out[i] < sv1[i]:
                out[i] = sv1[i]
            if out[i] > sv2[i]:
                out[i] = sv2[i]
    elif kind == 3:  # ball2
        dist = 0.0
        for i in range(n):
            work[i] = z[i] - sv1[i]
            dist += work[i] * work[i]
        dist = sqrt(dist)
        if dist <= s1:
            for i in range(n):
                out[i] = z[i]
        else:
            for i in range(n):
                out[i] = sv1[i] + (s1 / dist) * work[i]
    else:  # simplex: sort descending (insertion sort, n is small)
        for i in range(n):
            work[i] = z[i]
        for i in range(1, n):
            key = work[i]
            j = i - 1
            while j >= 0 and work[j] < key:
                work[j + 1] = work[j]
                j -= 1
            work[j + 1] = key
        acc = 0.0
        tau = 0.0
        k = 0
        for i in range(n):
            acc += work[i]
            if work[i] - (acc - s1) / (i + 1.0) > 0.0:
                tau = (acc - s1) / (i + 1.0)
                k = i
        for i in range(n):
            out[i] = z[i] - tau
            if out[i] < 0.0:
                out[i] = 0.0


cdef double _powsum_delta_pair(double b, double m, double p) noexcept:
    if m == b:
        return 0.0
    if b == 0.0:
        return pow(m, p)
    if m == 0.0:
        return -pow(b, p)
    return pow(b, p) * expm1(p * log1p((m - b) / b))


cdef double _sq_norm_delta(double s_old, double ds, double p) noexcept:
    cdef double r, s_new
    if s_old <= 0.0:
        s_new = s_old + ds
        if s_new < 0.0:
            s_new = 0.0
        return pow(s_new, 2.0 / p)
    r = ds / s_old
    if r <= -0.5 or r >= 0.5:
        s_new = s_old + ds
        if s_new < 0.0:
            s_new = 0.0
        return pow(s_new, 2.0 / p) - pow(s_old, 2.0 / p)
    return pow(s_old, 2.0 / p) * expm1((2.0 / p) * log1p(r))


cdef double _delta_obj(int obj_kind, double[::1] anchor, double p,
                       double[::1] xi, double[::1] xin) noexcept:
    # objective increment f(xin) - f(xi) in compensated form
    cdef Py_ssize_t i, n = xi.shape[0]
    cdef double ds = 0.0, s_old = 0.0, lin = 0.0
    if obj_kind == 0:  # ||xi||_p^2 - 2<phi, xi>
        for i in range(n):
            ds += _powsum_delta_pair(fabs(xi[i]), fabs(xin[i]), p)
            s_old += pow(fabs(xi[i]), p)
            lin += anchor[i] * (xin[i] - xi[i])
        return _sq_norm_delta(s_old, ds, p) - 2.0 * lin
    else:  # ||x - xi||_p^2
        for i in range(n):
            ds += _powsum_delta_pair(fabs(anchor[i] - xi[i]), fabs(anchor[i] - xin[i]), p)
            s_old += pow(fabs(anchor[i] - xi[i]), p)
        return _sq_norm_delta(s_old, ds, p)


cdef void _grad_obj(int obj_kind, double[::1] anchor, double p,
                    double[::1] xi, double[::1] g, double[::1] work) noexcept:
    cdef Py_ssize_t i, n = xi.shape[0]
    if obj_kind == 0:
        _jmap_into(xi, p, g)
        for i in range(n):
            g[i] = 2.0 * (g[i] - anchor[i])
    else:
        for i in range(n):
            work[i] = xi[i] - anchor[i]
        _jmap_into(work, p, g)
        for i in range(n):
            g[i] = 2.0 * g[i]


def _minimize(int obj_kind, double[::1] anchor, double p, int kind,
              double[::1] sv1, double[::1] sv2, double s1, double s2,
              double[::1] xi0, double tol, long max_iter,
              bint use_fixed, double eta_fixed, double beta, double armijo_c):
    cdef Py_ssize_t n = anchor.shape[0]
    xi_arr = np.empty(n)
    cdef double[::1] xi = xi_arr
    cdef double[::1] g = np.empty(n)
    cdef double[::1] xin = np.empty(n)
    cdef double[::1] tmp = np.empty(n)
    cdef double[::1] pr = np.empty(n)
    cdef double[::1] work = np.empty(n)
    cdef double[::1] xi_prev = np.empty(n)
    cdef double[::1] g_prev = np.empty(n)

    cdef double eta = 1.0, kkt = 0.0, sy, yy, s_, y_, gd, d, delta, acc
    cdef bint have_prev = False, moved, accepted
    cdef long iters = 0, it
    cdef int status = STATUS_MAXITER
    cdef Py_ssize_t i

    _proj(kind, sv1, sv2, s1, s2, xi0, xi, work)
    for it in range(max_iter):
        _grad_obj(obj_kind, anchor, p, xi, g, work)
        for i in range(n):
            tmp[i] = xi[i] - g[i]
        _proj(kind, sv1, sv2, s1, s2, tmp, pr, work)
        acc = 0.0
        for i in range(n):
            acc += (xi[i] - pr[i]) * (xi[i] - pr[i])
        kkt = sqrt(acc)
        if kkt <= tol:
            status = STATUS_TOL
            break
        if use_fixed:
            for i in range(n):
                tmp[i] = xi[i] - eta_fixed * g[i]
            _proj(kind, sv1, sv2, s1, s2, tmp, xin, work)
            moved = False
            for i in range(n):
                if xin[i] != xi[i]:
                    moved = True
                    break
            if not moved:
                status = STATUS_FLOOR
                break
        else:
            if have_prev:
                sy = 0.0
                yy = 0.0
                for i in range(n):
                    s_ = xi[i] - xi_prev[i]
                    y_ = g[i] - g_prev[i]
                    sy += s_ * y_
                    yy += y_ * y_
                if sy > 0.0 and yy > 0.0:
                    eta = sy / yy
                else:
                    eta = eta * 2.0
            else:
                eta = eta * 2.0
            if eta < 1e-15:
                eta = 1e-15
            if eta > 1e12:
                eta = 1e12
            accepted = False
            while eta >= STALL_ETA:
                for i in range(n):
                    tmp[i] = xi[i] - eta * g[i]
                _proj(kind, sv1, sv2, s1, s2, tmp, xin, work)
                moved = False
                gd = 0.0
                for i in range(n):
                    d = xin[i] - xi[i]
                    gd += g[i] * d
                    if d != 0.0:
                        moved = True
                if not moved:
                    break
                delta = _delta_obj(obj_kind, anchor, p, xi, xin)
                if delta <= armijo_c * gd:
                    accepted = True
                    break
                eta *= beta
            if not accepted:
                status = STATUS_FLOOR
                break
            for i in range(n):
                xi_prev[i] = xi[i]
                g_prev[i] = g[i]
            have_prev = True
        for i in range(n):
            xi[i] = xin[i]
        iters += 1

    _grad_obj(obj_kind, anchor, p, xi, g, work)
    for i in range(n):
        tmp[i] = xi[i] - g[i]
    _proj(kind, sv1, sv2, s1, s2, tmp, pr, work)
    acc = 0.0
    for i in range(n):
        acc += (xi[i] - pr[i]) * (xi[i] - pr[i])
    kkt = sqrt(acc)
    if kkt <= tol:
        status = STATUS_TOL
    return xi_arr, iters, kkt, status


def proj_set(int kind, sv1, sv2, double s1, double s2, x):
    """Exact Euclidean projection onto the encoded set."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] a1 = np.ascontiguousarray(sv1, dtype=np.float64)
    cdef double[::1] a2 = np.ascontiguousarray(sv2, dtype=np.float64)
    out_arr = np.empty(xv.shape[0])
    cdef double[::1] out = out_arr
    cdef double[::1] work = np.empty(xv.shape[0])
    _proj(kind, a1, a2, s1, s2, xv, out, work)
    return out_arr


def minimize_dual_quadratic(phi, double const, double p, int kind, sv1, sv2,
                            double s1, double s2, xi0, double tol, long max_iter,
                            bint use_fixed, double eta_fixed, double beta,
                            double armijo_c):
    """Minimize ||xi||_p^2 - 2<phi, xi> + const over the encoded set.

    Returns (point, objective, iterations, kkt_residual, status) with
    status 0 = tol reached, 1 = precision floor, 2 = max_iter.
    """
    phi_arr = np.ascontiguousarray(phi, dtype=np.float64)
    xi, iters, kkt, status = _minimize(
        0, phi_arr, p, kind,
        np.ascontiguousarray(sv1, dtype=np.float64),
        np.ascontiguousarray(sv2, dtype=np.float64), s1, s2,
        np.ascontiguousarray(xi0, dtype=np.float64), tol, max_iter,
        use_fixed, eta_fixed, beta, armijo_c)
    fval = float(np.sum(np.abs(xi) ** p) ** (2.0 / p)) - 2.0 * float(phi_arr @ xi) + const
    return xi, fval, iters, kkt, status


def minimize_metric(x, double p, int kind, sv1, sv2, double s1, double s2,
                    xi0, double tol, long max_iter, bint use_fixed,
                    double eta_fixed, double beta, double armijo_c):
    """Minimize ||x - xi||_p^2 over the encoded set; same return layout."""
    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    xi, iters, kkt, status = _minimize(
        1, x_arr, p, kind,
        np.ascontiguousarray(sv1, dtype=np.float64),
        np.ascontiguousarray(sv2, dtype=np.float64), s1, s2,
        np.ascontiguousarray(xi0, dtype=np.float64), tol, max_iter,
        use_fixed, eta_fixed, beta, armijo_c)
    fval = float(np.sum(np.abs(x_arr - np.asarray(xi)) ** p) ** (2.0 / p))
    return xi, fval, iters, kkt, status
