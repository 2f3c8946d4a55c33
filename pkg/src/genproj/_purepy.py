"""Pure-numpy kernels for the projection inner loops.

Mirror of the compiled extension module (genproj._core); selected as a
fallback at import time by genproj._backend.  Sets are passed in the flat
kernel encoding (kind, vec1, vec2, scalar1, scalar2):

    0 halfspace   {xi : <vec1, xi> <= scalar1}
    1 hyperplane  {xi : <vec1, xi> == scalar1}
    2 box         [vec1, vec2] componentwise
    3 ball2       Euclidean ball, center vec1 radius scalar1
    4 simplex     {xi >= 0, sum xi = scalar1}

The Armijo test evaluates objective *differences* in compensated form
(power-sum increments through expm1/log1p); direct evaluation hits the
float noise floor at gradient norms around 1e-7, far above the 1e-9
stationarity target.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"

_STALL_ETA = 1e-20


def _pnorm(v, p):
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


def _jmap(v, p):
    nv = _pnorm(v, p)
    if nv == 0.0:
        return np.zeros_like(v)
    w = v / nv
    return nv * np.sign(w) * np.abs(w) ** (p - 1.0)


def proj_set(kind, sv1, sv2, s1, s2, x):
    """Exact Euclidean projection onto the encoded set."""
    x = np.asarray(x, dtype=float)
    if kind == 0:  # halfspace
        viol = float(sv1 @ x) - s1
        if viol <= 0.0:
            return x.copy()
        return x - (viol / float(sv1 @ sv1)) * sv1
    if kind == 1:  # hyperplane
        res = float(sv1 @ x) - s1
        return x - (res / float(sv1 @ sv1)) * sv1
    if kind == 2:  # box
        return np.clip(x, sv1, sv2)
    if kind == 3:  # ball2
        d = x - sv1
        dist = float(np.sqrt(d @ d))
        if dist <= s1:
            return x.copy()
        return sv1 + (s1 / dist) * d
    if kind == 4:  # simplex, sort-and-threshold
        u = np.sort(x)[::-1]
        css = np.cumsum(u) - s1
        ks = np.arange(1, x.size + 1)
        idx = np.nonzero(u - css / ks > 0.0)[0][-1]
        tau = css[idx] / (idx + 1.0)
        return np.maximum(x - tau, 0.0)
    raise ValueError(f"unknown set kind {kind}")


def _powsum_delta(v_old, v_new, p):
    # sum(|v_new|^p) - sum(|v_old|^p) without forming the two large sums;
    # m - b is exact for nearby floats, so each term carries error relative
    # to the increment rather than to the term itself
    out = 0.0
    for b, m in zip(np.abs(v_old), np.abs(v_new)):
        if m == b:
            continue
        if b == 0.0:
            out += m ** p
        elif m == 0.0:
            out -= b ** p
        else:
            out += b ** p * math.expm1(p * math.log1p((m - b) / b))
    return out


def _sq_norm_delta(s_old, ds, p):
    # s^(2/p) increment given the power-sum increment ds
    if s_old <= 0.0:
        return max(s_old + ds, 0.0) ** (2.0 / p)
    r = ds / s_old
    if r <= -0.5 or r >= 0.5:
        return max(s_old + ds, 0.0) ** (2.0 / p) - s_old ** (2.0 / p)
    return s_old ** (2.0 / p) * math.expm1((2.0 / p) * math.log1p(r))


STATUS_TOL = 0      # projected-gradient mapping below tol
STATUS_FLOOR = 1    # no float-representable descent step left (precision floor)
STATUS_MAXITER = 2  # iteration budget exhausted


def _descend(delta_fun, grad, kind, sv1, sv2, s1, s2, xi0, tol, max_iter,
             use_fixed, eta_fixed, beta, armijo_c):
    # Projected gradient with Armijo backtracking (or a fixed step).
    # Stationarity measure: unit-step projected-gradient mapping
    # ||xi - P(xi - grad)||_2.  For boundary-active minimizers the mapping
    # saturates around sqrt(eps)*scale while the point itself is already
    # eps-accurate; that exit is reported as STATUS_FLOOR, not a failure.
    xi = proj_set(kind, sv1, sv2, s1, s2, np.asarray(xi0, dtype=float))
    eta = 1.0
    iters = 0
    xi_prev = None
    g_prev = None
    status = STATUS_MAXITER
    for _ in range(max_iter):
        g = grad(xi)
        r = xi - proj_set(kind, sv1, sv2, s1, s2, xi - g)
        if float(np.sqrt(r @ r)) <= tol:
            status = STATUS_TOL
            break
        if use_fixed:
            xin = proj_set(kind, sv1, sv2, s1, s2, xi - eta_fixed * g)
            if not np.any(xin - xi):
                status = STATUS_FLOOR
                break
        else:
            # Barzilai-Borwein trial step (tracks local curvature), then
            # Armijo backtracking from it
            if xi_prev is not None:
                s = xi - xi_prev
                y = g - g_prev
                sy = float(s @ y)
                yy = float(y @ y)
                eta = sy / yy if sy > 0.0 and yy > 0.0 else eta * 2.0
            else:
                eta *= 2.0
            eta = min(max(eta, 1e-15), 1e12)
            accepted = False
            while eta >= _STALL_ETA:
                xin = proj_set(kind, sv1, sv2, s1, s2, xi - eta * g)
                d = xin - xi
                if not np.any(d):
                    break
                if delta_fun(xi, xin) <= armijo_c * float(g @ d):
                    accepted = True
                    break
                eta *= beta
            if not accepted:
                status = STATUS_FLOOR
                break
            xi_prev = xi
            g_prev = g
        xi = xin
        iters += 1
    g = grad(xi)
    r = xi - proj_set(kind, sv1, sv2, s1, s2, xi - g)
    kkt = float(np.sqrt(r @ r))
    if kkt <= tol:
        status = STATUS_TOL
    return xi, iters, kkt, status


def minimize_dual_quadratic(phi, const, p, kind, sv1, sv2, s1, s2, xi0, tol,
                            max_iter, use_fixed, eta_fixed, beta, armijo_c):
    """Minimize ||xi||_p^2 - 2<phi, xi> + const over the encoded set.

    Returns (point, objective, iterations, kkt_residual, status) with
    status 0 = tol reached, 1 = precision floor, 2 = max_iter.
    """
    phi = np.asarray(phi, dtype=float)

    def delta_fun(xi, xin):
        ds = _powsum_delta(xi, xin, p)
        s_old = float(np.sum(np.abs(xi) ** p))
        return _sq_norm_delta(s_old, ds, p) - 2.0 * float(phi @ (xin - xi))

    def grad(xi):
        return 2.0 * (_jmap(xi, p) - phi)

    xi, iters, kkt, status = _descend(
        delta_fun, grad, kind, sv1, sv2, s1, s2, xi0, tol, max_iter,
        use_fixed, eta_fixed, beta, armijo_c)
    fval = _pnorm(xi, p) ** 2 - 2.0 * float(phi @ xi) + const
    return xi, fval, iters, kkt, status


def minimize_metric(x, p, kind, sv1, sv2, s1, s2, xi0, tol, max_iter,
                    use_fixed, eta_fixed, beta, armijo_c):
    """Minimize ||x - xi||_p^2 over the encoded set; same return layout."""
    x = np.asarray(x, dtype=float)

    def delta_fun(xi, xin):
        ds = _powsum_delta(x - xi, x - xin, p)
        s_old = float(np.sum(np.abs(x - xi) ** p))
        return _sq_norm_delta(s_old, ds, p)

    def grad(xi):
        return 2.0 * _jmap(xi - x, p)

    xi, iters, kkt, status = _descend(
        delta_fun, grad, kind, sv1, sv2, s1, s2, xi0, tol, max_iter,
        use_fixed, eta_fixed, beta, armijo_c)
    return xi, _pnorm(x - xi, p) ** 2, iters, kkt, status
