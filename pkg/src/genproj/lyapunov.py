"""Lyapunov functionals on l^p: squared distance and its primal-dual analogues.

v1 is the Hilbert squared distance; v2 mixes the duality image Jx of a
primal point with a primal target; v4 is the same functional with a free
dual first argument; v3 is the gauge-map variant built on ||.||^p / p.
All four are nonnegative, vanish only at coincidence, and collapse to the
squared distance (up to a constant) at p = 2.
"""

from __future__ import annotations

import numpy as np

from .space import (
    SpaceContext,
    duality_map,
    dual_norm,
    gauge_duality_map,
    modulus_estimates,
    norm,
    pairing,
)

__all__ = [
    "v1",
    "v2",
    "v2_grad_xi",
    "v3",
    "v4",
    "v4_grad_xi",
    "v2_bounds",
]


def v1(ctx: SpaceContext, x, xi):
    """Squared distance ||x - xi||^2; defined only at p = 2."""
    if ctx.p != 2.0:
        raise ValueError(f"v1 is the Hilbert-case functional; requires p = 2, got p = {ctx.p}")
    d = norm(ctx, np.asarray(x, dtype=float) - np.asarray(xi, dtype=float))
    return d * d


def _dual_quadratic(nphi, ip, nxi):
    # ||phi||_q^2 - 2<phi,xi> + ||xi||^2 rewritten as a sum of two
    # nonnegative terms; the naive form cancels catastrophically near
    # coincidence.  Batch-aware: scalar or array arguments.
    gap = np.maximum(nphi * nxi - ip, 0.0)
    val = (nphi - nxi) ** 2 + 2.0 * gap
    return float(val) if np.ndim(val) == 0 else val


def v2(ctx: SpaceContext, x, xi):
    """||Jx||_q^2 - 2 <Jx, xi> + ||xi||^2 (equivalently with ||x||^2 up front).

    Nonnegative; zero iff x = xi.  Batch-aware on the leading axes.
    """
    phi = duality_map(ctx, x)
    return _dual_quadratic(dual_norm(ctx, phi), pairing(phi, xi), norm(ctx, xi))


def v2_grad_xi(ctx: SpaceContext, x, xi) -> np.ndarray:
    """Gradient of v2 in its second argument: 2 (J xi - J x)."""
    return 2.0 * (duality_map(ctx, xi) - duality_map(ctx, x))


def v3(ctx: SpaceContext, x, xi):
    """q^-1 ||Jmu x||_q^q - <Jmu x, xi> + p^-1 ||xi||^p with the gauge map Jmu.

    Coincides with v2 / 2 at p = 2.
    """
    mu = gauge_duality_map(ctx, x)
    val = (
        dual_norm(ctx, mu) ** ctx.q / ctx.q
        - pairing(mu, xi)
        + norm(ctx, xi) ** ctx.p / ctx.p
    )
    scale = np.maximum(1.0, norm(ctx, x) ** ctx.p + norm(ctx, xi) ** ctx.p)
    out = np.where((val < 0.0) & (val > -1e-10 * scale), 0.0, val)
    return float(out) if np.ndim(out) == 0 else out


def v4(ctx: SpaceContext, phi, xi):
    """||phi||_q^2 - 2 <phi, xi> + ||xi||^2 for a free dual argument phi."""
    phi = np.asarray(phi, dtype=float)
    return _dual_quadratic(dual_norm(ctx, phi), pairing(phi, xi), norm(ctx, xi))


def v4_grad_xi(ctx: SpaceContext, phi, xi) -> np.ndarray:
    """Gradient of v4 in xi: 2 (J xi - phi)."""
    return 2.0 * (duality_map(ctx, xi) - np.asarray(phi, dtype=float))


def v2_bounds(ctx: SpaceContext, x, xi) -> tuple[float, float]:
    """Sandwich bounds for v2: norm bracket and modulus-of-convexity floor.

    Lower bound is the larger of (||x|| - ||xi||)^2 and
    L^-1 delta(||x - xi|| / C) with C = 2 max{1, sqrt((||x||^2 + ||xi||^2)/2)};
    upper bound is (||x|| + ||xi||)^2.
    """
    nx = norm(ctx, x)
    nxi = norm(ctx, xi)
    mod = modulus_estimates(ctx)
    c = 2.0 * max(1.0, np.sqrt((nx * nx + nxi * nxi) / 2.0))
    d = norm(ctx, np.asarray(x, dtype=float) - np.asarray(xi, dtype=float))
    lower = max((nx - nxi) ** 2, mod.delta_lower(d / c) / mod.figiel_L)
    upper = (nx + nxi) ** 2
    return lower, upper
