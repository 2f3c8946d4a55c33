"""The three projection operators onto convex sets in l^p.

metric_project minimizes ||x - xi||_p^2 (nearest point in the space's own
norm); generalized_project minimizes the Lyapunov functional v2(x, .) for
a primal argument; generalized_project_dual minimizes v4(phi, .) for a
dual argument.  All three coincide with the Euclidean nearest point at
p = 2.  The inner solver is Euclidean projected gradient with Armijo
backtracking, warm-started at the Euclidean projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lyapunov
from ._backend import kernels
from .sets import ConvexSet
from .space import SpaceContext, duality_map, duality_map_star, dual_norm, norm, pairing

__all__ = [
    "FixedStep",
    "Backtracking",
    "InnerSolverConfig",
    "ProjectionResult",
    "metric_project",
    "generalized_project",
    "generalized_project_dual",
    "composition_identity_residual",
    "characterization_residuals",
]


@dataclass(frozen=True)
class FixedStep:
    eta: float


@dataclass(frozen=True)
class Backtracking:
    beta: float = 0.5
    c: float = 1e-4


@dataclass(frozen=True)
class InnerSolverConfig:
    tol: float = 1e-9
    max_iter: int = 100_000
    step_rule: FixedStep | Backtracking = field(default_factory=Backtracking)

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def _kernel_args(self):
        if isinstance(self.step_rule, FixedStep):
            return True, self.step_rule.eta, 0.5, 1e-4
        return False, 0.0, self.step_rule.beta, self.step_rule.c


DEFAULT_CONFIG = InnerSolverConfig()


# ---------------------------------------------------------------------------
# Newton polish on the identified active set.
#
# The Armijo loop certifies descent through objective differences, which
# caps attainable point accuracy near sqrt(eps); the slack-style contracts
# need ~1e-10 points.  After the kernel loop we refine by Newton on the
# stationarity equations restricted to the active geometry (no objective
# comparisons involved), and keep the result only when feasible and the
# stationarity residual actually improves.


def _dj_unit(ctx, v):
    """Derivative of the normalized duality map at v (0-homogeneous form);
    None at points where it is singular or undefined."""
    v = np.asarray(v, dtype=float)
    nv = norm(ctx, v)
    if nv == 0.0:
        return None
    p = ctx.p
    w = v / nv
    if p < 2.0 and np.any(np.abs(w) < 1e-9):
        return None
    u = np.sign(w) * np.abs(w) ** (p - 1.0)
    return (2.0 - p) * np.outer(u, u) + (p - 1.0) * np.diag(np.abs(w) ** (p - 2.0))


def _stationarity(ctx, set_, point, g):
    r = point - set_.project_euclid(point - g)
    return float(np.sqrt(r @ r))


def _newton_refine(ctx, set_, point, g_fn, dg_fn, pins, constraint, steps=6):
    n = point.size
    free = np.ones(n, dtype=bool)
    xi = point.copy()
    for i, val in pins:
        free[i] = False
        xi[i] = val
    nf = int(free.sum())
    if nf == 0:
        return xi
    mu = 0.0
    if constraint is not None:
        ckind = constraint[0]
        if ckind == "lin":
            a_full = constraint[1]
        # initial multiplier: least-squares fit of G + mu a = 0 on free coords
    for _ in range(steps):
        g = g_fn(xi)
        dg = dg_fn(xi)
        if dg is None:
            return None
        if constraint is None:
            rhs = -g[free]
            mat = dg[np.ix_(free, free)]
            try:
                step = np.linalg.solve(mat, rhs)
            except np.linalg.LinAlgError:
                return None
            xi[free] += step
        else:
            if constraint[0] == "lin":
                a = a_full
                cval = float(a @ xi) - constraint[2]
                da = np.zeros((n, n))
            else:  # ball
                c, r = constraint[1], constraint[2]
                a = xi - c
                cval = 0.5 * (float(a @ a) - r * r)
                da = mu * np.eye(n)
            af = a[free]
            if mu == 0.0 and constraint[0] == "lin":
                denom = float(af @ af)
                if denom > 0.0:
                    mu = -float(af @ g[free]) / denom
            kkt_mat = np.zeros((nf + 1, nf + 1))
            kkt_mat[:nf, :nf] = dg[np.ix_(free, free)] + da[np.ix_(free, free)]
            kkt_mat[:nf, nf] = af
            kkt_mat[nf, :nf] = af
            rhs = np.empty(nf + 1)
            rhs[:nf] = -(g[free] + mu * af)
            rhs[nf] = -cval
            try:
                sol = np.linalg.solve(kkt_mat, rhs)
            except np.linalg.LinAlgError:
                return None
            xi[free] += sol[:nf]
            mu += sol[nf]
        if not np.all(np.isfinite(xi)):
            return None
    return xi


def _active_geometry(set_, xi, scale):
    """(pins, constraint) describing the face of the set that xi sits on;
    None when the variant has no refinement recipe."""
    from .sets import Ball2, Box, Halfspace, Hyperplane, Simplex

    tol = 1e-6 * (1.0 + scale)
    if isinstance(set_, Halfspace):
        if float(set_.a @ xi) < set_.b - tol:
            return [], None
        return [], ("lin", set_.a, set_.b)
    if isinstance(set_, Hyperplane):
        return [], ("lin", set_.a, set_.b)
    if isinstance(set_, Box):
        pins = []
        for i in range(xi.size):
            if xi[i] <= set_.lo[i] + tol:
                pins.append((i, float(set_.lo[i])))
            elif xi[i] >= set_.hi[i] - tol:
                pins.append((i, float(set_.hi[i])))
        return pins, None
    if isinstance(set_, Ball2):
        d = xi - set_.center
        if float(np.sqrt(d @ d)) < set_.radius - tol:
            return [], None
        return [], ("ball", set_.center, set_.radius)
    if isinstance(set_, Simplex):
        pins = [(i, 0.0) for i in range(xi.size) if xi[i] <= tol]
        ones = np.ones(xi.size)
        return pins, ("lin", ones, set_.scale)
    return None


def _polish(ctx, set_, point, kkt, g_fn, dg_fn):
    """Return (better_point, new_kkt) or None if no improvement found."""
    if kkt == 0.0:
        return None
    scale = float(np.max(np.abs(point))) if point.size else 0.0
    geom = _active_geometry(set_, point, scale)
    if geom is None:
        return None
    pins, constraint = geom
    cand = _newton_refine(ctx, set_, point.copy(), g_fn, dg_fn, pins, constraint)
    if cand is None:
        return None
    cand = set_.project_euclid(cand)  # snap back within rounding, keep feasible
    new_kkt = _stationarity(ctx, set_, cand, g_fn(cand))
    if new_kkt < kkt:
        return cand, new_kkt
    return None


def _polish_dual_quadratic(ctx, set_, phi, point, kkt):
    def g_fn(xi):
        return 2.0 * (duality_map(ctx, xi) - phi)

    def dg_fn(xi):
        d = _dj_unit(ctx, xi)
        return None if d is None else 2.0 * d

    return _polish(ctx, set_, point, kkt, g_fn, dg_fn)


def _polish_metric(ctx, set_, x, point, kkt):
    def g_fn(xi):
        return 2.0 * duality_map(ctx, xi - x)

    def dg_fn(xi):
        d = _dj_unit(ctx, xi - x)
        return None if d is None else 2.0 * d

    return _polish(ctx, set_, point, kkt, g_fn, dg_fn)


_STATUS_NAMES = {0: "tol", 1: "floor", 2: "max_iter"}


@dataclass
class ProjectionResult:
    """Output of one inner minimization.

    status "tol" means the projected-gradient mapping reached the
    configured tolerance; "floor" means no float-representable descent
    step remained (the point is at working precision, the stationarity
    measure saturates near sqrt(eps) for boundary-active solutions);
    "max_iter" is the only failure state.
    """

    point: np.ndarray
    objective: float
    inner_iterations: int
    kkt_residual: float
    status: str

    @property
    def converged(self) -> bool:
        return self.status != "max_iter"


def _run_dual_quadratic(ctx, set_, phi, const, cfg):
    kind, sv1, sv2, s1, s2 = set_.kernel_encoding()
    xi0 = set_.project_euclid(duality_map_star(ctx, phi))
    use_fixed, eta, beta, c = cfg._kernel_args()
    point, fval, iters, kkt, status = kernels.minimize_dual_quadratic(
        np.asarray(phi, dtype=float), const, ctx.p, kind, sv1, sv2, s1, s2,
        xi0, cfg.tol, cfg.max_iter, use_fixed, eta, beta, c)
    if kkt > 1e-13:
        imp = _polish_dual_quadratic(ctx, set_, np.asarray(phi, dtype=float), point, kkt)
        if imp is not None:
            point, kkt = imp
    name = "tol" if kkt <= cfg.tol else _STATUS_NAMES[status]
    return point, fval, iters, kkt, name


def metric_project(ctx: SpaceContext, set_: ConvexSet, x,
                   cfg: InnerSolverConfig = DEFAULT_CONFIG) -> ProjectionResult:
    """Nearest point of the set in the p-norm."""
    x = np.asarray(x, dtype=float)
    kind, sv1, sv2, s1, s2 = set_.kernel_encoding()
    xi0 = set_.project_euclid(x)
    use_fixed, eta, beta, c = cfg._kernel_args()
    point, fval, iters, kkt, status = kernels.minimize_metric(
        x, ctx.p, kind, sv1, sv2, s1, s2, xi0, cfg.tol, cfg.max_iter,
        use_fixed, eta, beta, c)
    if kkt > 1e-13:
        imp = _polish_metric(ctx, set_, x, point, kkt)
        if imp is not None:
            point, kkt = imp
    name = "tol" if kkt <= cfg.tol else _STATUS_NAMES[status]
    return ProjectionResult(point, norm(ctx, x - point) ** 2, iters, kkt, name)


def generalized_project(ctx: SpaceContext, set_: ConvexSet, x,
                        cfg: InnerSolverConfig = DEFAULT_CONFIG) -> ProjectionResult:
    """Minimizer of v2(x, .) over the set (primal-argument generalized projection)."""
    x = np.asarray(x, dtype=float)
    phi = duality_map(ctx, x)
    point, _, iters, kkt, status = _run_dual_quadratic(ctx, set_, phi, norm(ctx, x) ** 2, cfg)
    return ProjectionResult(point, lyapunov.v2(ctx, x, point), iters, kkt, status)


def generalized_project_dual(ctx: SpaceContext, set_: ConvexSet, phi,
                             cfg: InnerSolverConfig = DEFAULT_CONFIG) -> ProjectionResult:
    """Minimizer of v4(phi, .) over the set (dual-argument generalized projection)."""
    phi = np.asarray(phi, dtype=float)
    point, _, iters, kkt, status = _run_dual_quadratic(
        ctx, set_, phi, dual_norm(ctx, phi) ** 2, cfg)
    return ProjectionResult(point, lyapunov.v4(ctx, phi, point), iters, kkt, status)


def composition_identity_residual(ctx: SpaceContext, set_: ConvexSet, x,
                                  cfg: InnerSolverConfig = DEFAULT_CONFIG) -> float:
    """|| generalized_project(x) - generalized_project_dual(Jx) ||_p.

    The two operators are related by composition with the duality map, so
    the residual measures inner-solver agreement only.
    """
    a = generalized_project(ctx, set_, x, cfg).point
    b = generalized_project_dual(ctx, set_, duality_map(ctx, x), cfg).point
    return norm(ctx, a - b)


def characterization_residuals(ctx: SpaceContext, set_: ConvexSet, x, samples,
                               cfg: InnerSolverConfig = DEFAULT_CONFIG) -> dict:
    """Minimum slack, over the sample points, of each variational inequality
    characterizing the three projections of x (phi = Jx for the dual one).

    Keys: c5, e5_strong (metric); c7, d7, e7 (generalized);
    c8, d8, e8 (dual-argument).  All are >= 0 for exact projections.
    """
    x = np.asarray(x, dtype=float)
    samples = np.asarray(samples, dtype=float)
    phi = duality_map(ctx, x)

    xbar = metric_project(ctx, set_, x, cfg).point
    xhat = generalized_project(ctx, set_, x, cfg).point
    xtil = generalized_project_dual(ctx, set_, phi, cfg).point

    j_res = duality_map(ctx, x - xbar)
    j_hat = duality_map(ctx, xhat)
    j_til = duality_map(ctx, xtil)
    j_samples = duality_map(ctx, samples)

    def min_over(vals):
        return float(np.min(vals))

    out = {
        # <J(x - xbar), xbar - xi> >= 0
        "c5": min_over((xbar - samples) @ j_res),
        # <J(x - xbar), x - xi> >= ||x - xbar||^2
        "e5_strong": min_over((x - samples) @ j_res - norm(ctx, x - xbar) ** 2),
        # <Jx - Jxhat, xhat - xi> >= 0
        "c7": min_over((xhat - samples) @ (phi - j_hat)),
        # <Jx - Jxi, xhat - xi> >= 0
        "d7": min_over(np.sum((phi - j_samples) * (xhat - samples), axis=-1)),
        # <Jx - Jxhat, x - xi> >= 0
        "e7": min_over((x - samples) @ (phi - j_hat)),
        # <phi - J xtil, xtil - xi> >= 0
        "c8": min_over((xtil - samples) @ (phi - j_til)),
        # <phi - J xi, xtil - xi> >= 0
        "d8": min_over(np.sum((phi - j_samples) * (xtil - samples), axis=-1)),
        # <J x - J xtil, x - xi> >= 0 for xtil = dual projection of Jx
        "e8": min_over((x - samples) @ (phi - j_til)),
    }
    return out
