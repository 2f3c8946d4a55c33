"""Iterative methods built on the projection operators.

Successive (metric or generalized) projections for convex feasibility,
projection iterations for variational inequalities in l^p, their
normalized / Polyak nonsmooth variants, the unconstrained dual iteration,
and the Wiener-Hopf processes.  Every solver returns a Trace with
per-iteration records and terminal diagnostics.

The metric-mode variants carry no convergence contract; they exist for
side-by-side contrast with the generalized-mode variants and are never
used in acceptance gates.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import lyapunov
from .projections import (
    DEFAULT_CONFIG,
    InnerSolverConfig,
    ProjectionResult,
    generalized_project,
    generalized_project_dual,
    metric_project,
)
from .sets import ConvexSet
from .space import SpaceContext, duality_map, duality_map_star, dual_norm, norm

__all__ = [
    "AffineOperator",
    "SubgradientOperator",
    "SolverConfig",
    "Trace",
    "TraceRecord",
    "default_alpha",
    "successive_projections",
    "feasibility_diagnostics",
    "vi_solve_generalized",
    "vi_solve_metric",
    "vi_solve_nonsmooth",
    "unconstrained_solve",
    "wiener_hopf_solve",
    "sampled_vi_residual",
]

DIVERGENCE_LIMIT = 1e12


@dataclass
class AffineOperator:
    """A(x) = M x + c, mapping primal points to dual vectors.

    The symmetric part of M must be positive semidefinite, so that
    <Ax - Ay, x - y> >= 0.
    """

    M: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        m = self.monotonicity_constant()
        scale = max(1.0, float(np.abs(self.M).max()))
        if m < -1e-10 * scale:
            raise ValueError(f"symmetric part has negative eigenvalue {m:.3e}; operator not monotone")

    def __call__(self, x):
        return self.M @ x + self.c

    def monotonicity_constant(self) -> float:
        """Smallest eigenvalue of (M + M^T)/2."""
        return float(np.linalg.eigvalsh(0.5 * (self.M + self.M.T))[0])

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.M, 2))


@dataclass
class SubgradientOperator:
    """A(x) = a subgradient of a convex functional u at x.

    u_star (the constrained optimal value) enables the Polyak step rule.
    """

    fun: object
    grad: object
    u_star: float | None = None

    def __call__(self, x):
        return np.asarray(self.grad(x), dtype=float)


def default_alpha(A: AffineOperator) -> float:
    """Classical safe constant step m / L^2 for strongly monotone affine A."""
    m = A.monotonicity_constant()
    L = A.operator_norm()
    if m <= 0.0 or L <= 0.0:
        raise ValueError("default step requires a strongly monotone operator")
    return m / (L * L)


@dataclass(frozen=True)
class SolverConfig:
    alpha: float = 0.5
    schedule: str = "constant"  # or "diminishing": alpha_n = alpha / sqrt(n+1)
    max_iter: int = 10_000
    stop_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.schedule not in ("constant", "diminishing"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.max_iter < 1 or self.stop_tol <= 0.0:
            raise ValueError("max_iter >= 1 and stop_tol > 0 required")

    def step(self, n: int) -> float:
        if self.schedule == "constant":
            return self.alpha
        return self.alpha / np.sqrt(n + 1.0)


@dataclass
class TraceRecord:
    iteration: int
    step: float
    displacement: float
    point: np.ndarray
    v2_to_ref: float = float("nan")
    residual_fixed_point: float = float("nan")
    residual_vi: float = float("nan")
    residual_wh: float = float("nan")
    sweep: int = -1
    set_index: int = -1


_CSV_COLUMNS = ["iter", "step", "displacement", "v2_to_ref",
                "residual_fixed_point", "residual_vi", "residual_wh"]


@dataclass
class Trace:
    ctx: SpaceContext
    meta: dict
    records: list = field(default_factory=list)
    terminal: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    converged: bool = False

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    @property
    def final_point(self) -> np.ndarray:
        return self.records[-1].point

    def iterates(self) -> np.ndarray:
        return np.array([r.point for r in self.records])

    def _append(self, **kw):
        self.records.append(TraceRecord(**kw))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(_CSV_COLUMNS)
            for r in self.records:
                w.writerow([
                    r.iteration,
                    _fmt(r.step),
                    _fmt(r.displacement),
                    _fmt(r.v2_to_ref),
                    _fmt(r.residual_fixed_point),
                    _fmt(r.residual_vi),
                    _fmt(r.residual_wh),
                ])

    def to_json(self, path=None):
        doc = {
            "meta": self.meta,
            "converged": self.converged,
            "flags": self.flags,
            "terminal": self.terminal,
            "records": [
                {
                    "iter": r.iteration,
                    "step": _jsonval(r.step),
                    "displacement": _jsonval(r.displacement),
                    "v2_to_ref": _jsonval(r.v2_to_ref),
                    "residual_fixed_point": _jsonval(r.residual_fixed_point),
                    "residual_vi": _jsonval(r.residual_vi),
                    "residual_wh": _jsonval(r.residual_wh),
                    "sweep": r.sweep,
                    "set_index": r.set_index,
                    "point": list(r.point),
                }
                for r in self.records
            ],
        }
        if path is None:
            return doc
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.write("\n")
        return doc


def _fmt(v):
    return "" if v != v else repr(float(v))  # NaN -> empty CSV cell


def _jsonval(v):
    return None if v != v else float(v)


def _check_finite_iterate(x, trace) -> bool:
    nx = float(np.max(np.abs(x))) if x.size else 0.0
    if not np.isfinite(nx) or nx > DIVERGENCE_LIMIT:
        trace.flags.append("divergence")
        return False
    return True


def _note_inner(res: ProjectionResult, trace: Trace):
    if res.status == "max_iter":
        trace.flags.append("inner_max_iter")


# ---------------------------------------------------------------------------
# convex feasibility by successive projections


def successive_projections(ctx: SpaceContext, sets, x0, mode: str = "generalized",
                           cfg: SolverConfig = SolverConfig(),
                           inner: InnerSolverConfig = DEFAULT_CONFIG,
                           ref_point=None) -> Trace:
    """Sweep the set list with the chosen projection operator.

    One sweep applies the last set's projection first, so the composed
    operator matches the ordered-subiterate bookkeeping used by the
    feasibility diagnostics; every sub-projection is recorded.  Metric
    mode is informational (no convergence contract).
    """
    if mode not in ("metric", "generalized"):
        raise ValueError(f"unknown mode {mode!r}")
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one set")
    project = metric_project if mode == "metric" else generalized_project
    x = np.asarray(x0, dtype=float)
    ref = None if ref_point is None else np.asarray(ref_point, dtype=float)

    trace = Trace(ctx, {
        "task": "feasibility", "mode": mode, "n": ctx.n, "p": ctx.p,
        "num_sets": len(sets), "stop_tol": cfg.stop_tol, "max_iter": cfg.max_iter,
    })
    trace._append(iteration=0, step=float("nan"), displacement=float("nan"),
                  point=x.copy(), v2_to_ref=_v2ref(ctx, x, ref), sweep=-1, set_index=-1)

    k = 0
    for sweep in range(cfg.max_iter):
        x_start = x
        for j in range(len(sets) - 1, -1, -1):
            res = project(ctx, sets[j], x, inner)
            _note_inner(res, trace)
            k += 1
            disp = norm(ctx, res.point - x)
            x = res.point
            trace._append(iteration=k, step=float("nan"), displacement=disp,
                          point=x.copy(), v2_to_ref=_v2ref(ctx, x, ref),
                          sweep=sweep, set_index=j)
        if not _check_finite_iterate(x, trace):
            break
        sweep_disp = norm(ctx, x - x_start)
        if sweep_disp <= cfg.stop_tol:
            trace.converged = True
            break

    trace.terminal = {
        "sweeps": trace.records[-1].sweep + 1,
        "displacement": trace.records[-1].displacement,
        "membership": [sets[j]._distance(x) for j in range(len(sets))],
    }
    return trace


def _v2ref(ctx, x, ref):
    return float("nan") if ref is None else lyapunov.v2(ctx, x, ref)


def feasibility_diagnostics(trace: Trace, ref_point, tol: float = 1e-6,
                            step_slack: float = 1e-8) -> dict:
    """Decrease/summability/displacement diagnostics along the ordered
    sub-iterate sequence of a successive-projection run.

    For generalized mode these are contractual; for metric mode the report
    is informational (the monotone decrease can genuinely fail).
    """
    ctx = trace.ctx
    ref = np.asarray(ref_point, dtype=float)
    pts = trace.iterates()
    v2s = np.array([lyapunov.v2(ctx, x, ref) for x in pts])
    increments = np.diff(v2s)
    max_increase = float(increments.max()) if increments.size else 0.0

    cross = np.array([lyapunov.v2(ctx, pts[i], pts[i + 1]) for i in range(len(pts) - 1)])
    series_tail = float(cross[-1]) if cross.size else 0.0
    tail_sum = float(cross[-10:].sum()) if cross.size else 0.0

    final_disp = float(norm(ctx, pts[-1] - pts[-2])) if len(pts) > 1 else 0.0

    report = {
        "mode": trace.meta["mode"],
        "informational": trace.meta["mode"] == "metric",
        "v2_max_increase": max_increase,
        "v2_monotone": bool(max_increase <= step_slack),
        "series_last_term": series_tail,
        "series_tail_sum": tail_sum,
        "series_summable": bool(series_tail <= tol),
        "final_displacement": final_disp,
        "displacement_vanishes": bool(final_disp <= tol),
    }
    report["all_pass"] = bool(report["v2_monotone"] and report["series_summable"]
                              and report["displacement_vanishes"])
    return report


# ---------------------------------------------------------------------------
# variational inequalities


def sampled_vi_residual(ctx: SpaceContext, set_: ConvexSet, A, f, x, rng=None,
                        count: int = 1000) -> float:
    """min over sampled xi in the set of <Ax - f, xi - x>.

    Nonnegative (up to solver error) exactly when x solves the variational
    inequality.  Box sets contribute their corners, which attain the exact
    minimum of the linear form.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    g = np.asarray(A(x), dtype=float) - np.asarray(f, dtype=float)
    pts = set_.sample(rng, count)
    vals = (pts - x) @ g
    return float(np.min(vals))


def _vi_trace_shell(ctx, task, mode, cfg, extra=None):
    meta = {"task": task, "mode": mode, "n": ctx.n, "p": ctx.p,
            "alpha": cfg.alpha, "schedule": cfg.schedule,
            "stop_tol": cfg.stop_tol, "max_iter": cfg.max_iter}
    if extra:
        meta.update(extra)
    return Trace(ctx, meta)


def _run_projection_iteration(ctx, set_, A, f, x0, cfg, inner, trace, update, ref):
    """Common driver: x_{n+1} = update(x_n, alpha_n); stops on displacement."""
    f = np.asarray(f, dtype=float)
    x = np.asarray(x0, dtype=float)
    trace._append(iteration=0, step=float("nan"), displacement=float("nan"),
                  point=x.copy(), v2_to_ref=_v2ref(ctx, x, ref))
    for n in range(cfg.max_iter):
        alpha = cfg.step(n)
        x_new, extra_flags = update(x, alpha)
        for fl in extra_flags:
            if fl not in trace.flags:
                trace.flags.append(fl)
        disp = norm(ctx, x_new - x)
        trace._append(iteration=n + 1, step=alpha, displacement=disp,
                      point=x_new.copy(), v2_to_ref=_v2ref(ctx, x_new, ref),
                      residual_fixed_point=disp)
        x = x_new
        if not _check_finite_iterate(x, trace):
            break
        if disp <= cfg.stop_tol:
            trace.converged = True
            break
    return x


def vi_solve_generalized(ctx: SpaceContext, set_: ConvexSet, A, f, x0,
                         cfg: SolverConfig = SolverConfig(),
                         inner: InnerSolverConfig = DEFAULT_CONFIG,
                         ref_point=None, vi_samples: int = 1000) -> Trace:
    """x_{n+1} = dual generalized projection of (J x_n - alpha_n (A x_n - f)).

    Terminal diagnostics: the fixed-point residual of the direct projection
    equation at the terminal step size, and the sampled VI residual.
    """
    f = np.asarray(f, dtype=float)
    trace = _vi_trace_shell(ctx, "vi", "generalized", cfg)
    ref = None if ref_point is None else np.asarray(ref_point, dtype=float)

    def update(x, alpha):
        z = duality_map(ctx, x) - alpha * (np.asarray(A(x)) - f)
        res = generalized_project_dual(ctx, set_, z, inner)
        _note_inner(res, trace)
        return res.point, []

    x = _run_projection_iteration(ctx, set_, A, f, x0, cfg, inner, trace, update, ref)
    alpha_T = trace.records[-1].step if len(trace.records) > 1 else cfg.alpha
    z = duality_map(ctx, x) - alpha_T * (np.asarray(A(x)) - f)
    fp = norm(ctx, generalized_project_dual(ctx, set_, z, inner).point - x)
    vi = sampled_vi_residual(ctx, set_, A, f, x,
                             np.random.default_rng(cfg.seed), vi_samples)
    trace.terminal = {"alpha": alpha_T, "fixed_point_residual": fp, "vi_residual": vi}
    if trace.records:
        trace.records[-1].residual_vi = vi
    return trace


def vi_solve_metric(ctx: SpaceContext, set_: ConvexSet, A, f, x0,
                    cfg: SolverConfig = SolverConfig(),
                    inner: InnerSolverConfig = DEFAULT_CONFIG,
                    ref_point=None, vi_samples: int = 1000) -> Trace:
    """x_{n+1} = metric projection of (x_n - alpha_n J*(A x_n - f)).

    Informational counterpart of vi_solve_generalized (no convergence
    contract); reports the metric direct-equation fixed-point residual.
    """
    f = np.asarray(f, dtype=float)
    trace = _vi_trace_shell(ctx, "vi", "metric", cfg)
    ref = None if ref_point is None else np.asarray(ref_point, dtype=float)

    def update(x, alpha):
        z = x - alpha * duality_map_star(ctx, np.asarray(A(x)) - f)
        res = metric_project(ctx, set_, z, inner)
        _note_inner(res, trace)
        return res.point, []

    x = _run_projection_iteration(ctx, set_, A, f, x0, cfg, inner, trace, update, ref)
    alpha_T = trace.records[-1].step if len(trace.records) > 1 else cfg.alpha
    z = x - alpha_T * duality_map_star(ctx, np.asarray(A(x)) - f)
    fp = norm(ctx, metric_project(ctx, set_, z, inner).point - x)
    vi = sampled_vi_residual(ctx, set_, A, f, x,
                             np.random.default_rng(cfg.seed), vi_samples)
    trace.terminal = {"alpha": alpha_T, "fixed_point_residual": fp, "vi_residual": vi}
    if trace.records:
        trace.records[-1].residual_vi = vi
    return trace


def vi_solve_nonsmooth(ctx: SpaceContext, set_: ConvexSet, A, f, x0,
                       cfg: SolverConfig = SolverConfig(),
                       inner: InnerSolverConfig = DEFAULT_CONFIG,
                       variant: str = "normalized", ref_point=None) -> Trace:
    """Normalized-direction or Polyak-step projection iteration.

    normalized: direction (A x - f) / ||A x - f||_q for any operator;
    polyak: (u(x) - u*) grad u(x) / ||grad u(x)||_q^2, requiring a
    subgradient operator with u_star.  Steps with a vanishing normalizer
    are skipped (iterate copied) and flagged.
    """
    if variant not in ("normalized", "polyak"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "polyak":
        if not isinstance(A, SubgradientOperator) or A.u_star is None:
            raise ValueError("polyak variant requires a SubgradientOperator with u_star")
    f = np.asarray(f, dtype=float)
    trace = _vi_trace_shell(ctx, "vi_nonsmooth", variant, cfg)
    ref = None if ref_point is None else np.asarray(ref_point, dtype=float)

    def update(x, alpha):
        if variant == "normalized":
            g = np.asarray(A(x)) - f
            nrm = dual_norm(ctx, g)
            if nrm <= 1e-14:
                return x.copy(), ["zero_normalizer"]
            direction = g / nrm
        else:
            g = np.asarray(A(x))
            nrm = dual_norm(ctx, g)
            gap = float(A.fun(x)) - A.u_star
            if nrm <= 1e-14 or abs(gap) <= 1e-14 * max(1.0, abs(A.u_star)):
                return x.copy(), ["zero_normalizer"] if nrm <= 1e-14 else []
            direction = gap * g / (nrm * nrm)
        z = duality_map(ctx, x) - alpha * direction
        res = generalized_project_dual(ctx, set_, z, inner)
        _note_inner(res, trace)
        return res.point, []

    x = _run_projection_iteration(ctx, set_, A, f, x0, cfg, inner, trace, update, ref)
    trace.terminal = {"final_point": list(x)}
    return trace


def unconstrained_solve(ctx: SpaceContext, A, f, x0,
                        cfg: SolverConfig = SolverConfig()) -> Trace:
    """Dual-space iteration J x_{n+1} = J x_n - alpha_n (A x_n - f).

    The primal iterate is recovered through the inverse duality map; the
    reported residual is ||A x_n - f||_q.
    """
    f = np.asarray(f, dtype=float)
    x = np.asarray(x0, dtype=float)
    psi = duality_map(ctx, x)
    trace = _vi_trace_shell(ctx, "unconstrained", "generalized", cfg)
    res0 = dual_norm(ctx, np.asarray(A(x)) - f)
    trace._append(iteration=0, step=float("nan"), displacement=float("nan"),
                  point=x.copy(), residual_fixed_point=res0)
    for n in range(cfg.max_iter):
        alpha = cfg.step(n)
        psi = psi - alpha * (np.asarray(A(x)) - f)
        x_new = duality_map_star(ctx, psi)
        disp = norm(ctx, x_new - x)
        x = x_new
        resid = dual_norm(ctx, np.asarray(A(x)) - f)
        trace._append(iteration=n + 1, step=alpha, displacement=disp,
                      point=x.copy(), residual_fixed_point=resid)
        if not _check_finite_iterate(x, trace):
            break
        if disp <= cfg.stop_tol and resid <= cfg.stop_tol:
            trace.converged = True
            break
    trace.terminal = {"equation_residual": dual_norm(ctx, np.asarray(A(x)) - f)}
    return trace


# ---------------------------------------------------------------------------
# Wiener-Hopf equations


def wiener_hopf_residual_generalized(ctx, set_, A, f, z, alpha,
                                     inner: InnerSolverConfig = DEFAULT_CONFIG) -> float:
    """|| A pi(z) + alpha^-1 (z - J pi(z)) - f ||_q for a dual point z."""
    x = generalized_project_dual(ctx, set_, z, inner).point
    r = np.asarray(A(x)) + (np.asarray(z, dtype=float) - duality_map(ctx, x)) / alpha \
        - np.asarray(f, dtype=float)
    return dual_norm(ctx, r)


def wiener_hopf_residual_metric(ctx, set_, A, f, z, alpha,
                                inner: InnerSolverConfig = DEFAULT_CONFIG) -> float:
    """|| J*(A P(z) - f) + alpha^-1 (z - P(z)) ||_p for a primal point z."""
    x = metric_project(ctx, set_, z, inner).point
    r = duality_map_star(ctx, np.asarray(A(x)) - np.asarray(f, dtype=float)) \
        + (np.asarray(z, dtype=float) - x) / alpha
    return norm(ctx, r)


def wiener_hopf_solve(ctx: SpaceContext, set_: ConvexSet, A, f, x0,
                      cfg: SolverConfig = SolverConfig(),
                      inner: InnerSolverConfig = DEFAULT_CONFIG,
                      operator_kind: str = "generalized", ref_point=None) -> Trace:
    """Iterate the Wiener-Hopf process x_n = projection(z_n),
    z_{n+1} = image(x_n) - alpha_n (A x_n - f).

    generalized kind: z lives in the dual space, projection is the
    dual-argument generalized projection, image is J.  metric kind
    (informational): z lives in the primal space, projection is metric,
    the step is taken through J*.  Terminal block reports the equation
    residual and the solution-reconstruction checks.
    """
    if operator_kind not in ("metric", "generalized"):
        raise ValueError(f"unknown operator_kind {operator_kind!r}")
    f = np.asarray(f, dtype=float)
    x = np.asarray(x0, dtype=float)
    ref = None if ref_point is None else np.asarray(ref_point, dtype=float)
    trace = _vi_trace_shell(ctx, "wiener-hopf", operator_kind, cfg)

    generalized = operator_kind == "generalized"
    z = duality_map(ctx, x) if generalized else x.copy()
    alpha = cfg.alpha
    trace._append(iteration=0, step=float("nan"), displacement=float("nan"),
                  point=x.copy(), v2_to_ref=_v2ref(ctx, x, ref))
    for n in range(cfg.max_iter):
        alpha = cfg.step(n)
        if generalized:
            res = generalized_project_dual(ctx, set_, z, inner)
        else:
            res = metric_project(ctx, set_, z, inner)
        _note_inner(res, trace)
        x_new = res.point
        if generalized:
            z_new = duality_map(ctx, x_new) - alpha * (np.asarray(A(x_new)) - f)
            wh = wiener_hopf_residual_generalized(ctx, set_, A, f, z, alpha, inner)
        else:
            z_new = x_new - alpha * duality_map_star(ctx, np.asarray(A(x_new)) - f)
            wh = wiener_hopf_residual_metric(ctx, set_, A, f, z, alpha, inner)
        disp = norm(ctx, x_new - x)
        trace._append(iteration=n + 1, step=alpha, displacement=disp,
                      point=x_new.copy(), v2_to_ref=_v2ref(ctx, x_new, ref),
                      residual_wh=wh)
        x, z = x_new, z_new
        if not _check_finite_iterate(x, trace):
            break
        if disp <= cfg.stop_tol and n > 0:
            trace.converged = True
            break

    if generalized:
        wh_final = wiener_hopf_residual_generalized(ctx, set_, A, f, z, alpha, inner)
        z_rec = duality_map(ctx, x) - alpha * (np.asarray(A(x)) - f)
        rec_z = dual_norm(ctx, z - z_rec)
        rec_x = norm(ctx, generalized_project_dual(ctx, set_, z, inner).point - x)
    else:
        wh_final = wiener_hopf_residual_metric(ctx, set_, A, f, z, alpha, inner)
        z_rec = x - alpha * duality_map_star(ctx, np.asarray(A(x)) - f)
        rec_z = norm(ctx, z - z_rec)
        rec_x = norm(ctx, metric_project(ctx, set_, z, inner).point - x)
    trace.terminal = {
        "alpha": alpha,
        "wh_residual": wh_final,
        "reconstruction_z": rec_z,
        "reconstruction_x": rec_x,
        "final_z": list(np.asarray(z, dtype=float)),
    }
    return trace
