"""Executable inequality corpus: geometric inequalities of l^p, the
strong-uniqueness estimates for metric projections, the lettered operator
properties of all three projection operators, and set-perturbation
stability, each producing auditable CheckReports.

A check cell evaluates one inequality over a seeded batch of instances
and reports the minimum slack together with the worst instance's inputs.
Slack is oriented so slack >= 0 means the inequality holds.  Checks whose
property genuinely fails in Banach space (the Hilbert-only list) run in
"informational" mode at p != 2: violations are recorded as evidence, not
failures.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import lyapunov
from .projections import (
    DEFAULT_CONFIG,
    InnerSolverConfig,
    generalized_project,
    generalized_project_dual,
    metric_project,
)
from .sets import Ball2, Box, ConvexSet, Halfspace
from .space import (
    SpaceContext,
    duality_map,
    dual_norm,
    gauge_duality_map,
    modulus_estimates,
    norm,
)

__all__ = [
    "CheckReport",
    "InstanceGenerator",
    "check_clarkson",
    "check_parallelogram_upper",
    "check_parallelogram_lower",
    "check_norm_sq_subgradient",
    "check_norm_power_subgradient",
    "check_v2_bounds",
    "check_strong_uniqueness",
    "check_characterizations",
    "check_operator_properties",
    "check_stability",
    "run_suite",
    "write_reports",
    "summarize",
]

# pass threshold per check id: slack >= -(atol + rtol * max(|lhs|, |rhs|, 1))
_TOLERANCES = {
    "clarkson": (1e-10, 1e-12),
    "parallelogram_upper": (1e-9, 1e-12),
    "parallelogram_lower": (1e-9, 1e-12),
    "norm_sq_subgradient": (1e-9, 1e-12),
    "gauge_power_subgradient": (1e-9, 1e-12),
    "v2_bracket_lower": (1e-10, 1e-12),
    "v2_bracket_upper": (1e-10, 1e-12),
    "v2_modulus_floor": (1e-10, 1e-12),
    "metric_varineq": (1e-6, 0.0),
    "metric_varineq_strong": (1e-6, 0.0),
    "gen_varineq": (1e-6, 0.0),
    "gen_varineq_target": (1e-6, 0.0),
    "gen_varineq_primal": (1e-6, 0.0),
    "dual_varineq": (1e-6, 0.0),
    "dual_varineq_target": (1e-6, 0.0),
    "dual_varineq_primal": (1e-6, 0.0),
    "metric_continuity_global": (1e-6, 1e-8),
    "metric_continuity_smooth": (1e-6, 1e-8),
    "gen_continuity": (1e-6, 1e-8),
    "dual_continuity": (1e-6, 1e-8),
    "stability_hausdorff": (1e-6, 1e-8),
    "gen_absolute_approx": (1e-7, 1e-8),
    "dual_absolute_approx": (1e-7, 1e-8),
}
_DEFAULT_TOL = (1e-8, 1e-8)


def tolerance(check_id: str) -> tuple[float, float]:
    return _TOLERANCES.get(check_id, _DEFAULT_TOL)


@dataclass
class CheckReport:
    check_id: str
    instance_seed: int
    lhs: float
    rhs: float
    slack: float
    passed: bool
    mode: str  # "contractual" or "informational"
    context: dict = field(default_factory=dict)

    def to_json_line(self) -> str:
        doc = {
            "check_id": self.check_id,
            "instance_seed": self.instance_seed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "mode": self.mode,
            "context": self.context,
        }
        return json.dumps(doc, sort_keys=True)


def _report(check_id, seed, slacks, lhs, rhs, context, mode="contractual"):
    """Cell report from per-sample slack arrays; stores the worst sample."""
    slacks = np.asarray(slacks, dtype=float)
    i = int(np.argmin(slacks)) if slacks.size else 0
    lhs_i = float(np.asarray(lhs, dtype=float).ravel()[i]) if np.ndim(lhs) else float(lhs)
    rhs_i = float(np.asarray(rhs, dtype=float).ravel()[i]) if np.ndim(rhs) else float(rhs)
    smin = float(slacks[i]) if slacks.size else 0.0
    atol, rtol = tolerance(check_id)
    thresh = atol + rtol * max(abs(lhs_i), abs(rhs_i), 1.0)
    ctx = dict(context)
    ctx["samples"] = int(slacks.size)
    ctx["worst_index"] = i
    passed = bool(smin >= -thresh) if mode == "contractual" else True
    if mode == "informational":
        ctx["violations"] = int(np.sum(slacks < -thresh))
    return CheckReport(check_id, seed, lhs_i, rhs_i, smin, passed, mode, ctx)


@dataclass(frozen=True)
class InstanceGenerator:
    """Reproducible instance streams: same seed, same instances."""

    seed: int = 42
    dims: tuple = (2, 3, 5, 8)
    p_values: tuple = (1.5, 2.0, 3.0, 4.0)
    magnitude: float = 2.0

    def rng(self, tag: str) -> np.random.Generator:
        key = zlib.crc32(tag.encode())
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(key,)))

    def vectors(self, rng, n, count):
        scale = self.magnitude * 10.0 ** rng.uniform(-1.0, 0.5, size=(count, 1))
        return rng.normal(size=(count, n)) * scale

    def set_catalog(self, rng, n):
        lo = -1.0 - rng.uniform(0.0, 1.0, size=n)
        hi = 1.0 + rng.uniform(0.0, 1.0, size=n)
        a = rng.normal(size=n)
        while not np.any(a):
            a = rng.normal(size=n)
        return [
            Box(lo, hi),
            Halfspace(a, float(rng.uniform(-0.5, 1.0))),
            Ball2(rng.normal(size=n) * 0.3, float(rng.uniform(0.8, 2.0))),
        ]


# ---------------------------------------------------------------------------
# norm inequalities on vector pairs


def check_clarkson(ctx: SpaceContext, x, y, seed=0) -> CheckReport:
    """||x+y||^p + ||x-y||^p <= 2^(p-1)(||x||^p + ||y||^p), for p >= 2."""
    if ctx.p < 2.0:
        raise ValueError("Clarkson's inequality in this form requires p >= 2")
    x, y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
    p = ctx.p
    lhs = norm(ctx, x + y) ** p + norm(ctx, x - y) ** p
    rhs = 2.0 ** (p - 1.0) * (norm(ctx, x) ** p + norm(ctx, y) ** p)
    return _report("clarkson", seed, rhs - lhs, lhs, rhs, {"p": p, "n": ctx.n})


def _c1(mod, nx, ny):
    return 2.0 * np.maximum(mod.figiel_L, (nx + ny) / 2.0)


def _c2(nx, ny):
    return 2.0 * np.maximum(1.0, np.sqrt((nx * nx + ny * ny) / 2.0))


def check_parallelogram_upper(ctx: SpaceContext, x, y, seed=0) -> CheckReport:
    """2||x||^2 + 2||y||^2 - ||x+y||^2 <= 4||x-y||^2 + C1 rho(||x-y||)."""
    x, y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
    mod = modulus_estimates(ctx)
    nx, ny, d = norm(ctx, x), norm(ctx, y), norm(ctx, x - y)
    lhs = 2.0 * nx * nx + 2.0 * ny * ny - norm(ctx, x + y) ** 2
    rhs = 4.0 * d * d + _c1(mod, nx, ny) * mod.rho_upper(np.atleast_1d(d))
    return _report("parallelogram_upper", seed, rhs - lhs, lhs, rhs, {"p": ctx.p, "n": ctx.n})


def check_parallelogram_lower(ctx: SpaceContext, x, y, seed=0) -> CheckReport:
    """2||x||^2 + 2||y||^2 - ||x+y||^2 >= L^-1 delta(||x-y|| / C2)."""
    x, y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
    mod = modulus_estimates(ctx)
    nx, ny, d = norm(ctx, x), norm(ctx, y), norm(ctx, x - y)
    lhs = 2.0 * nx * nx + 2.0 * ny * ny - norm(ctx, x + y) ** 2
    rhs = mod.delta_lower(np.atleast_1d(d / _c2(nx, ny))) / mod.figiel_L
    return _report("parallelogram_lower", seed, lhs - rhs, lhs, rhs, {"p": ctx.p, "n": ctx.n})


def check_norm_sq_subgradient(ctx: SpaceContext, x, y, seed=0) -> CheckReport:
    """||x||^2 <= ||y||^2 + 2<Jx, x-y> - (2L)^-1 delta(||x-y|| / C).

    C is the constant-on-bounded-sets form 2 max{1, ||x||, ||y||}, the
    weakest admissible choice.
    """
    x, y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
    mod = modulus_estimates(ctx)
    nx, ny, d = norm(ctx, x), norm(ctx, y), norm(ctx, x - y)
    jx = duality_map(ctx, x)
    cc = 2.0 * np.maximum(1.0, np.maximum(nx, ny))
    delta = mod.delta_lower(np.atleast_1d(d / cc))
    lhs = nx * nx
    rhs = ny * ny + 2.0 * np.sum(jx * (x - y), axis=-1) - delta / (2.0 * mod.figiel_L)
    return _report("norm_sq_subgradient", seed, rhs - lhs, lhs, rhs, {"p": ctx.p, "n": ctx.n})


def check_norm_power_subgradient(ctx: SpaceContext, x, y, seed=0) -> CheckReport:
    """||y||^p >= ||x||^p + p <Jmu x, y-x> + 2^(1-p) ||x-y||^p, for p >= 2."""
    if ctx.p < 2.0:
        raise ValueError("power-form subgradient bound requires p >= 2")
    x, y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
    p = ctx.p
    mu = gauge_duality_map(ctx, x)
    lhs = norm(ctx, y) ** p
    rhs = norm(ctx, x) ** p + p * np.sum(mu * (y - x), axis=-1) \
        + 2.0 ** (1.0 - p) * norm(ctx, x - y) ** p
    return _report("gauge_power_subgradient", seed, lhs - rhs, lhs, rhs, {"p": p, "n": ctx.n})


def check_v2_bounds(ctx: SpaceContext, x, y, seed=0) -> list[CheckReport]:
    """Norm bracket and modulus floor for v2 (cell reports for both sides,
    plus the informational smoothness ceiling)."""
    x, y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
    mod = modulus_estimates(ctx)
    nx, ny, d = norm(ctx, x), norm(ctx, y), norm(ctx, x - y)
    v2s = np.atleast_1d(lyapunov.v2(ctx, x, y))
    meta = {"p": ctx.p, "n": ctx.n}
    out = [
        _report("v2_bracket_lower", seed, v2s - (nx - ny) ** 2, (nx - ny) ** 2, v2s, meta),
        _report("v2_bracket_upper", seed, (nx + ny) ** 2 - v2s, v2s, (nx + ny) ** 2, meta),
    ]
    c = _c2(nx, ny)
    floor = mod.delta_lower(np.atleast_1d(d / c)) / mod.figiel_L
    out.append(_report("v2_modulus_floor", seed, v2s - floor, floor, v2s, meta))
    ceil = mod.rho_upper(np.atleast_1d(8.0 * mod.figiel_L * c * d)) / mod.figiel_L
    out.append(_report("v2_modulus_ceiling", seed, ceil - v2s, v2s, ceil, meta,
                       mode="informational"))
    return out


# ---------------------------------------------------------------------------
# strong-uniqueness estimates for the metric projection


def check_strong_uniqueness(ctx: SpaceContext, set_: ConvexSet, x, xi_samples,
                            cfg: InnerSolverConfig = DEFAULT_CONFIG,
                            seed=0) -> list[CheckReport]:
    """Three-point estimates ||x - xbar||^r <= ||x - xi||^r - lam ||xbar - xi||^r
    in the regime matching p, plus the modulus form valid for all p."""
    x = np.asarray(x, dtype=float)
    xi = np.atleast_2d(np.asarray(xi_samples, dtype=float))
    xbar = metric_project(ctx, set_, x, cfg).point
    p = ctx.p
    mod = modulus_estimates(ctx)
    meta = {"p": p, "n": ctx.n, "set": type(set_).__name__}

    d_xx = norm(ctx, x - xbar)
    d_xxi = norm(ctx, x - xi)
    d_bxi = norm(ctx, xbar - xi)
    out = []

    if p <= 2.0:
        lhs = d_xx ** 2
        rhs = d_xxi ** 2 - (p - 1.0) * d_bxi ** 2
        out.append(_report("metric_threepoint_sq", seed, rhs - lhs, lhs, rhs, meta))
        rhs_half = d_xxi ** 2 - (p - 1.0) / 2.0 * d_bxi ** 2
        out.append(_report("metric_threepoint_sq_half", seed, rhs_half - lhs, lhs, rhs_half, meta))
        lam, r = (p - 1.0) / 8.0, 2.0
    else:
        lhs = d_xx ** p
        rhs = d_xxi ** p - 2.0 ** (1.0 - p) * d_bxi ** p
        out.append(_report("metric_threepoint_pow", seed, rhs - lhs, lhs, rhs, meta))
        s = p + 1.0
        rhs_s = d_xxi ** s - 2.0 ** (1.0 - s) * d_bxi ** s
        out.append(_report("metric_threepoint_pow_s", seed, rhs_s - d_xx ** s,
                           d_xx ** s, rhs_s, meta | {"s": s}))
        lam, r = 1.0 / (p * 2.0 ** p), p

    # Smarzewski-type form and its rearrangement
    lhs_s = d_xx ** r
    rhs_s = d_xxi ** r - lam * d_bxi ** r
    out.append(_report("metric_threepoint_smz", seed, rhs_s - lhs_s, lhs_s, rhs_s,
                       meta | {"lambda": lam, "order": r}))
    rhs_r = (d_xxi ** r - d_xx ** r) / lam
    out.append(_report("metric_threepoint_smz_rearranged", seed, rhs_r - d_bxi ** r,
                       d_bxi ** r, rhs_r, meta | {"lambda": lam, "order": r}))

    # modulus form, all p, conservative constant
    cc = 2.0 * np.maximum(1.0, np.maximum(d_xx, d_xxi))
    delta = mod.delta_lower(np.atleast_1d(d_bxi / cc))
    rhs_m = d_xxi ** 2 - delta / (2.0 * mod.figiel_L)
    out.append(_report("metric_threepoint_modulus", seed, rhs_m - d_xx ** 2,
                       d_xx ** 2, rhs_m, meta))
    return out


# ---------------------------------------------------------------------------
# characterization inequalities (the acceptance-gate slacks)


def check_characterizations(ctx: SpaceContext, set_: ConvexSet, x, samples,
                            cfg: InnerSolverConfig = DEFAULT_CONFIG,
                            seed=0) -> list[CheckReport]:
    """Variational characterizations of the three projections of x as cell
    reports (metric 'is-a-projection' form included)."""
    from .projections import characterization_residuals

    res = characterization_residuals(ctx, set_, x, samples, cfg)
    meta = {"p": ctx.p, "n": ctx.n, "set": type(set_).__name__}
    naming = {
        "c5": "metric_varineq",
        "e5_strong": "metric_varineq_strong",
        "c7": "gen_varineq",
        "d7": "gen_varineq_target",
        "e7": "gen_varineq_primal",
        "c8": "dual_varineq",
        "d8": "dual_varineq_target",
        "e8": "dual_varineq_primal",
    }
    out = []
    for key, cid in naming.items():
        s = res[key]
        out.append(_report(cid, seed, [s], s, 0.0, meta))
    return out


# ---------------------------------------------------------------------------
# lettered operator properties


def _pair_min(reports_dict, cid, seed, slacks, meta, mode="contractual"):
    reports_dict.append(_report(cid, seed, slacks, 0.0, 0.0, meta, mode=mode))


def check_operator_properties(ctx: SpaceContext, set_: ConvexSet, gen: InstanceGenerator,
                              pairs: int = 200, sample_points: int = 200,
                              instances: int = 5,
                              cfg: InnerSolverConfig = DEFAULT_CONFIG) -> list[CheckReport]:
    """One cell report per lettered property of the metric, generalized and
    dual-argument projections on this set.

    Hilbert-only metric properties (monotonicity, nonexpansiveness, strong
    monotonicity, absolute best approximation, the target-angle form) are
    contractual at p = 2 and run as informational violation searches at
    p != 2.
    """
    rng = gen.rng(f"ops-p{ctx.p}-n{ctx.n}-{type(set_).__name__}")
    mod = modulus_estimates(ctx)
    dual_mod = modulus_estimates(ctx.dual())
    L = mod.figiel_L
    p2 = ctx.p == 2.0
    meta = {"p": ctx.p, "n": ctx.n, "set": type(set_).__name__}
    seed = gen.seed
    out = []

    # --- fixed-point properties on set members
    members = set_.sample(rng, instances)
    fixed_m, fixed_g, fixed_d = [], [], []
    for m in members:
        fixed_m.append(-norm(ctx, metric_project(ctx, set_, m, cfg).point - m))
        fixed_g.append(-norm(ctx, generalized_project(ctx, set_, m, cfg).point - m))
        fixed_d.append(-norm(ctx, generalized_project_dual(
            ctx, set_, duality_map(ctx, m), cfg).point - m))
    tolfix = 1e-8
    _pair_min(out, "metric_fixed_on_set", seed, np.array(fixed_m) + tolfix, meta)
    _pair_min(out, "gen_fixed_on_set", seed, np.array(fixed_g) + tolfix, meta)
    _pair_min(out, "dual_fixed_on_set", seed, np.array(fixed_d) + tolfix, meta)

    # --- pairwise properties
    X = gen.vectors(rng, ctx.n, pairs)
    Y = gen.vectors(rng, ctx.n, pairs)
    PHI1 = gen.vectors(rng, ctx.n, pairs)
    PHI2 = gen.vectors(rng, ctx.n, pairs)

    mb_x = np.array([metric_project(ctx, set_, v, cfg).point for v in X])
    mb_y = np.array([metric_project(ctx, set_, v, cfg).point for v in Y])
    gh_x = np.array([generalized_project(ctx, set_, v, cfg).point for v in X])
    gh_y = np.array([generalized_project(ctx, set_, v, cfg).point for v in Y])
    dt_1 = np.array([generalized_project_dual(ctx, set_, v, cfg).point for v in PHI1])
    dt_2 = np.array([generalized_project_dual(ctx, set_, v, cfg).point for v in PHI2])

    jx, jy = duality_map(ctx, X), duality_map(ctx, Y)
    j_ghx, j_ghy = duality_map(ctx, gh_x), duality_map(ctx, gh_y)
    j_dt1, j_dt2 = duality_map(ctx, dt_1), duality_map(ctx, dt_2)

    def rows(a, b):
        return np.sum(a * b, axis=-1)

    # d-accretivity / monotonicity
    _pair_min(out, "gen_daccretive", seed, rows(jx - jy, gh_x - gh_y), meta)
    _pair_min(out, "dual_monotone", seed, rows(PHI1 - PHI2, dt_1 - dt_2), meta)

    # residual monotonicity (metric / generalized / dual forms)
    _pair_min(out, "metric_residual_monotone", seed,
              rows(duality_map(ctx, X - mb_x) - duality_map(ctx, Y - mb_y), mb_x - mb_y), meta)
    _pair_min(out, "gen_residual_monotone", seed,
              rows((jx - j_ghx) - (jy - j_ghy), gh_x - gh_y), meta)
    _pair_min(out, "dual_residual_monotone", seed,
              rows((PHI1 - j_dt1) - (PHI2 - j_dt2), dt_1 - dt_2), meta)

    # strong monotonicity through the modulus floor
    c7 = 2.0 * np.maximum(1.0, np.maximum(norm(ctx, gh_x), norm(ctx, gh_y)))
    d7 = norm(ctx, gh_x - gh_y)
    floor7 = mod.delta_lower(np.atleast_1d(d7 / c7)) / (2.0 * L)
    _pair_min(out, "gen_strong_monotone", seed, rows(jx - jy, gh_x - gh_y) - floor7, meta)

    c8 = 2.0 * np.maximum(1.0, np.maximum(norm(ctx, dt_1), norm(ctx, dt_2)))
    d8 = norm(ctx, dt_1 - dt_2)
    floor8 = mod.delta_lower(np.atleast_1d(d8 / c8)) / (2.0 * L)
    _pair_min(out, "dual_strong_monotone", seed, rows(PHI1 - PHI2, dt_1 - dt_2) - floor8, meta)

    # uniform-continuity estimates
    dxy = norm(ctx, X - Y)
    c7f = 2.0 * np.maximum.reduce([np.ones(pairs), norm(ctx, X), norm(ctx, Y),
                                   norm(ctx, gh_x), norm(ctx, gh_y)])
    inner7 = dual_mod.g_lower_inv(2.0 * L * c7f * dxy)
    cont_g = c7f * mod.g_lower_inv(2.0 * L * c7f ** 2 * inner7) - d7
    _pair_min(out, "gen_continuity", seed, cont_g, meta)

    dphi = dual_norm(ctx, PHI1 - PHI2)
    c8f = 2.0 * np.maximum(1.0, np.maximum(norm(ctx, dt_1), norm(ctx, dt_2)))
    cont_d = c8f * mod.g_lower_inv(2.0 * L * c8f * dphi) - d8
    _pair_min(out, "dual_continuity", seed, cont_d, meta)

    dm = norm(ctx, mb_x - mb_y)
    cmf = 2.0 * np.maximum.reduce([np.ones(pairs), norm(ctx, X - mb_y), norm(ctx, Y - mb_x)])
    inner_m = dual_mod.g_lower_inv(2.0 * cmf * L * dxy)
    cont_m = cmf * mod.g_lower_inv(2.0 * L * cmf ** 2 * inner_m) - dm
    cont_ms = cmf * mod.delta_lower_inv(mod.rho_upper(8.0 * cmf * L * dxy)) - dm
    _pair_min(out, "metric_continuity_global", seed, cont_m, meta)
    _pair_min(out, "metric_continuity_smooth", seed, cont_ms, meta)

    # Hilbert-only metric properties: contractual at p=2, searches otherwise
    hmode = "contractual" if p2 else "informational"
    _pair_min(out, "metric_monotone", seed, rows(mb_x - mb_y, X - Y), meta, mode=hmode)
    _pair_min(out, "metric_nonexpansive", seed, dxy - dm, meta, mode=hmode)
    _pair_min(out, "metric_strong_monotone", seed,
              rows(mb_x - mb_y, X - Y) - dm * dm, meta, mode=hmode)

    # absolute best approximation / conditional nonexpansiveness over members
    S = set_.sample(rng, sample_points)
    abs_m, abs_g, abs_gc, abs_d, abs_dc, tgt_m = [], [], [], [], [], []
    for i in range(min(instances, pairs)):
        x = X[i]
        xb, xh = mb_x[i], gh_x[i]
        phi = PHI1[i]
        tphi = dt_1[i]
        v2x = np.atleast_1d(lyapunov.v2(ctx, x, S))
        v2h = np.atleast_1d(lyapunov.v2(ctx, xh, S))
        abs_g.append(np.min(v2x - lyapunov.v2(ctx, x, xh) - v2h))
        abs_gc.append(np.min(v2x - v2h))
        v4p = np.atleast_1d(lyapunov.v4(ctx, phi, S))
        v4t = np.atleast_1d(lyapunov.v4(ctx, duality_map(ctx, tphi), S))
        abs_d.append(np.min(v4p - lyapunov.v4(ctx, phi, tphi) - v4t))
        abs_dc.append(np.min(v4p - v4t))
        nxk = norm(ctx, x - S)
        nbk = norm(ctx, xb - S)
        abs_m.append(np.min(nxk ** 2 - norm(ctx, x - xb) ** 2 - nbk ** 2))
        tgt_m.append(np.min(np.sum((x - S) * (xb - S), axis=-1)))
    _pair_min(out, "gen_absolute_approx", seed, abs_g, meta)
    _pair_min(out, "gen_conditional_nonexpansive", seed, abs_gc, meta)
    _pair_min(out, "dual_absolute_approx", seed, abs_d, meta)
    _pair_min(out, "dual_conditional_nonexpansive", seed, abs_dc, meta)
    _pair_min(out, "metric_absolute_approx", seed, abs_m, meta, mode=hmode)
    _pair_min(out, "metric_varineq_target", seed, tgt_m, meta, mode=hmode)

    return out


def check_stability(ctx: SpaceContext, base: ConvexSet, x, sigmas,
                    cfg: InnerSolverConfig = DEFAULT_CONFIG, seed=0) -> list[CheckReport]:
    """Generalized-projection stability under set inflation with exact
    Hausdorff distance: ||xh1 - xh2|| <= C1 delta^-1(4 L C2 sigma)."""
    mod = modulus_estimates(ctx)
    L = mod.figiel_L
    x = np.asarray(x, dtype=float)
    xh1 = generalized_project(ctx, base, x, cfg).point
    jx = duality_map(ctx, x)
    out = []
    for sigma in sigmas:
        inflated = base.perturb(sigma)
        h = base.perturb_hausdorff(sigma)
        xh2 = generalized_project(ctx, inflated, x, cfg).point
        r1 = dual_norm(ctx, jx - duality_map(ctx, xh1))
        r2 = dual_norm(ctx, jx - duality_map(ctx, xh2))
        c1 = 2.0 * max(1.0, r1, r2)
        c2 = 2.0 * max(r1, r2)
        lhs = norm(ctx, xh1 - xh2)
        rhs = c1 * mod.delta_lower_inv(4.0 * L * c2 * h)
        out.append(_report("stability_hausdorff", seed, [rhs - lhs], lhs, rhs,
                           {"p": ctx.p, "n": ctx.n, "sigma": float(sigma),
                            "hausdorff": h, "set": type(base).__name__}))
    return out


# ---------------------------------------------------------------------------
# suite driver


def _suite_vector_checks(gen: InstanceGenerator, count: int) -> list[CheckReport]:
    out = []
    for p in gen.p_values:
        for n in gen.dims:
            ctx = SpaceContext(n, p)
            rng = gen.rng(f"vec-p{p}-n{n}")
            per = max(1, count // len(gen.dims))
            X = gen.vectors(rng, n, per)
            Y = gen.vectors(rng, n, per)
            if p >= 2.0:
                out.append(check_clarkson(ctx, X, Y, gen.seed))
                out.append(check_norm_power_subgradient(ctx, X, Y, gen.seed))
            out.append(check_parallelogram_upper(ctx, X, Y, gen.seed))
            out.append(check_parallelogram_lower(ctx, X, Y, gen.seed))
            out.append(check_norm_sq_subgradient(ctx, X, Y, gen.seed))
            out.extend(check_v2_bounds(ctx, X, Y, gen.seed))
    return out


def _suite_strong_uniqueness(gen: InstanceGenerator, instances: int,
                             samples: int, cfg) -> list[CheckReport]:
    out = []
    for p in gen.p_values:
        for n in gen.dims[:2]:
            ctx = SpaceContext(n, p)
            rng = gen.rng(f"su-p{p}-n{n}")
            box = Box(-np.ones(n), np.ones(n))
            for _ in range(instances):
                x = gen.vectors(rng, n, 1)[0]
                xi = box.sample(rng, samples)
                out.extend(check_strong_uniqueness(ctx, box, x, xi, cfg, gen.seed))
    return out


def _suite_characterizations(gen: InstanceGenerator, instances: int,
                             samples: int, cfg) -> list[CheckReport]:
    out = []
    for p in gen.p_values:
        for n in gen.dims[:2]:
            ctx = SpaceContext(n, p)
            rng = gen.rng(f"char-p{p}-n{n}")
            for set_ in gen.set_catalog(rng, n):
                for _ in range(instances):
                    x = gen.vectors(rng, n, 1)[0]
                    pts = set_.sample(rng, samples)
                    out.extend(check_characterizations(ctx, set_, x, pts, cfg, gen.seed))
    return out


def _suite_operator_properties(gen: InstanceGenerator, pairs: int,
                               samples: int, cfg) -> list[CheckReport]:
    out = []
    for p in gen.p_values:
        for n in gen.dims[:2]:
            ctx = SpaceContext(n, p)
            rng = gen.rng(f"opsets-p{p}-n{n}")
            for set_ in gen.set_catalog(rng, n):
                out.extend(check_operator_properties(
                    ctx, set_, gen, pairs=pairs, sample_points=samples, cfg=cfg))
    return out


def _suite_stability(gen: InstanceGenerator, instances: int, cfg) -> list[CheckReport]:
    out = []
    sigmas = (1e-3, 1e-2, 1e-1)
    for p in gen.p_values:
        for n in gen.dims[:2]:
            ctx = SpaceContext(n, p)
            rng = gen.rng(f"stab-p{p}-n{n}")
            box = Box(-np.ones(n), np.ones(n))
            for _ in range(instances):
                x = gen.vectors(rng, n, 1)[0]
                out.extend(check_stability(ctx, box, x, sigmas, cfg, gen.seed))
    return out


SUITE_GROUPS = ("inequalities", "strong_uniqueness", "characterizations",
                "operator_properties", "stability")


def run_suite(gen: InstanceGenerator, checks=None, vector_samples: int = 10_000,
              pair_samples: int = 1000, point_samples: int = 1000,
              instances: int = 5,
              cfg: InnerSolverConfig = DEFAULT_CONFIG) -> tuple[list[CheckReport], dict]:
    """Run the selected check groups; deterministic for a fixed generator.

    Returns (reports, summary) with summary counting contractual
    pass/fail and informational cells.
    """
    groups = SUITE_GROUPS if checks is None else tuple(checks)
    unknown = set(groups) - set(SUITE_GROUPS)
    if unknown:
        raise ValueError(f"unknown check groups: {sorted(unknown)}")
    reports: list[CheckReport] = []
    if "inequalities" in groups:
        reports.extend(_suite_vector_checks(gen, vector_samples))
    if "strong_uniqueness" in groups:
        reports.extend(_suite_strong_uniqueness(gen, instances, point_samples, cfg))
    if "characterizations" in groups:
        reports.extend(_suite_characterizations(gen, max(2, instances // 2),
                                                point_samples, cfg))
    if "operator_properties" in groups:
        reports.extend(_suite_operator_properties(gen, pair_samples, point_samples, cfg))
    if "stability" in groups:
        reports.extend(_suite_stability(gen, instances, cfg))
    reports.sort(key=lambda r: (r.check_id, r.instance_seed,
                                json.dumps(r.context, sort_keys=True)))
    return reports, summarize(reports)


def summarize(reports) -> dict:
    failed = sum(1 for r in reports if r.mode == "contractual" and not r.passed)
    info = sum(1 for r in reports if r.mode == "informational")
    passed = sum(1 for r in reports if r.mode == "contractual" and r.passed)
    return {"total": len(reports), "passed": passed, "failed": failed,
            "informational": info}


def write_reports(reports, path):
    with open(path, "w") as fh:
        for r in reports:
            fh.write(r.to_json_line())
            fh.write("\n")
