"""Command-line front end.

``genproj run --spec problem.json --out outdir`` executes one task
(project / feasibility / vi / wiener-hopf / unconstrained / verify) from a
JSON problem description and writes trace.csv, trace.json and summary.json
(plus report.jsonl for the verify task).  ``genproj compare`` runs the
metric and generalized variants of an iterative task side by side.

Exit codes: 0 success, 1 validation error, 2 solver non-convergence,
3 contractual check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import solvers, verify
from .projections import InnerSolverConfig, generalized_project, metric_project
from .sets import set_from_dict
from .space import SpaceContext

TASKS = ("project", "feasibility", "vi", "wiener-hopf", "unconstrained", "verify")


class SpecError(ValueError):
    pass


def _require(spec, field, task):
    if field not in spec or spec[field] is None:
        raise SpecError(f"task {task!r} requires field {field!r}")
    return spec[field]


def load_spec(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SpecError(f"cannot read spec file: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}")


def apply_overrides(spec: dict, args) -> dict:
    spec = dict(spec)
    if args.task:
        spec["task"] = args.task
    if args.p is not None:
        spec.setdefault("space", {})
        spec["space"] = dict(spec["space"], p=args.p)
    if args.seed is not None:
        spec["seed"] = args.seed
    solver = dict(spec.get("solver", {}))
    if args.alpha is not None:
        solver["alpha"] = args.alpha
    if args.max_iter is not None:
        solver["max_iter"] = args.max_iter
    if args.tol is not None:
        solver["stop_tol"] = args.tol
    spec["solver"] = solver
    if args.mode:
        spec["mode"] = args.mode
    return spec


def _space(spec) -> SpaceContext:
    sp = _require(spec, "space", spec.get("task", "?"))
    if "n" not in sp or "p" not in sp:
        raise SpecError("space requires fields 'n' and 'p'")
    try:
        return SpaceContext(int(sp["n"]), float(sp["p"]))
    except ValueError as e:
        raise SpecError(str(e))


def _sets(spec, ctx, minimum=1):
    raw = _require(spec, "sets", spec["task"])
    if not isinstance(raw, list) or len(raw) < minimum:
        raise SpecError(f"task {spec['task']!r} requires at least {minimum} set(s)")
    try:
        return [set_from_dict(d, ctx.n) for d in raw]
    except (KeyError, ValueError) as e:
        raise SpecError(f"invalid set description: {e}")


def _vector(spec, field, ctx, task):
    v = _require(spec, field, task)
    arr = np.asarray(v, dtype=float)
    if arr.shape != (ctx.n,):
        raise SpecError(f"field {field!r} must have {ctx.n} coordinates")
    return arr


def _solver_config(spec) -> solvers.SolverConfig:
    s = spec.get("solver", {})
    try:
        return solvers.SolverConfig(
            alpha=float(s.get("alpha", 0.5)),
            schedule=s.get("schedule", "constant"),
            max_iter=int(s.get("max_iter", 10_000)),
            stop_tol=float(s.get("stop_tol", 1e-10)),
            seed=int(spec.get("seed", 0)),
        )
    except ValueError as e:
        raise SpecError(str(e))


def _inner_config(spec) -> InnerSolverConfig:
    s = spec.get("inner", {})
    try:
        return InnerSolverConfig(
            tol=float(s.get("tol", 1e-9)),
            max_iter=int(s.get("max_iter", 100_000)),
        )
    except ValueError as e:
        raise SpecError(str(e))


def _operator(spec, ctx):
    raw = _require(spec, "operator", spec["task"])
    kind = raw.get("type")
    if kind != "affine":
        raise SpecError("operator type must be 'affine' for file-described problems")
    M = np.asarray(_require(raw, "M", spec["task"]), dtype=float)
    c = np.asarray(raw.get("c", np.zeros(ctx.n)), dtype=float)
    if M.shape != (ctx.n, ctx.n) or c.shape != (ctx.n,):
        raise SpecError(f"operator M must be {ctx.n}x{ctx.n} and c length {ctx.n}")
    try:
        return solvers.AffineOperator(M, c)
    except ValueError as e:
        raise SpecError(str(e))


def _write_summary(out_dir, doc):
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _emit_trace(trace, out_dir):
    trace.to_csv(os.path.join(out_dir, "trace.csv"))
    trace.to_json(os.path.join(out_dir, "trace.json"))


def run_task(spec: dict, out_dir) -> int:
    task = spec.get("task")
    if task not in TASKS:
        raise SpecError(f"task must be one of {TASKS}, got {task!r}")
    os.makedirs(out_dir, exist_ok=True)

    if task == "verify":
        vcfg = spec.get("verify", {})
        gen = verify.InstanceGenerator(seed=int(spec.get("seed", 42)))
        reports, summary = verify.run_suite(
            gen,
            checks=vcfg.get("checks"),
            vector_samples=int(vcfg.get("vector_samples", 10_000)),
            pair_samples=int(vcfg.get("pair_samples", 1000)),
            point_samples=int(vcfg.get("point_samples", 1000)),
            instances=int(vcfg.get("instances", 5)),
        )
        verify.write_reports(reports, os.path.join(out_dir, "report.jsonl"))
        _write_summary(out_dir, {"task": "verify", "seed": int(spec.get("seed", 42)),
                                 **summary})
        return 3 if summary["failed"] > 0 else 0

    ctx = _space(spec)
    mode = spec.get("mode", "generalized")
    if mode not in ("metric", "generalized"):
        raise SpecError(f"mode must be 'metric' or 'generalized', got {mode!r}")
    inner = _inner_config(spec)

    if task == "project":
        sets = _sets(spec, ctx, minimum=1)
        x0 = _vector(spec, "x0", ctx, task)
        op = metric_project if mode == "metric" else generalized_project
        res = op(ctx, sets[0], x0, inner)
        _write_summary(out_dir, {
            "task": task, "mode": mode, "projection": list(res.point),
            "objective": res.objective, "inner_iterations": res.inner_iterations,
            "kkt_residual": res.kkt_residual, "status": res.status,
        })
        return 0 if res.converged else 2

    cfg = _solver_config(spec)
    ref = None
    if spec.get("ref_point") is not None:
        ref = _vector(spec, "ref_point", ctx, task)

    if task == "feasibility":
        sets = _sets(spec, ctx, minimum=2)
        x0 = _vector(spec, "x0", ctx, task)
        trace = solvers.successive_projections(ctx, sets, x0, mode, cfg, inner, ref)
        _emit_trace(trace, out_dir)
        summary = {"task": task, "mode": mode, "converged": trace.converged,
                   "flags": trace.flags, "final_point": list(trace.final_point),
                   **trace.terminal}
        if ref is not None:
            summary["diagnostics"] = solvers.feasibility_diagnostics(trace, ref)
        _write_summary(out_dir, summary)
        return 0 if trace.converged and not trace.flags else 2

    if task == "unconstrained":
        A = _operator(spec, ctx)
        f = _vector(spec, "f", ctx, task)
        x0 = _vector(spec, "x0", ctx, task)
        trace = solvers.unconstrained_solve(ctx, A, f, x0, cfg)
        _emit_trace(trace, out_dir)
        _write_summary(out_dir, {"task": task, "converged": trace.converged,
                                 "flags": trace.flags,
                                 "final_point": list(trace.final_point),
                                 **trace.terminal})
        return 0 if trace.converged and not trace.flags else 2

    # vi and wiener-hopf
    A = _operator(spec, ctx)
    f = _vector(spec, "f", ctx, task)
    x0 = _vector(spec, "x0", ctx, task)
    sets = _sets(spec, ctx, minimum=1)
    if task == "vi":
        solve = solvers.vi_solve_metric if mode == "metric" else solvers.vi_solve_generalized
        trace = solve(ctx, sets[0], A, f, x0, cfg, inner, ref)
    else:
        trace = solvers.wiener_hopf_solve(ctx, sets[0], A, f, x0, cfg, inner,
                                          operator_kind=mode, ref_point=ref)
    _emit_trace(trace, out_dir)
    _write_summary(out_dir, {"task": task, "mode": mode, "converged": trace.converged,
                             "flags": trace.flags,
                             "final_point": list(trace.final_point),
                             **trace.terminal})
    return 0 if trace.converged and not trace.flags else 2


def run_compare(spec: dict, out_dir) -> int:
    task = spec.get("task")
    if task not in ("feasibility", "vi", "wiener-hopf"):
        raise SpecError(f"compare supports feasibility/vi/wiener-hopf, got {task!r}")
    os.makedirs(out_dir, exist_ok=True)
    codes = {}
    finals = {}
    for mode in ("metric", "generalized"):
        sub = os.path.join(out_dir, mode)
        sub_spec = dict(spec, mode=mode)
        codes[mode] = run_task(sub_spec, sub)
        with open(os.path.join(sub, "trace.json")) as fh:
            finals[mode] = json.load(fh)

    rec_m = finals["metric"]["records"]
    rec_g = finals["generalized"]["records"]
    paired = min(len(rec_m), len(rec_g))
    ctx = _space(spec)
    deltas = []
    for i in range(paired):
        a = np.asarray(rec_m[i]["point"])
        b = np.asarray(rec_g[i]["point"])
        deltas.append(float(np.sum(np.abs(a - b) ** ctx.p) ** (1.0 / ctx.p)))
    _write_summary(out_dir, {
        "task": task, "paired_records": paired,
        "max_pointwise_delta": max(deltas) if deltas else 0.0,
        "final_delta": deltas[-1] if deltas else 0.0,
        "exit_codes": codes,
    })
    return max(codes.values())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="genproj",
        description="Projection operators, solvers and the verification suite "
                    "for finite-dimensional l^p spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "compare"):
        sp = sub.add_parser(name)
        sp.add_argument("--spec", required=True, help="problem description (JSON)")
        sp.add_argument("--out", default=os.environ.get("OUT_DIR", "out"),
                        help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--max-iter", type=int, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--mode", choices=("metric", "generalized"), default=None)
        sp.add_argument("--task", choices=TASKS, default=None)
    args = parser.parse_args(argv)

    try:
        spec = apply_overrides(load_spec(args.spec), args)
        if args.command == "run":
            return run_task(spec, args.out)
        return run_compare(spec, args.out)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
