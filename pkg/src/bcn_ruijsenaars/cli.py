"""Command-line front end.

Subcommands:

* ``verify``     draw random admissible points, rebuild the constrained
                 element at each, and report the worst constraint residual;
* ``simulate``   integrate the reduced ODE and/or project the exact flow,
                 writing ``t,q1..qn,p1..pn,energy,residual`` CSV rows;
* ``involution`` estimate the pairwise Poisson brackets of the commuting
                 family on random points (JSON report);
* ``limit``      convergence report of the cotangent-bundle limit (JSON).

Exit codes: 0 success, 1 validation error (bad flags or inadmissible
input), 2 numerical failure or tolerance breach.  All random draws are
fixed by ``--seed``; identical configuration and seed give byte-identical
output.  A JSON file with the same field names as the long flags
(underscores for dashes) can be supplied via ``--config``; explicit
flags override it.  Set ``BCN_LOG=debug`` for progress messages on
standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .decomposition import extract_reduced
from .dynamics import (
    compare_trajectories,
    integrate_reduced,
    project_flow,
    trajectory_csv_text,
)
from .errors import (
    BCNError,
    ChamberViolation,
    InvalidInput,
    NotOnLeaf,
    SeparationViolation,
)
from .hamiltonians import involution_report
from .limits import LimitParams, limit_convergence
from .model import ReducedPoint, make_params
from .reconstruction import assemble, verify_constraints
from .sampling import random_admissible_point

_VALIDATION_ERRORS = (InvalidInput, ChamberViolation, SeparationViolation,
                      NotOnLeaf)


def _log(msg: str) -> None:
    if os.environ.get("BCN_LOG", "").lower() in ("1", "debug", "info"):
        print(f"[bcn] {msg}", file=sys.stderr)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip() != ""])
    except ValueError as exc:
        raise InvalidInput(f"could not parse vector {text!r}") from exc


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
        _log(f"wrote {output}")
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, (bool, np.bool_)):
            return bool(obj)
        if isinstance(obj, (np.floating, float)):
            return float(f"{float(obj):.17g}")
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, np.ndarray):
            return clean(obj.tolist())
        return obj
    return json.dumps(clean(payload), sort_keys=True, indent=2) + "\n"


def _kv_csv(payload: dict) -> str:
    lines = ["key,value"]
    for key in sorted(payload):
        val = payload[key]
        if isinstance(val, (list, tuple, np.ndarray)):
            val = ";".join(_fmt(float(v)) for v in np.ravel(np.asarray(val)))
        elif isinstance(val, float):
            val = _fmt(val)
        lines.append(f"{key},{val}")
    return "\n".join(lines) + "\n"


def _report_text(payload: dict, fmt: str) -> str:
    return _kv_csv(payload) if fmt == "csv" else _json_text(payload)


def cmd_verify(args) -> int:
    params = make_params(args.alpha, args.x, args.y, args.n)
    rng = np.random.default_rng(args.seed)
    per_constraint: dict = {}
    max_residual = 0.0
    for i in range(args.samples):
        point = random_admissible_point(rng, params)
        fact, cdata = assemble(point, params)
        rep = verify_constraints(fact, cdata, params, tol=args.tol)
        for name, r in rep.residuals.items():
            per_constraint[name] = max(per_constraint.get(name, 0.0), r)
        max_residual = max(max_residual, rep.max_residual)
        _log(f"sample {i}: max residual {rep.max_residual:.3e}")
    worst = max(per_constraint, key=per_constraint.get)
    payload = {
        "alpha": params.alpha, "x": params.x, "y": params.y, "n": params.n,
        "samples": args.samples, "seed": args.seed, "tol": args.tol,
        "max_residual": max_residual, "worst_constraint": worst,
        "per_constraint_max": per_constraint,
        "pass": max_residual < args.tol,
    }
    _emit(_report_text(payload, args.format), args.output)
    print(f"max residual {_fmt(max_residual)} over {args.samples} samples "
          f"({'PASS' if payload['pass'] else 'FAIL'} at tol {args.tol:g})",
          file=sys.stderr)
    return 0 if payload["pass"] else 2


def _initial_point(args, params) -> ReducedPoint:
    if args.q is not None or args.p is not None:
        if args.q is None or args.p is None:
            raise InvalidInput("--q and --p must be given together")
        q, p = _parse_vector(args.q), _parse_vector(args.p)
        if q.size != params.n or p.size != params.n:
            raise InvalidInput(f"--q/--p must have n={params.n} entries")
        point = ReducedPoint(q=q, p=p)
        fact, cdata = assemble(point, params)   # validates admissibility
        return point
    rng = np.random.default_rng(args.seed)
    return random_admissible_point(rng, params)


def cmd_simulate(args) -> int:
    params = make_params(args.alpha, args.x, args.y, args.n)
    point = _initial_point(args, params)
    n_steps = max(1, int(round(args.t_max / args.dt))) if args.t_max > 0 else 0
    stride = max(1, n_steps // max(1, args.sample_count))
    _log(f"initial point q={point.q} p={point.p}; {n_steps} steps, stride {stride}")

    reduced = exact = None
    if args.method in ("reduced", "both"):
        reduced = integrate_reduced(point, params, args.t_max, args.dt,
                                    method=args.integrator, sample_every=stride)
        if reduced.chamber_approach:
            print("warning: chamber-wall approach, trajectory truncated",
                  file=sys.stderr)
    if args.method in ("exact", "both"):
        fact, _ = assemble(point, params)
        times = reduced.times if reduced is not None else \
            np.concatenate([[0.0], (np.arange(1, n_steps + 1) * args.dt)[
                [min(k, n_steps - 1) for k in range(stride - 1, n_steps, stride)]]])
        exact = project_flow(fact.g, params, times)

    primary = reduced if reduced is not None else exact
    if args.output:
        _emit(trajectory_csv_text(primary), args.output)
        if args.method == "both":
            base, ext = os.path.splitext(args.output)
            _emit(trajectory_csv_text(exact), base + ".exact" + ext)
    elif args.method != "both":
        sys.stdout.write(trajectory_csv_text(primary))

    if args.method == "both":
        dev = compare_trajectories(reduced, exact)
        payload = dev.to_dict()
        payload["tol"] = args.tol
        payload["pass"] = dev.q_dev < args.tol and dev.p_dev < args.tol
        sys.stdout.write(_json_text(payload))
        return 0 if payload["pass"] else 2
    return 0


def cmd_involution(args) -> int:
    params = make_params(args.alpha, args.x, args.y, args.n)
    rng = np.random.default_rng(args.seed)
    # bounded positions keep the higher traces small enough for the
    # absolute bracket tolerance to be meaningful in double precision
    pts = [random_admissible_point(rng, params, q_range=(-0.95, 0.95),
                                   margin_factor=1.2, max_stretch=0)
           for _ in range(args.points)]
    rep = involution_report(params, pts, max_order=args.max_order)
    payload = rep.to_dict()
    payload.update({"alpha": params.alpha, "x": params.x, "y": params.y,
                    "n": params.n, "points": args.points, "seed": args.seed,
                    "tol": args.tol, "pass": rep.max_abs < args.tol})
    _emit(_report_text(payload, args.format), args.output)
    return 0 if payload["pass"] else 2


def cmd_limit(args) -> int:
    lp = LimitParams(xi=args.xi, eta=args.eta, zeta=args.zeta)
    rng = np.random.default_rng(args.seed)
    if args.q is not None:
        q = _parse_vector(args.q)
    else:
        gaps = rng.uniform(0.55, 1.0, size=args.n - 1)
        q = rng.uniform(-0.4, 1.2) - np.concatenate([[0.0], np.cumsum(gaps)])
    pi_vec = _parse_vector(args.pi) if args.pi is not None \
        else rng.uniform(-0.7, 0.7, size=args.n)
    if q.size != args.n or pi_vec.size != args.n:
        raise InvalidInput(f"--q/--pi must have n={args.n} entries")
    t_grid = _parse_vector(args.t_grid) if args.t_grid is not None \
        else np.geomspace(5e-5, 5e-3, 8)
    rep = limit_convergence(q, pi_vec, lp, t_grid=t_grid)
    payload = rep.to_dict()
    payload.update({"xi": lp.xi, "eta": lp.eta, "zeta": lp.zeta,
                    "n": args.n, "q": q.tolist(), "pi": pi_vec.tolist(),
                    "seed": args.seed})
    _emit(_report_text(payload, args.format), args.output)
    return 0 if rep.passes else 2


def _add_model_flags(sp, defaults=True):
    sp.add_argument("--n", type=int, default=2, help="particle count")
    sp.add_argument("--alpha", type=float, default=0.5, help="deformation parameter")
    sp.add_argument("--x", type=float, default=1.0, help="right scale parameter")
    sp.add_argument("--y", type=float, default=1.0, help="left scale parameter")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bcn",
        description="Hyperbolic Ruijsenaars-type model: verification, "
                    "simulation, involution and limit workflows")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    common = dict(seed=("--seed", dict(type=int, default=0, help="RNG seed")),
                  output=("--output", dict(default=None, help="output file (default stdout)")),
                  fmt=("--format", dict(dest="format", choices=("json", "csv"),
                                        default="json", help="report format")),
                  config=("--config", dict(default=None,
                                           help="JSON file with flag defaults")))

    sp = sub.add_parser("verify", help="random-point constraint residual suite")
    _add_model_flags(sp)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-10)
    for flag, kw in common.values():
        sp.add_argument(flag, **kw)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="trajectory CSV (reduced/exact/both)")
    _add_model_flags(sp)
    sp.add_argument("--q", default=None, help="comma-separated initial positions")
    sp.add_argument("--p", default=None, help="comma-separated initial momenta")
    sp.add_argument("--t-max", dest="t_max", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--method", choices=("reduced", "exact", "both"),
                    default="reduced")
    sp.add_argument("--integrator", choices=("rk4", "rk45"), default="rk4")
    sp.add_argument("--sample-count", dest="sample_count", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-6,
                    help="deviation tolerance for --method both")
    for flag, kw in common.values():
        sp.add_argument(flag, **kw)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("involution", help="Poisson-bracket matrix of the family")
    _add_model_flags(sp)
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--max-order", dest="max_order", type=int, default=3)
    sp.add_argument("--tol", type=float, default=1e-5)
    for flag, kw in common.values():
        sp.add_argument(flag, **kw)
    sp.set_defaults(func=cmd_involution)

    sp = sub.add_parser("limit", help="cotangent-bundle limit convergence report")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--xi", type=float, default=0.3)
    sp.add_argument("--eta", type=float, default=-0.2)
    sp.add_argument("--zeta", type=float, default=0.4)
    sp.add_argument("--q", default=None, help="comma-separated positions")
    sp.add_argument("--pi", default=None, help="comma-separated momentum rates")
    sp.add_argument("--t-grid", dest="t_grid", default=None,
                    help="comma-separated scale grid")
    for flag, kw in common.values():
        sp.add_argument(flag, **kw)
    sp.set_defaults(func=cmd_limit)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv):
    """Load --config JSON (if any) as parser defaults; flags override."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise InvalidInput("--config needs a file path")
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise InvalidInput("config file must hold a JSON object")
    sub = cfg.pop("subcommand", None)
    if sub is not None and argv and argv[0] != sub:
        raise InvalidInput(f"config is for subcommand {sub!r}, got {argv[0]!r}")
    for action in ap._subparsers._group_actions[0].choices.values():  # noqa: SLF001
        known = {a.dest for a in action._actions}  # noqa: SLF001
        action.set_defaults(**{k: v for k, v in cfg.items() if k in known})
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        argv = _apply_config(ap, argv)
        args = ap.parse_args(argv)
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BCNError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
