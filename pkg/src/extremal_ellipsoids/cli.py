"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 infeasible problem or
failed preflight, 3 verification found a violation (witness in the output).
"""

import argparse
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from .between import InBetweenFamily, sample_intersection
from .ellipsoids import (
    HPolytope,
    HomogeneousQuadric,
    dual_homogeneous,
    from_dict,
    homogeneous_is_ellipsoid,
    quadric_to_homogeneous,
    quadric_to_preimage,
    semi_axes,
    to_dict,
    to_image,
    to_quadric,
)
from .errors import EllipsoidError, PreflightError
from .sizes import as_size_function, convexity_probe, davis_agreement
from .solvers import (
    SolverConfig,
    multistart_uniqueness,
    solve_max_inscribed,
    solve_max_inscribed_fixed_center_dual,
    solve_min_enclosing,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _emit(summary, out_dir=None, stem=None, csv_text=None):
    text = dumps(summary)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{stem}.json").write_text(text + "\n", encoding="utf-8")
        if csv_text is not None:
            (out / f"{stem}.csv").write_text(csv_text, encoding="utf-8")
    print(text)


def _load_json(path):
    if path is None:
        raise UsageError("--in FILE is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _size_function(name):
    try:
        return as_size_function(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def _config(doc, args):
    overrides = dict(doc.get("config", {}))
    known = {f.name for f in fields(SolverConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    cfg = SolverConfig(**overrides)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _problem(doc, mode):
    if mode == "enclose":
        if "points" not in doc:
            raise UsageError("enclosing problems need a 'points' array")
        X = np.asarray(doc["points"], dtype=float)
        if X.ndim != 2 or X.shape[0] < 1:
            raise UsageError("'points' must be a non-empty list of equal-length coordinates")
        return X
    if "halfspaces" not in doc and "rows" not in doc:
        raise UsageError("inscribed problems need a 'halfspaces' array")
    rows = doc.get("halfspaces", doc.get("rows"))
    dims = {len(r["a"]) for r in rows}
    if len(dims) != 1:
        raise UsageError("half-space normals have inconsistent dimensions")
    return HPolytope.from_rows([(r["a"], r["b"]) for r in rows])


def _result_views(res):
    out = res.to_dict()
    try:
        out["semi_axes"] = semi_axes(res.affine).tolist()
    except EllipsoidError:
        out["semi_axes"] = None
    return out


def cmd_solve(args):
    doc = _load_json(args.inp)
    f = _size_function(args.f)
    cfg = _config(doc, args)
    problem = _problem(doc, args.mode)
    center = args.center if args.center is not None else doc.get("center")
    if center is not None:
        center = np.asarray(center, dtype=float)
        if center.shape != (problem.dim if isinstance(problem, HPolytope) else problem.shape[1],):
            raise UsageError("center dimension does not match the problem")
    if f.dim != "any":
        d = problem.dim if isinstance(problem, HPolytope) else problem.shape[1]
        if d != f.dim:
            raise UsageError(f"{f.name} is defined for d = {f.dim}, problem has d = {d}")
    if args.mode == "dual":
        if center is None:
            raise UsageError("--mode dual needs --center or a 'center' entry")
        res = solve_max_inscribed_fixed_center_dual(problem, center, f, cfg)
        _emit({"mode": "dual", "result": _result_views(res)})
        return EXIT_OK
    if args.multistart:
        rep = multistart_uniqueness(problem, f, n_starts=args.multistart, seed=cfg.seed, cfg=cfg,
                                    fixed_center=center if args.mode == "inscribe" else None)
        _emit({"mode": args.mode, "multistart": rep.to_dict()})
        return EXIT_OK
    if args.mode == "enclose":
        res = solve_min_enclosing(problem, f, cfg)
    else:
        res = solve_max_inscribed(problem, f, cfg, fixed_center=center)
    _emit({"mode": args.mode, "result": _result_views(res)})
    return EXIT_OK


_SUITES = ("1", "2", "4", "homogeneous", "strict-betweenness", "round-trip")


def cmd_verify(args):
    if args.probe is not None:
        if args.p is None:
            raise UsageError("--probe needs --p")
        _size_function(args.probe)
        vec, mat, agree = davis_agreement(args.probe, args.p, args.property, args.trials or 10_000,
                                          args.seed or 0)
        summary = {"probe": args.probe, "p": args.p, "property": args.property,
                   "vector": vec.to_dict(), "matrix": mat.to_dict(), "agree": agree}
        _emit(summary)
        return EXIT_VIOLATION if (vec.violations or mat.violations) else EXIT_OK
    if args.lemma is None:
        raise UsageError("verify needs --lemma or --probe")
    seed = args.seed or 0
    if args.lemma == "strict-betweenness":
        summary = ex.strict_betweenness(args.trials or 200, seed, args.d)
        _emit(summary)
        return EXIT_VIOLATION if summary["failures"] else EXIT_OK
    if args.lemma == "round-trip":
        summary = ex.round_trips(args.trials or 1000, seed)
        _emit(summary)
        return EXIT_VIOLATION if summary["failing_checks"] else EXIT_OK
    if args.lemma == "4" and args.d != 2:
        raise UsageError("--lemma 4 is checked in d = 2 only")
    summary = ex.verify_lemma(args.lemma, args.d, args.trials or 1000, seed, args.jobs)
    _emit(summary)
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def cmd_probe(args):
    if args.f is None or args.p is None:
        raise UsageError("probe needs --f and --p")
    _size_function(args.f)
    domains = ["positive" if args.p < 0 else "nonnegative", "matrices"]
    reports = [convexity_probe(args.f, args.p, args.property, dom, args.trials or 10_000,
                               (args.seed or 0) + i, args.d)
               for i, dom in enumerate(domains)]
    _emit({"f": args.f, "p": args.p, "property": args.property,
           "reports": [r.to_dict() for r in reports],
           "agree": reports[0].verdict == reports[1].verdict})
    return EXIT_OK


def _between_endpoint(doc, kind):
    E = from_dict(doc)
    if kind == "image":
        return to_image(E)
    if kind == "preimage":
        return quadric_to_preimage(to_quadric(E))
    if kind == "homogeneous":
        return E if isinstance(E, HomogeneousQuadric) else to_quadric(E)
    return E if isinstance(E, HomogeneousQuadric) else dual_homogeneous(E)


def cmd_between(args):
    doc = _load_json(args.inp)
    if "E0" not in doc or "E1" not in doc:
        raise UsageError("input needs 'E0' and 'E1' entries")
    try:
        E0 = _between_endpoint(doc["E0"], args.kind)
        E1 = _between_endpoint(doc["E1"], args.kind)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad endpoint: {exc}") from exc
    if args.kind == "homogeneous":
        shift = doc.get("shift")
        if shift is None:
            pts = sample_intersection(E0, E1, 200, seed=0)
            if len(pts) == 0:
                raise UsageError("homogeneous endpoints need a common interior point; pass 'shift'")
            shift = pts.mean(axis=0)
        E0 = quadric_to_homogeneous(E0, shift)
        E1 = quadric_to_homogeneous(E1, shift)
    out = {"kind": args.kind, "lam": args.lam}
    built = InBetweenFamily(args.kind, E0, E1)(args.lam)
    E, ok = built if isinstance(built, tuple) else (built, True)
    ok = ok and (not isinstance(E, HomogeneousQuadric) or homogeneous_is_ellipsoid(E))
    out["representation"] = to_dict(E)
    out["is_ellipsoid"] = bool(ok)
    if ok:
        Q = to_quadric(E)
        out["quadric"] = to_dict(Q)
        out["semi_axes"] = semi_axes(Q).tolist()
    _emit(out)
    return EXIT_OK


def cmd_repro_square(args):
    csv_text, summary = ex.repro_square(jobs=args.jobs)
    _emit(summary, args.out, "square", csv_text)
    return EXIT_OK


def cmd_repro_triangle(args):
    csv_text, summary = ex.repro_triangle(jobs=args.jobs)
    if args.modulus is not None:
        summary["moduli"] = {args.modulus: summary["moduli"][args.modulus]}
    _emit(summary, args.out, "triangle", csv_text)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="extremal-ellipsoids",
                     description="Extremal ellipsoids, in-between ellipsoids and their checks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def common(p, seed=True):
        p.add_argument("--out", help="directory for CSV/JSON outputs")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        if seed:
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--trials", type=int, default=None)

    p = sub.add_parser("solve", help="solve an extremal ellipsoid problem")
    p.add_argument("--in", dest="inp", help="JSON problem file")
    p.add_argument("--mode", choices=("enclose", "inscribe", "dual"), default="enclose")
    p.add_argument("--f", default="volume", help="size function name")
    p.add_argument("--center", type=float, nargs="+", help="fixed center (inscribe or dual)")
    p.add_argument("--multistart", type=int, default=0, help="number of starts (>= 8)")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="seeded containment and convexity checks")
    p.add_argument("--lemma", choices=_SUITES)
    p.add_argument("--d", type=int, choices=(2, 3), default=2)
    p.add_argument("--probe", help="size function for a vector/matrix convexity probe")
    p.add_argument("--p", type=float)
    p.add_argument("--property", choices=("convex", "concave"), default="convex")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("probe", help="midpoint convexity probe of f o w^p")
    p.add_argument("--f")
    p.add_argument("--p", type=float)
    p.add_argument("--property", choices=("convex", "concave"), default="convex")
    p.add_argument("--d", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("between", help="evaluate an in-between ellipsoid")
    p.add_argument("--in", dest="inp", help="JSON file with E0 and E1")
    p.add_argument("--kind", choices=("image", "preimage", "homogeneous", "dual"), default="image")
    p.add_argument("--lam", type=float, default=0.5)
    common(p, seed=False)
    p.set_defaults(func=cmd_between)

    p = sub.add_parser("repro-square", help="scan the pencil through the square's corners")
    common(p)
    p.set_defaults(func=cmd_repro_square)

    p = sub.add_parser("repro-triangle", help="scan the inscribed family of the triangle")
    p.add_argument("--modulus", choices=("eccentric", "paper"), default=None)
    common(p)
    p.set_defaults(func=cmd_repro_triangle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    if getattr(args, "trials", None) is not None and args.trials < 1:
        parser.error("--trials must be at least 1")
    if getattr(args, "multistart", 0) and args.multistart < 8:
        parser.error("--multistart needs at least 8 starts")
    if not 0.0 <= getattr(args, "lam", 0.0) <= 1.0:
        parser.error("--lam must lie in [0, 1]")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreflightError as exc:
        print(dumps({"error": str(exc), "certificate": exc.certificate}))
        return EXIT_INFEASIBLE
    except (EllipsoidError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
