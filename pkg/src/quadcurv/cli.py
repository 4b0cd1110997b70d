"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or precondition error.
Reports go to stdout as JSON; errors go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import estimates as E
from . import functional as F
from . import hypotheses as H
from . import invariants as inv
from .config import load_tolerances
from .errors import QuadCurvError
from .jsonio import dumps
from .models import CATALOG, load_model


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _model(args):
    spec = args.model_opt or args.model
    if spec is None:
        raise UsageError("a model is required (alias, inline JSON or file)")
    return load_model(spec)


def _add_model(p):
    p.add_argument("model", nargs="?", help=f"catalog alias ({', '.join(CATALOG)}), inline JSON or a JSON file")
    p.add_argument("--model", dest="model_opt", help="same as the positional model argument")


def _add_ts(p, required=True):
    p.add_argument("--t", type=float, required=required)
    p.add_argument("--s", type=float, required=required)


def cmd_invariants(args, tol):
    m = _model(args)
    pts = m.sample_points(args.points, args.seed)
    pack = m.pack_at(pts, depth=args.depth)
    res = inv.decomposition_residuals(pack)
    out = {"model": m.descriptor(), "depth": args.depth, "points": pack.records(args.full),
           "decomposition_residuals": {k: float(np.max(v)) for k, v in res.items()},
           "structural_residuals": pack.validate(), "closed_form": m.closed_form is not None}
    return out, 0


def cmd_functional(args, tol):
    m = _model(args)
    scale = 1.0
    if args.normalize:
        m, scale = m.normalize_unit_volume()
    rep = F.functional_value(m, F.FunctionalParams(args.t, args.s)).to_json()
    rep["scale"] = scale
    return rep, 0


def cmd_el_check(args, tol):
    m, scale = _model(args).normalize_unit_volume()
    p = F.FunctionalParams(args.t, args.s)
    a = F.el_residual_traceless(m, p, k=args.points, seed=args.seed, tol=tol)
    b = F.el_residual_scalar(m, p, k=args.points, seed=args.seed, tol=tol)
    out = {"model": m.descriptor(), "scale": scale, "traceless": a.to_json(), "scalar": b.to_json(),
           "critical": a.ok and b.ok}
    return out, 0 if out["critical"] else 1


def cmd_identity(args, tol):
    m = _model(args)
    p = None if args.t is None or args.s is None else F.FunctionalParams(args.t, args.s)
    rep = F.identity_check(m, args.id, p, tol=tol)
    return rep.to_json(), 1 if rep.verdict == "fail" else 0


def cmd_classify(args, tol):
    return H.classify(H.ParamPoint(args.n, args.t, args.s), tol).to_json(), 0


def cmd_scan(args, tol):
    text = H.scan_region(args.n, args.t_range, args.s_range, args.res, tol)
    rows = text.count("\n") - 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        return {"out": args.out, "rows": rows, "n": args.n}, 0
    sys.stdout.write(text)
    return None, 0


def cmd_hypothesis(args, tol):
    m = _model(args)
    rep = H.manifold_hypothesis_check(m, args.theorem, F.FunctionalParams(args.t, args.s),
                                      samples=args.samples, seed=args.seed, tol=tol,
                                      line_form=args.line_form)
    return rep.to_json(), 1 if rep.verdict == "CONTRADICTION" else 0


def cmd_fuzz(args, tol):
    rep = E.fuzz(args.estimate, args.n, args.trials, args.seed, slack=tol.estimate_slack)
    return rep, 0 if rep["ok"] else 1


def cmd_critical_search(args, tol):
    opts = {"p": args.p, "q": args.q, "n": args.n, "grid": args.grid, "modes": args.modes}
    fam = F.make_family(args.family, **opts)
    x0 = None if args.x0 is None else [float(v) for v in args.x0.split(",")]
    rep = F.restricted_critical_search(fam, F.FunctionalParams(args.t, args.s), x0, gtol=args.gtol)
    return rep, 0 if rep["converged"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="quadcurv", description="Verification lab for quadratic curvature functionals.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--tolerances", help="JSON file overriding default tolerances")
    # also accepted after the subcommand; SUPPRESS keeps the global value
    common = _Parser(add_help=False)
    common.add_argument("--tolerances", default=argparse.SUPPRESS, help="JSON file overriding default tolerances")
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)

    p = sub.add_parser("invariants", parents=[common], help="curvature pack per sampled point")
    _add_model(p)
    p.add_argument("--points", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=2, choices=[0, 1, 2])
    p.add_argument("--full", action="store_true", help="include tensor entries")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("functional", parents=[common], help="value of F_{t,s}")
    _add_model(p)
    _add_ts(p)
    p.add_argument("--normalize", action="store_true", help="rescale to unit volume first")
    p.set_defaults(func=cmd_functional)

    p = sub.add_parser("el-check", parents=[common], help="Euler-Lagrange residuals on the unit-volume model")
    _add_model(p)
    _add_ts(p)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_el_check)

    p = sub.add_parser("identity", parents=[common], help="integral identity residual")
    _add_model(p)
    p.add_argument("--id", required=True, choices=F.IDENTITIES)
    _add_ts(p, required=False)
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("classify", parents=[common], help="parameter systems satisfied by (n, t, s)")
    p.add_argument("--n", type=int, required=True)
    _add_ts(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", parents=[common], help="CSV raster of systems over a (t, s) box")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-range", required=True, help="a:b")
    p.add_argument("--s-range", required=True, help="a:b")
    p.add_argument("--res", type=int, default=101)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("hypothesis", parents=[common], help="theorem gates, margins and verdict on a model")
    _add_model(p)
    p.add_argument("--theorem", required=True, help="thm1.1 ... thm1.9")
    _add_ts(p)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--line-form", default="printed", choices=H.LINE_FORMS)
    p.set_defaults(func=cmd_hypothesis)

    p = sub.add_parser("fuzz", parents=[common], help="random search for violations of an algebraic estimate")
    p.add_argument("--estimate", required=True, choices=E.ESTIMATES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("critical-search", parents=[common], help="stationary point of F_{t,s} in a metric family")
    p.add_argument("--family", required=True, choices=F.FAMILIES)
    _add_ts(p)
    p.add_argument("--x0", help="comma-separated start point")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--n", type=int, default=3, help="conformal-torus dimension")
    p.add_argument("--grid", type=int, default=16, help="conformal-torus grid")
    p.add_argument("--modes", type=int, default=2, help="conformal-torus modes")
    p.add_argument("--gtol", type=float, default=1e-8)
    p.set_defaults(func=cmd_critical_search)
    return ap


def _fail(kind, message, **extra):
    sys.stderr.write(dumps({"error": kind, "message": message, **extra}) + "\n")
    return 2


def _join_ranges(argv):
    # "--t-range -1:1" would read -1:1 as an option; bind it as "--t-range=-1:1"
    out, it = [], iter(argv)
    for a in it:
        if a in ("--t-range", "--s-range"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = _join_ranges(sys.argv[1:] if argv is None else list(argv))
    try:
        args = ap.parse_args(argv)
    except UsageError as exc:
        return _fail("UsageError", str(exc))
    if args.cmd is None:
        ap.print_help(sys.stderr)
        return 2
    try:
        tol = load_tolerances(args.tolerances)
        out, code = args.func(args, tol)
    except UsageError as exc:
        return _fail("UsageError", str(exc))
    except QuadCurvError as exc:
        extra = {}
        for key in ("gate", "point"):
            v = getattr(exc, key, None)
            if v is not None:
                extra[key] = np.asarray(v).tolist() if key == "point" else v
        return _fail(type(exc).__name__, str(exc), **extra)
    except (OSError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc))
    if out is not None:
        if isinstance(out, dict):
            out = {**out, "tolerances": tol.as_dict()}
        sys.stdout.write(dumps(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
