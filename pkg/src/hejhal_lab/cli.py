"""Command-line surface: domain configs in, reports and tables out.

Subcommands
-----------
verify   <config> [--out report.json]             full invariant suite
lambda   <config> --method M --out lambda.csv     lambda matrix and eigenvalues
sweep    <config> --steps S --out trace.csv       shrinking-hole eigenvalue trace
tabulate <config> --kernel X --grid G --out table.csv   kernel values on a grid

Exit codes: 0 all checks pass, 1 at least one check failed, 2 invalid
input (config file, schema, or flags), 3 numerical/solver failure.

The config is the JSON domain format {"curves": [{"role", "coeffs"}, ...]}
with optional keys: "N" (nodes per curve, even, default 256), "seed"
(default 42), "tolerances" (name -> positive float overrides for verify),
"cuts" ({"anchors": [[t_outer, t_inner], ...]} or "auto"), "w" ([re, im]
kernel parameter point for tabulate), "j" (1-based harmonic-measure index
for tabulate --kernel F).

The environment variable HEJHAL_LAB_THREADS caps the numeric thread pools;
it is applied by the package __init__ before the linear-algebra stack
loads.  All numeric output is formatted with %.17g, so identical config and
seed give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import geometry, hejhal
from .errors import (
    CutConstructionFailed,
    CurveNesting,
    DegenerateCurve,
    HejhalLabError,
    SelfIntersectingCurve,
    UnderResolved,
)
from .periods import Workspace

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL = 3

_GEOMETRY_ERRORS = (SelfIntersectingCurve, CurveNesting, DegenerateCurve,
                    UnderResolved)


class InputError(Exception):
    """Invalid configuration or command arguments (exit code 2)."""


# --------------------------------------------------------------------------
# config handling
# --------------------------------------------------------------------------

def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or "curves" not in cfg:
        raise InputError(f"config {path} must be an object with a "
                         f"'curves' list")
    return cfg


def _prepare(path):
    """Config dict -> (cfg, domain, N, seed, tolerance overrides, cuts)."""
    cfg = _load_config(path)
    try:
        dom = geometry.domain_from_config(cfg)
    except _GEOMETRY_ERRORS as exc:
        raise InputError(f"invalid domain: {exc}") from exc
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed curve config: {exc}") from exc

    N = cfg.get("N", geometry.DEFAULT_N)
    if not isinstance(N, int) or isinstance(N, bool) or N <= 0 or N % 2:
        raise InputError(f"N must be a positive even integer, got {N!r}")

    seed = cfg.get("seed", 42)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise InputError(f"seed must be an integer, got {seed!r}")

    tol = cfg.get("tolerances", {})
    if not isinstance(tol, dict):
        raise InputError("'tolerances' must be an object of name -> value")
    for name, value in tol.items():
        if name not in hejhal.DEFAULT_TOLERANCES:
            raise InputError(f"unknown tolerance name {name!r}")
        if not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not value > 0:
            raise InputError(f"tolerance {name!r} must be > 0, got {value!r}")

    cuts = None
    cuts_cfg = cfg.get("cuts", "auto")
    if isinstance(cuts_cfg, dict) and cuts_cfg.get("anchors", "auto") != "auto":
        anchors = cuts_cfg["anchors"]
        try:
            cuts = geometry.build_cuts(dom, anchors=anchors)
        except (CutConstructionFailed, TypeError, ValueError) as exc:
            raise InputError(f"cut anchors rejected: {exc}") from exc
    elif cuts_cfg != "auto" and not isinstance(cuts_cfg, dict):
        raise InputError(f"'cuts' must be \"auto\" or an anchors object, "
                         f"got {cuts_cfg!r}")

    return cfg, dom, N, seed, tol, cuts


def _workspace(dom, N, cuts):
    try:
        return Workspace(dom, N=N, cuts=cuts)
    except UnderResolved as exc:
        raise InputError(f"grid rejected: {exc}") from exc


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _g(value):
    return f"{float(value):.17g}"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_verify(args):
    cfg, dom, N, seed, tol, cuts = _prepare(args.config)
    ws = _workspace(dom, N, cuts)
    checks, _ctx = hejhal.verify_suite(ws, seed=seed, tolerances=tol or None)
    report = {
        "connectivity": dom.n,
        "N": N,
        "seed": seed,
        "checks": checks,
        "all_pass": all(c["pass"] for c in checks),
    }
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if report["all_pass"] else EXIT_CHECK_FAILED


_METHOD_SETS = {
    "fit": ("fit",),
    "periods": ("H",),
    "double": ("double",),
    "all": ("fit", "H", "double"),
}
_METHOD_ORDER = ("fit", "H-periods", "double-periods")


def cmd_lambda(args):
    cfg, dom, N, seed, tol, cuts = _prepare(args.config)
    if dom.n < 2:
        raise InputError("connectivity must be >= 2")
    ws = _workspace(dom, N, cuts)
    lams, _devs = hejhal.lambda_all_methods(
        ws, methods=_METHOD_SETS[args.method], seed=seed)
    rows = ["kind,method,i,j,value"]
    for name in _METHOD_ORDER:
        if name not in lams:
            continue
        M = lams[name].matrix
        for i in range(M.shape[0]):
            for j in range(i, M.shape[1]):
                rows.append(f"lambda,{name},{i + 1},{j + 1},{_g(M[i, j])}")
        for k, mu in enumerate(lams[name].eigenvalues()):
            rows.append(f"mu,{name},{k + 1},{k + 1},{_g(mu)}")
    _write(args.out, "\n".join(rows) + "\n")
    return EXIT_PASS


def cmd_sweep(args):
    cfg, dom, N, seed, tol, cuts = _prepare(args.config)
    if args.steps <= 0:
        raise InputError(f"steps must be >= 1, got {args.steps}")
    ws = _workspace(dom, N, cuts)
    if dom.n == 1:
        ks = list(dom.outer.ks)
        center = complex(dom.outer.coeffs[ks.index(0)]) if 0 in ks else 0.0j
    else:
        pts = ws.interior_points(64, margin=0.08, seed=seed)
        center = complex(pts[int(np.argmax(dom.boundary_distance(pts)))])
    depth = float(dom.boundary_distance(np.array([center]))[0])
    radii = geometry.radius_schedule(0.35 * depth, args.steps)
    family = geometry.shrinking_hole_family(dom, [center] * args.steps, radii)
    trace = hejhal.homotopy_sweep(family, N=N, seed=seed)

    m = dom.n                      # every family member has n + 1 curves
    header = ("step,radius,center_re,center_im,"
              + ",".join(f"mu_{k}" for k in range(1, m + 1))
              + ",min_mu,status")
    rows = [header]
    for rec in trace.steps:
        mus = np.asarray(rec["eigenvalues"], dtype=float)
        cells = [str(rec["step"]), _g(rec["radius"]),
                 _g(rec["center"].real), _g(rec["center"].imag)]
        cells += [_g(mus[k]) if k < mus.size else "" for k in range(m)]
        cells.append("" if not np.isfinite(rec["min_eig"])
                     else _g(rec["min_eig"]))
        cells.append(rec["status"])
        rows.append(",".join(cells))
    _write(args.out, "\n".join(rows) + "\n")

    if trace.failed_steps:
        return EXIT_NUMERICAL
    if not trace.all_positive:
        return EXIT_CHECK_FAILED
    return EXIT_PASS


def cmd_tabulate(args):
    cfg, dom, N, seed, tol, cuts = _prepare(args.config)
    if args.grid < 2:
        raise InputError(f"grid must be >= 2, got {args.grid}")
    ws = _workspace(dom, N, cuts)
    diam = dom.diameter

    zb, _ = dom.boundary_nodes()
    xs = np.linspace(zb.real.min(), zb.real.max(), args.grid)
    ys = np.linspace(zb.imag.min(), zb.imag.max(), args.grid)
    XX, YY = np.meshgrid(xs, ys, indexing="ij")
    cand = (XX + 1.0j * YY).ravel()
    keep = dom.contains(cand) & (dom.boundary_distance(cand) > 1e-3 * diam)
    pts = cand[keep]
    if pts.size == 0:
        raise InputError("no admissible grid points inside the domain")

    if "w" in cfg:
        wspec = cfg["w"]
        try:
            w = complex(float(wspec[0]), float(wspec[1]))
        except (TypeError, ValueError, IndexError) as exc:
            raise InputError(f"'w' must be a [re, im] pair: {exc}") from exc
        if not bool(dom.contains(np.array([w]))[0]) or \
                float(dom.boundary_distance(np.array([w]))[0]) \
                < ws.safe_distance():
            raise InputError(f"parameter point w = {w} is outside the domain "
                             f"or too close to its boundary")
    else:
        w = complex(pts[int(np.argmax(dom.boundary_distance(pts)))])

    kernel = args.kernel
    if kernel == "F":
        j = cfg.get("j", 1)
        if not isinstance(j, int) or isinstance(j, bool) or \
                not 1 <= j <= dom.n - 1:
            raise InputError(f"'j' must be in 1..{dom.n - 1}, got {j!r}")
        vals = ws.measures[j - 1].fprime(pts)
        w_re, w_im = float(j), 0.0
        pairs = zip(pts, vals)
    else:
        if kernel in ("L", "Lambda"):
            sel = np.abs(pts - w) > 1e-9 * diam     # diagonal pole
            pts = pts[sel]
        if kernel == "S":
            vals = ws.field(w).szego(pts)
        elif kernel == "L":
            vals = ws.field(w).garabedian(pts)
        elif kernel == "K":
            vals = ws.green(w).bergman(pts)
        else:                                       # Lambda
            vals = ws.green(w).adjoint(pts)
        w_re, w_im = w.real, w.imag
        pairs = zip(pts, vals)

    rows = ["z_re,z_im,w_re,w_im,value_re,value_im"]
    for z, v in pairs:
        rows.append(f"{_g(z.real)},{_g(z.imag)},{_g(w_re)},{_g(w_im)},"
                    f"{_g(v.real)},{_g(v.imag)}")
    _write(args.out, "\n".join(rows) + "\n")
    return EXIT_PASS


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hejhal-lab",
        description="Kernel functions and Schottky-double periods on "
                    "multiply connected planar domains.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the full invariant suite")
    p.add_argument("config")
    p.add_argument("--out", default=None, metavar="report.json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lambda", help="lambda matrix and eigenvalues")
    p.add_argument("config")
    p.add_argument("--method", required=True,
                   choices=("fit", "periods", "double", "all"))
    p.add_argument("--out", required=True, metavar="lambda.csv")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("sweep", help="eigenvalues along a shrinking-hole "
                                     "family")
    p.add_argument("config")
    p.add_argument("--steps", required=True, type=int)
    p.add_argument("--out", required=True, metavar="trace.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tabulate", help="kernel values on an interior grid")
    p.add_argument("config")
    p.add_argument("--kernel", required=True,
                   choices=("S", "L", "K", "Lambda", "F"))
    p.add_argument("--grid", required=True, type=int)
    p.add_argument("--out", required=True, metavar="table.csv")
    p.set_defaults(func=cmd_tabulate)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (HejhalLabError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
