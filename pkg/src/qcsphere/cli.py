"""Command-line front end: ``qcsphere {param,remesh,metrics,gen}``.

Exit status: 0 success, 1 invalid input or validation failure, 2 solver
failure, 3 non-manifold induced mesh. The thread count of the numerical
libraries can be capped with the ``QCSPHERE_NUM_THREADS`` environment
variable.
"""

import argparse
import csv
import logging
import os
import sys
import warnings

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .exceptions import NonManifoldError, SolverError, StageError
from .io import load_mesh, read_dilation_csv, save_mesh, write_face_selection
from .param import fsqc_parameterize, spherical_conformal_init, verify_dilation
from .remesh import RegionSpec, read_region_spec, remesh_pipeline, write_region_spec
from .shapes import ellipsoid, icosphere, ridge_ellipsoid, ridge_region
from .solver import RTOL

THREADS_ENV = "QCSPHERE_NUM_THREADS"


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _exit_code(exc):
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, NonManifoldError):
        return 3
    if isinstance(cause, (SolverError, RuntimeError, ArithmeticError)):
        return 2
    return 1


def _fmt(v):
    if v is None:
        return "n/a"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_report(path, rows):
    """``statistic,value`` CSV; the first data row is the tool version."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["statistic", "value"])
        w.writerow(["version", f"qcsphere {__version__}"])
        for k, v in rows:
            w.writerow([k, _fmt(v)])


def write_histogram(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        e = report.hist_edges
        for lo, hi, c in zip(e[:-1], e[1:], report.hist_counts):
            w.writerow([_fmt(lo), _fmt(hi), int(c)])


def _load(path):
    if not os.path.exists(path):
        raise CliError(f"input file not found: {path}", 1)
    return load_mesh(path)


def cmd_param(args):
    mesh = _load(args.input)
    if args.dilation is not None:
        K = read_dilation_csv(args.dilation, mesh.n_faces)
    else:
        if not args.uniform_k >= 1:
            raise CliError("K must be >= 1", 1)
        K = float(args.uniform_k)
    sph = fsqc_parameterize(mesh, K, direction=args.direction, method=args.method, rtol=args.rtol)
    save_mesh(sph.as_mesh(), args.out)
    rep = sph.report
    print(rep.summary())
    if args.report:
        write_report(args.report, rep.rows() + [("outlying_vertices", sph.n_outlying)])
    if args.hist:
        write_histogram(args.hist, rep)
    return 0


def _aspect_rows(prefix, res, mask):
    inside = res.region_faces(mask)
    val = float(res.aspect_ratio[inside].mean()) if len(inside) else float("nan")
    return val, [(f"{prefix}_faces", len(inside)), (f"{prefix}_mean_aspect", val)]


def cmd_remesh(args):
    mesh = _load(args.input)
    spec = read_region_spec(args.spec)
    spec.check(mesh)
    init = spherical_conformal_init(mesh)
    res = remesh_pipeline(mesh, spec, init=init, method=args.method, rtol=args.rtol)
    save_mesh(res.mesh, args.out)
    rows = [("vertices", res.mesh.n_vertices), ("faces", res.mesh.n_faces),
            ("k_region", spec.k_region), ("region_input_faces", len(spec.region)),
            ("mean_min_angle_deg", float(np.degrees(res.min_angle).mean())),
            ("mean_aspect", float(res.aspect_ratio.mean())),
            ("max_aspect", float(res.aspect_ratio.max())),
            ("param_flips", res.sphere.report.flips)]
    if len(spec.region):
        inside = np.zeros(mesh.n_vertices, dtype=bool)
        inside[np.unique(mesh.faces[spec.region])] = True
        base = remesh_pipeline(mesh, RegionSpec([], 1.0, spec.p1, spec.p2), init=init,
                               method=args.method, rtol=args.rtol)
        r_in, rows_in = _aspect_rows("region", res, inside)
        b_in, rows_bin = _aspect_rows("baseline_region", base, inside)
        r_out, rows_out = _aspect_rows("off_region", res, ~inside)
        b_out, rows_bout = _aspect_rows("baseline_off_region", base, ~inside)
        rows += rows_in + rows_bin + [("region_aspect_uplift", r_in / b_in)]
        rows += rows_out + rows_bout + [("off_region_aspect_change", r_out / b_out - 1.0)]
    print(f"{res.mesh.n_faces} faces | mean min angle {rows[4][1]:.2f} deg | "
          f"mean aspect {rows[5][1]:.4f}")
    if args.metrics:
        write_report(args.metrics, rows)
    if args.face_metrics:
        with open(args.face_metrics, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["face_index", "min_angle_deg", "aspect_ratio"])
            for i, (a, r) in enumerate(zip(np.degrees(res.min_angle), res.aspect_ratio)):
                w.writerow([i, _fmt(a), _fmt(r)])
    return 0


def cmd_metrics(args):
    src = _load(args.source)
    tgt = _load(args.target)
    if src.faces.shape != tgt.faces.shape or np.any(src.faces != tgt.faces):
        raise CliError("source and target connectivity differ", 1)
    rep = verify_dilation(src, tgt.vertices)
    print(rep.summary())
    if args.report:
        write_report(args.report, [("faces", rep.n_faces), ("mean", rep.mean), ("sd", rep.sd),
                                   ("max", rep.max), ("flips", rep.flips)])
    if args.hist:
        write_histogram(args.hist, rep)
    return 0


def cmd_gen(args):
    if args.shape == "icosphere":
        mesh = icosphere(args.level)
    elif args.shape == "ellipsoid":
        mesh = ellipsoid(tuple(args.axes), args.frequency)
    else:
        mesh = ridge_ellipsoid(tuple(args.axes), args.frequency, height=args.height)
    save_mesh(mesh, args.out)
    if args.shape == "ridge" and args.spec_out:
        region, p1, p2 = ridge_region(mesh)
        faces_path = os.path.splitext(args.spec_out)[0] + "_faces.txt"
        write_face_selection(faces_path, region)
        write_region_spec(args.spec_out, RegionSpec(region, args.k, p1, p2),
                          os.path.basename(faces_path))
    print(f"{args.shape}: {mesh.n_vertices} vertices, {mesh.n_faces} faces -> {args.out}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="qcsphere", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"qcsphere {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def solver_opts(p):
        p.add_argument("--method", choices=("direct", "cg"), default="direct")
        p.add_argument("--rtol", type=float, default=RTOL, help="solver relative residual")

    p = sub.add_parser("param", help="spherical parameterization with a target dilation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--uniform-k", type=float)
    src.add_argument("--dilation", help="face_index,K CSV")
    p.add_argument("--direction", type=int, nargs=2, metavar=("P1", "P2"))
    p.add_argument("--report")
    p.add_argument("--hist")
    solver_opts(p)
    p.set_defaults(func=cmd_param)

    p = sub.add_parser("remesh", help="remesh through a directed parameterization")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--spec", required=True, help="region spec file")
    p.add_argument("--out", required=True)
    p.add_argument("--metrics")
    p.add_argument("--face-metrics")
    solver_opts(p)
    p.set_defaults(func=cmd_remesh)

    p = sub.add_parser("metrics", help="dilation statistics between two meshes")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--report")
    p.add_argument("--hist")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("gen", help="write a synthetic test mesh")
    p.add_argument("shape", choices=("icosphere", "ellipsoid", "ridge"))
    p.add_argument("--out", required=True)
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--axes", type=float, nargs=3, default=(2.0, 1.0, 1.0))
    p.add_argument("--frequency", type=int, default=32)
    p.add_argument("--height", type=float, default=0.35)
    p.add_argument("--k", type=float, default=2.5, help="region dilation for --spec-out")
    p.add_argument("--spec-out", help="also write a region spec (ridge only)")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    threads = os.environ.get(THREADS_ENV)
    try:
        limit = int(threads) if threads else None
    except ValueError:
        print(f"error: {THREADS_ENV} must be an integer", file=sys.stderr)
        return 1
    try:
        with threadpool_limits(limits=limit), warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (StageError, NonManifoldError, SolverError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
