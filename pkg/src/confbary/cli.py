"""Command line interface: ``confbary {barycenter,close,extend,qcdf,bench}``.

Exit codes: 0 success, 1 input error, 2 unstable input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .applications import close_polygon, douady_earle_grid
from .ensembles import EnsembleKind, EnsembleSpec
from .errors import ConvergenceError, GeometryError, UnstableMeasureError
from .harness import bench_summary, q_values, qcdf_summary, qcdf_table, run_bench
from .measure import classify_stability
from .solvers import Method, SolverConfig, Status, solve

EXIT_OK, EXIT_INPUT, EXIT_UNSTABLE, EXIT_NUMERIC = 0, 1, 2, 3
EXTEND_MIN_CONVERGED = 0.99


class InputError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from exc


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver and output")
    g.add_argument("--eps", type=float, default=1e-8, help="target error bound (default 1e-8)")
    g.add_argument("--method", choices=[m.value for m in Method], default=Method.DRNM.value)
    g.add_argument("--alpha", type=float, default=1.0, help="regularization weight")
    g.add_argument("--max-iter", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="confbary", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("barycenter", parents=[common], help="conformal barycenter of a measure file")
    p.add_argument("file", type=Path)
    p.add_argument("--start", type=_float_list, default=None, help="start point, comma separated")

    p = sub.add_parser("close", parents=[common], help="close a polygon keeping edge lengths")
    p.add_argument("file", type=Path)

    p = sub.add_parser("extend", parents=[common], help="Douady-Earle extension of a curve")
    p.add_argument("file", type=Path)
    p.add_argument("--grid", type=int, nargs=2, default=(20, 60), metavar=("N_R", "N_THETA"))
    p.add_argument("--quadrature", type=int, default=720)
    p.add_argument("--rmax", type=float, default=0.95)
    p.add_argument("--boundary", action="store_true", help="append the curve itself as outer ring")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("qcdf", parents=[common], help="empirical distribution of q")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--summary", type=Path, default=None, help="summary JSON (default stderr)")

    p = sub.add_parser("bench", parents=[common], help="iteration counts of the solvers")
    p.add_argument("--kind", choices=[k.value for k in EnsembleKind], default="uniform")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--xi", type=_float_list, default=(0.0, 0.0, 1.0))
    p.add_argument("--methods", default="drnm,ay", help="comma separated methods")
    p.add_argument("--eps-sweep", type=_float_list, default=None, help="tolerances to sweep")
    p.add_argument("--no-timing", action="store_true", help="write nan wall times")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary", type=Path, default=None, help="summary JSON (default stderr)")
    return parser


def _config(args, method=None) -> SolverConfig:
    try:
        return SolverConfig(
            method=method or args.method,
            epsilon=args.eps,
            alpha=args.alpha,
            max_iter=args.max_iter,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _read(reader, path):
    try:
        return reader(path)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except (io.FormatError, GeometryError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_barycenter(args) -> int:
    mu = _read(io.read_measure, args.file)
    cfg = _config(args)
    start = None
    if args.start is not None:
        start = np.array(args.start, dtype=float)
        if start.shape != (mu.dim,) or not np.linalg.norm(start) < 1.0:
            raise InputError("start point must lie in the open unit ball of the measure's dimension")
    res = solve(mu, start, cfg)
    doc = {
        "method": cfg.method.value,
        "barycenter": res.barycenter.tolist(),
        "error_bound": res.error_bound if math.isfinite(res.error_bound) else None,
        "iterations": res.iterations,
        "q_history": [q if math.isfinite(q) else None for q in res.trace.q_history],
        "status": res.status.value,
        "stability": classify_stability(mu).kind.value,
    }
    if res.trace.message:
        doc["message"] = res.trace.message
    _emit(io.dump_json(doc), args.out)
    if res.converged:
        return EXIT_OK
    return EXIT_UNSTABLE if res.status is Status.UNSTABLE_INPUT else EXIT_NUMERIC


def cmd_close(args) -> int:
    poly = _read(io.read_polygon, args.file)
    cfg = _config(args, Method.DRNM)
    try:
        closed = close_polygon(poly, cfg)
    except UnstableMeasureError as exc:
        _emit(io.dump_json({"status": Status.UNSTABLE_INPUT.value, "message": str(exc)}), args.out)
        return EXIT_UNSTABLE
    except ConvergenceError as exc:
        status = exc.result.status.value if exc.result is not None else "Failed"
        _emit(io.dump_json({"status": status, "message": str(exc)}), args.out)
        return EXIT_NUMERIC
    doc = io.polygon_doc(closed)
    doc["status"] = Status.CONVERGED.value
    doc["iterations"] = closed.result.iterations
    _emit(io.dump_json(doc), args.out)
    return EXIT_OK


def cmd_extend(args) -> int:
    curve = _read(io.read_curve, args.file)
    if args.out is None:
        raise InputError("extend needs --out for the mesh file")
    n_r, n_theta = args.grid
    if n_r < 1 or n_theta < 3 or args.quadrature < 3 or not 0.0 < args.rmax < 1.0:
        raise InputError("need n_r >= 1, n_theta >= 3, quadrature >= 3 and 0 < rmax < 1")
    grid = douady_earle_grid(
        curve,
        n_r,
        n_theta,
        args.quadrature,
        _config(args, Method.DRNM),
        r_max=args.rmax,
        boundary=args.boundary,
        workers=args.workers,
    )
    io.write_obj(grid.images, grid.triangles(), args.out)
    diag = {
        "n_r": grid.n_r,
        "n_theta": grid.n_theta,
        "quadrature": args.quadrature,
        "r_max": args.rmax,
        "boundary_ring": grid.boundary,
        "converged_fraction": grid.converged_fraction,
        "median_iterations": grid.median_iterations,
        "max_iterations": int(grid.solved_iterations.max()),
        "points": [
            {
                "index": i,
                "param": z.tolist(),
                "iterations": int(k),
                "status": s,
                "error_bound": b if math.isfinite(b) else None,
            }
            for i, (z, k, s, b) in enumerate(
                zip(grid.params, grid.iterations, grid.status, grid.error_bounds.tolist())
            )
        ],
    }
    io.dump_json(diag, sidecar_path(args.out))
    return EXIT_OK if grid.converged_fraction >= EXTEND_MIN_CONVERGED else EXIT_NUMERIC


def sidecar_path(mesh: Path) -> Path:
    return mesh.with_name(mesh.stem + ".diagnostics.json")


def _csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _summary(doc, path):
    text = io.dump_json(doc)
    if path is None:
        sys.stderr.write(text)
    else:
        path.write_text(text)


def cmd_qcdf(args) -> int:
    if args.n < 1 or args.d < 2 or args.samples < 1:
        raise InputError("need n >= 1, d >= 2 and samples >= 1")
    q = q_values(args.n, args.d, args.samples, args.seed)
    qs, ecdf = qcdf_table(q)
    rows = ((io.SCHEMA_VERSION, k, repr(float(a)), repr(float(b))) for k, (a, b) in enumerate(zip(qs, ecdf)))
    _emit(_csv(("schema_version", "index", "q", "ecdf"), rows), args.out)
    summary = {"n": args.n, "d": args.d, "seed": args.seed, **qcdf_summary(q)}
    _summary(summary, args.summary)
    return EXIT_OK


BENCH_HEADER = (
    "schema_version",
    "method",
    "eps",
    "index",
    "iterations",
    "status",
    "error_bound",
    "wall_time_s_nonreproducible",
)


def cmd_bench(args) -> int:
    try:
        spec = EnsembleSpec(
            kind=args.kind,
            n=args.n,
            d=args.d,
            N=args.samples,
            seed=args.seed,
            kappa=args.kappa,
            xi=tuple(args.xi),
        )
        methods = [Method(m.strip()) for m in args.methods.split(",") if m.strip()]
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    eps_list = args.eps_sweep or [args.eps]
    if any(not e > 0.0 for e in eps_list):
        raise InputError("tolerances must be positive")
    rows = run_bench(spec, methods, eps_list, _config(args), not args.no_timing, args.workers)
    table = (
        (io.SCHEMA_VERSION, r["method"], repr(r["eps"]), r["index"], r["iterations"], r["status"],
         repr(r["error_bound"]), repr(r["wall_time_s"]))
        for r in rows
    )
    _emit(_csv(BENCH_HEADER, table), args.out)
    _summary(
        {"kind": spec.kind.value, "n": spec.n, "d": spec.d, "seed": spec.seed, "groups": bench_summary(rows)},
        args.summary,
    )
    return EXIT_OK


COMMANDS = {
    "barycenter": cmd_barycenter,
    "close": cmd_close,
    "extend": cmd_extend,
    "qcdf": cmd_qcdf,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        sys.stderr.write(f"confbary {args.command}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
