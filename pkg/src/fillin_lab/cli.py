"""Command-line front end.

Every subcommand builds a JSON-serializable record, optionally over a
parameter sweep, and writes it as JSON (17 significant digits) or CSV.

Exit codes: 0 success, 1 failed validation, 2 precondition error,
3 numerical failure, 64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .acceptance import validate_suite
from .errors import FillinError, NumericalFailure, PreconditionError
from .manifold import AxisymS2, Round, lambda1, metric_from_dict
from .necks import (FD_TOL, build_cap_neck, build_isotopy_neck, build_schwarzschild_neck,
                    rescale_neck)
from .paths import path_from_spec, path_norms
from .quasispherical import (STEP_RATIO, STEP_RATIO_NEAR_1, BartnikData, build_base,
                             h0_threshold, mass_upper_bound, nnsc_fillin_test, run_flow)
from .theta import (decay_curve, fillin_lower_bound, spectral_lower_bound, theta_closed_form)

EXIT_OK, EXIT_VALIDATE, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 1, 2, 3
EXIT_USAGE, EXIT_IO = 64, 74


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = "%.17g" % x
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if hasattr(obj, "to_dict"):
        return to_json(obj.to_dict(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    return "" if v is None else str(v)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------------------------
# inputs
# --------------------------------------------------------------------------

def _load_data(args) -> BartnikData:
    if getattr(args, "data", None):
        data = BartnikData.from_json(args.data)
    else:
        data = BartnikData(args.n, Round(args.n, 1.0), 1.0 if args.H is None else args.H)
    if getattr(args, "H", None) is not None:
        data = BartnikData(data.n, data.metric, float(args.H))
    return data


def _load_metric(args):
    if getattr(args, "data", None):
        return BartnikData.from_json(args.data).metric
    if getattr(args, "metric", None):
        with open(args.metric, encoding="utf-8") as fh:
            return metric_from_dict(json.load(fh))
    if getattr(args, "ellipsoid", None) is not None:
        return AxisymS2.ellipsoid(args.ellipsoid, args.nx)
    return Round(args.n, args.radius)


def _settings(**kw) -> dict:
    return {"version": __version__, **kw}


# --------------------------------------------------------------------------
# commands: each returns a JSON-serializable record
# --------------------------------------------------------------------------

def cmd_neck_schwarzschild(args):
    neck = build_schwarzschild_neck(args.n, args.H, args.h, args.tau2)
    rec = {"neck": neck.to_dict(), "residuals": neck.residuals,
           "settings": _settings(fd_tol=FD_TOL, root_tol="machine precision")}
    rec.update({"m": neck.m, "r1": neck.r1, "r2": neck.r2})
    if args.eps is not None:
        res = rescale_neck(args.n, Round(args.n, 1.0), args.H, args.h, args.eps, nr=args.nr)
        rec["rescaled"] = res.to_dict()
        rec["settings"]["nr"] = args.nr
    return rec


def cmd_neck_cap(args):
    neck = build_cap_neck(args.n, args.lam, args.theta, args.eps)
    return {**neck.to_dict(), "settings": _settings(root_tol="machine precision")}


def cmd_neck_isotopy(args):
    path = path_from_spec(args.path, Round(args.n, 1.0))
    neck = build_isotopy_neck(path, args.eps0, args.c0, nt=args.nt, verify_fd=not args.no_fd)
    return {**neck.to_dict(), "settings": _settings(nt=args.nt, fd_tol=FD_TOL)}


def _base_for(args, data: BartnikData):
    path = path_from_spec(args.path, data.metric)
    return build_base(path, args.eps, s_max=args.s_max)


def cmd_flow(args):
    data = _load_data(args)
    base = _base_for(args, data)
    g1 = base.geometry(1.0)
    u1 = g1.gamma.field(args.u1) if args.u1 is not None else g1.Hbar / data.H
    flow = run_flow(base, u1, seed=args.seed)
    rep = mass_upper_bound(base, u1, flow=flow)
    rec = {"base": base.to_dict(), "flow": flow.to_dict(), "mass_report": rep.to_dict(),
           "settings": _settings(step_ratio=STEP_RATIO, step_ratio_near_1=STEP_RATIO_NEAR_1,
                                 newton_tol=1e-13, slices=int(flow.s.size),
                                 slice_points=int(flow.u.shape[1]), seed=args.seed)}
    if args.csv:
        rows = [{"s": s, "u_min": u.min(), "u_max": u.max(), "I": I}
                for s, u, I in zip(flow.s, flow.u, flow.I)]
        try:
            _emit(to_csv(rows, ["s", "u_min", "u_max", "I"]), args.csv)
        except OSError as exc:
            raise _IOFailure(str(exc)) from exc
    return rec


def cmd_mass_bound(args):
    data = _load_data(args)
    base = _base_for(args, data)
    u1 = base.geometry(1.0).Hbar / data.H
    rep = mass_upper_bound(base, u1, run=args.run_flow)
    return {**rep.to_dict(), "settings": _settings(seed=args.seed)}


def cmd_h0(args):
    return {"h0": h0_threshold(args.n, args.eps, args.s0), "n": args.n, "eps": args.eps, "s0": args.s0}


def cmd_nnsc_test(args):
    data = _load_data(args)
    path = path_from_spec(args.path, data.metric)
    rep = nnsc_fillin_test(data, path, args.eps, s_max=args.s_max, run=args.run_flow)
    return {**rep.to_dict(), "H": float(np.max(data.H)), "settings": _settings(seed=args.seed)}


def cmd_theta_closed(args):
    return theta_closed_form(args.n, args.H).to_dict()


def cmd_theta_decay(args):
    H = np.geomspace(args.H0, args.H0 * args.span, args.points)
    b = decay_curve(args.n, args.H0, args.theta, H)
    return b


def cmd_theta_lower(args):
    if args.spectral:
        return spectral_lower_bound(_load_metric(args)).to_dict()
    return fillin_lower_bound(args.n, args.minR, args.maxH).to_dict()


def cmd_lambda1(args):
    metric = _load_metric(args)
    lam, _ = lambda1(metric)
    return {"lambda1": lam, "min_R": float(np.min(metric.scalar_curvature())),
            "settings": _settings(tol=1e-8, points=int(metric.size))}


def cmd_path_build(args):
    path = path_from_spec(args.spec, Round(args.n, 1.0))
    norms = path_norms(path)
    return {**path.to_dict(), "norms": {"sup_d1": norms.sup_d1, "sup_d2": norms.sup_d2,
                                               "sup_R": norms.sup_R},
            "settings": _settings(nt=int(path.t.size))}


class _IOFailure(Exception):
    pass


SWEEP_COLUMNS = {"nnsc-test": ["bracket", "verdict"]}


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise UsageError(f"sweep grid must be lo:hi:step, got {spec!r}") from exc
    if not step > 0 or hi < lo:
        raise UsageError("sweep needs step > 0 and hi >= lo")
    k = int(math.floor((hi - lo) / step + 1e-9))
    return np.array([lo + i * step for i in range(k + 1)])


def _run_point(handler, args, name: str, value: float):
    a = copy.deepcopy(args)
    setattr(a, name, value)
    rec = handler(a)
    return rec.to_dict() if hasattr(rec, "to_dict") else rec


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("FILLIN_LAB_WORKERS")
    return max(1, int(env)) if env else 1


def _sweep(handler, args):
    name_raw, grid_spec = args.sweep
    name = name_raw.replace("-", "_")
    if not hasattr(args, name):
        raise UsageError(f"{args.command} has no parameter {name_raw!r}")
    grid = _parse_grid(grid_spec)
    workers = _workers(args)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_run_point, handler, args, name, float(v)) for v in grid]
            recs = [f.result() for f in futs]
    else:
        recs = [_run_point(handler, args, name, float(v)) for v in grid]
    cols = SWEEP_COLUMNS.get(args.command)
    if cols is None:
        cols = [k for k, v in recs[0].items()
                if isinstance(v, (int, float, str, bool, np.floating)) and k != name]
    rows = [{name_raw: float(v), **r} for v, r in zip(grid, recs)]
    return rows, [name_raw, *cols]


def cmd_validate(args):
    results = validate_suite(args.filter, stress=args.stress)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed"
          + (" (stress mode: tolerances x 0.01)" if args.stress else ""))
    if args.out:
        _emit(to_json({"passed": ok, "stress": args.stress, "criteria": [r.to_dict() for r in results]}),
              args.out)
    return ok


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, sweep: bool = True) -> None:
    p.add_argument("--out", help="output file (.csv for CSV, JSON otherwise); stdout if absent")
    p.add_argument("--format", choices=("json", "csv"), help="override the output format")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized fallbacks")
    if sweep:
        p.add_argument("--sweep", nargs=2, metavar=("NAME", "LO:HI:STEP"),
                       help="sweep a numeric parameter over an inclusive grid")
        p.add_argument("--workers", type=int, help="parallel sweep workers (env FILLIN_LAB_WORKERS)")


def _data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="Bartnik data JSON")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--H", type=float, help="constant mean curvature (overrides the data)")
    p.add_argument("--path", default="const", help="const | round-radius:R0:R1 | ecc:E | ecc-bump:E | file.json")
    p.add_argument("--eps", type=float, default=0.1, help="target second-fundamental-form deviation")
    p.add_argument("--s-max", type=float, dest="s_max")


def _metric_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="Bartnik data JSON (metric part is used)")
    p.add_argument("--metric", help="metric JSON as written by to_dict")
    p.add_argument("--ellipsoid", type=float, help="ellipsoid of revolution with this polar semi-axis")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=401)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fillin-lab", description="Fill-in bounds, necks and quasi-spherical flows.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("neck-schwarzschild", help="Schwarzschild neck between H and h")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--tau2", type=float, default=1.0)
    p.add_argument("--eps", type=float, help="also build the rescaled neck with this slack")
    p.add_argument("--nr", type=int, default=401)
    _common(p)
    p.set_defaults(handler=cmd_neck_schwarzschild)

    p = sub.add_parser("neck-cap", help="spherical-cap neck")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    _common(p)
    p.set_defaults(handler=cmd_neck_cap)

    p = sub.add_parser("neck-isotopy", help="isotopy neck along a metric path")
    p.add_argument("--path", default="ecc:1.05")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--eps0", type=float, default=0.1)
    p.add_argument("--c0", type=float, default=0.05)
    p.add_argument("--nt", type=int, default=481)
    p.add_argument("--no-fd", action="store_true", help="skip the finite-difference verification")
    _common(p)
    p.set_defaults(handler=cmd_neck_isotopy)

    p = sub.add_parser("flow", help="solve the quasi-spherical flow")
    _data_args(p)
    p.add_argument("--u1", type=float, help="constant initial lapse (default Hbar_1 / H)")
    p.add_argument("--csv", help="write s, u_min, u_max, I per slice")
    _common(p)
    p.set_defaults(handler=cmd_flow)

    p = sub.add_parser("mass-bound", help="mass upper bound for u1 = Hbar_1 / H")
    _data_args(p)
    p.add_argument("--run-flow", action="store_true", help="also solve the flow (ADM and slice bounds)")
    _common(p)
    p.set_defaults(handler=cmd_mass_bound)

    p = sub.add_parser("h0", help="threshold h0(n, eps, s0)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--s0", type=float, required=True)
    _common(p)
    p.set_defaults(handler=cmd_h0)

    p = sub.add_parser("nnsc-test", help="non-fill-in test with the mass bound")
    _data_args(p)
    p.add_argument("--run-flow", action="store_true")
    _common(p)
    p.set_defaults(handler=cmd_nnsc_test)

    p = sub.add_parser("theta-closed", help="closed-form theta for round data (n = 2, 3)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--json", action="store_true", help="print the full record instead of the value")
    _common(p)
    p.set_defaults(handler=cmd_theta_closed)

    p = sub.add_parser("theta-decay", help="exponential-decay envelope and iterates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--H0", type=float, required=True)
    p.add_argument("--theta", type=float, required=True, help="theta at H0 (or an upper bound)")
    p.add_argument("--span", type=float, default=1e3, help="grid covers [H0, span * H0]")
    p.add_argument("--points", type=int, default=200)
    _common(p, sweep=False)
    p.set_defaults(handler=cmd_theta_decay)

    p = sub.add_parser("theta-lower", help="fill-in lower bound (curvature or spectral)")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--minR", type=float)
    p.add_argument("--maxH", type=float, default=0.0)
    p.add_argument("--spectral", action="store_true", help="use 2 lambda_1 of the metric")
    _metric_args(p)
    _common(p)
    p.set_defaults(handler=cmd_theta_lower)

    p = sub.add_parser("lambda1", help="first eigenvalue of -Lap + R/2")
    p.add_argument("--n", type=int, default=3)
    _metric_args(p)
    _common(p)
    p.set_defaults(handler=cmd_lambda1)

    p = sub.add_parser("path-build", help="build a metric path and report its norms")
    p.add_argument("--spec", required=True, help="const | round-radius:R0:R1 | ecc:E | ecc-bump:E")
    p.add_argument("--n", type=int, default=3)
    _common(p, sweep=False)
    p.set_defaults(handler=cmd_path_build)

    p = sub.add_parser("validate", help="run the acceptance battery")
    p.add_argument("--filter", help="substring of a criterion name, a tag or an index")
    p.add_argument("--stress", action="store_true", help="tighten every tolerance by 100")
    p.add_argument("--out", help="JSON report file")
    p.set_defaults(handler=None)
    return ap


def _write_record(args, rec) -> None:
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    if fmt == "csv":
        if hasattr(rec, "write_csv") and getattr(rec, "kind", None) == "DecayCurve":
            c = rec.curve
            rows = [{"H": h, "envelope": e, "iterate": i}
                    for h, e, i in zip(c["H"], c["envelope"], c["iterate"])]
            _emit(to_csv(rows, ["H", "envelope", "iterate"]), args.out)
            return
        d = rec.to_dict() if hasattr(rec, "to_dict") else rec
        cols = [k for k, v in d.items() if not isinstance(v, (dict, list))]
        _emit(to_csv([d], cols), args.out)
        return
    _emit(to_json(rec), args.out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "validate":
            return EXIT_OK if cmd_validate(args) else EXIT_VALIDATE
        if getattr(args, "sweep", None):
            rows, cols = _sweep(args.handler, args)
            if args.format == "json" or (args.out and not args.out.endswith(".csv") and args.format != "csv"):
                _emit(to_json(rows), args.out)
            else:
                _emit(to_csv(rows, cols), args.out)
            return EXIT_OK
        rec = args.handler(args)
        if args.command == "theta-closed" and not args.json and args.out is None:
            print("%.17g" % rec["value"])
            return EXIT_OK
        _write_record(args, rec)
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"fillin-lab: usage error: {exc}\n")
        return EXIT_USAGE
    except (_IOFailure, OSError) as exc:
        sys.stderr.write(f"fillin-lab: I/O error: {exc}\n")
        return EXIT_IO
    except PreconditionError as exc:
        sys.stderr.write(f"fillin-lab: precondition error: {exc}\n")
        return EXIT_PRECONDITION
    except NumericalFailure as exc:
        sys.stderr.write(f"fillin-lab: numerical failure: {exc}\n")
        if getattr(exc, "diagnostics", None):
            sys.stderr.write(to_json(exc.diagnostics) + "\n")
        return EXIT_NUMERICAL
    except FillinError as exc:
        sys.stderr.write(f"fillin-lab: error: {exc}\n")
        return EXIT_VALIDATE


if __name__ == "__main__":
    sys.exit(main())
