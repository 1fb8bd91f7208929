"""Command-line interface: ``hartree-spectral <command> [options]``.

Exit codes: 0 when every check passes, 1 for usage or domain errors, 2 when
a numerical check fails.  Reports go to stdout; files are only written
inside ``--out``.
"""

import argparse
import csv
from functools import lru_cache
import importlib.resources
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .certifier import DEFAULT_TOL, ORACLE_TOL, certify, default_threads, grid_certify
from .errors import DomainError, NumericError, UsageError
from .funk_hecke import ZonalKernelSpec, default_nodes, mu_quadrature
from .riesz import (
    DEFAULT_FIXED_POINT_RADII,
    bubble_residual_relative,
    decay_exponent_fit,
    fixed_point_report,
    hls_equality_check,
)
from .spectral import make_params, mu_closed, mu_ratio
from .stereographic import distance_identity_error, generator_pushforward_error, round_trip_error

SCHEMA_VERSION = "1.0.0"
EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

TOLERANCES = {"bubble": 1e-6, "fixed-point": 1e-5, "hls": 1e-9, "stereo": 1e-12}
BUBBLE_RADII = (0.0, 0.5, 1.0, 2.0, 10.0, 100.0)
SLOPE_TOL = 0.05


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; this contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@lru_cache(maxsize=1)
def load_schema():
    text = importlib.resources.files(__package__).joinpath("report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(report):
    """Raise ``jsonschema.ValidationError`` if ``report`` violates the shipped schema."""
    import jsonschema

    jsonschema.validate(report, load_schema())


# -- argument parsing -------------------------------------------------------------


def _int_range(text):
    """'a..b' (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'a..b', got {text!r}") from None


def _radii(text):
    """Comma list, or 'lo:hi:n' for a geometric grid."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return tuple(float(v) for v in np.geomspace(float(lo), float(hi), int(n)))
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radii specification {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="output format (default: json; csv for mu)")
    common.add_argument("--out", default=".", help="directory for any files written (default: .)")
    common.add_argument("--save", action="store_true", help="also write the report to --out")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default: 0)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (default: $HARTREE_SPECTRAL_THREADS or CPU count)")

    def problem(p):
        p.add_argument("--N", type=int, required=True, help="dimension, N >= 3")
        p.add_argument("--lambda", dest="lam", type=float, required=True, help="Riesz exponent in (0, N)")

    parser = _Parser(prog="hartree-spectral", description="Nondegeneracy certificates for the critical Hartree bubble.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("certify", parents=[common], help="spectral nondegeneracy certificate")
    problem(p)
    p.add_argument("--kmax", type=int, default=50, help="largest degree checked (default: 50)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help=f"identity tolerance (default: {DEFAULT_TOL})")

    p = sub.add_parser("mu", parents=[common], help="Funk-Hecke eigenvalues mu_k")
    problem(p)
    p.add_argument("--k-range", type=_int_range, default=_int_range("0..10"), help="degrees, 'a..b' (default: 0..10)")
    p.add_argument("--exponent", type=float, default=None, help="kernel exponent (default: lambda)")
    p.add_argument("--oracle", action="store_true", help="add the Gauss-Jacobi quadrature column")
    p.add_argument("--nodes", type=_positive_int, default=None, help="quadrature nodes (default: kmax//2 + 4)")

    p = sub.add_parser("decay", parents=[common], help="decay regime of |x|^-lambda * <x>^-theta")
    problem(p)
    p.add_argument("--theta", type=float, required=True, help="decay exponent of the profile")
    p.add_argument("--radii", type=_radii, default=None, help="'lo:hi:n' or comma list (default: 1e2:1e4:9)")
    p.add_argument("--plot-script", action="store_true", help="also write a matplotlib script for the data file")

    p = sub.add_parser("residuals", parents=[common], help="bubble, fixed-point, HLS and projection residuals")
    problem(p)
    p.add_argument("--which", choices=("bubble", "fixed-point", "hls", "stereo", "all"), default="all",
                   help="which check to run (default: all)")
    p.add_argument("--radii", type=_radii, default=None,
                   help=f"radii for the fixed-point check (default: {','.join(map(str, DEFAULT_FIXED_POINT_RADII))})")

    p = sub.add_parser("grid", parents=[common], help="certificates over a grid of (N, lambda)")
    p.add_argument("--N-range", type=_int_range, default=_int_range("3..10"), help="'a..b' (default: 3..10)")
    p.add_argument("--lambda-resolution", type=int, default=50, help="interior lambda points per N (default: 50)")
    p.add_argument("--kmax", type=int, default=50, help="largest degree checked (default: 50)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help=f"identity tolerance (default: {DEFAULT_TOL})")

    sub.add_parser("selftest", parents=[common], help="quick end-to-end sanity run")
    return parser


# -- commands -------------------------------------------------------------------------


def cmd_certify(args):
    cert = certify(make_params(args.N, args.lam), args.kmax, args.tol)
    return cert.as_dict(), cert.passed


def cmd_mu(args):
    params = make_params(args.N, args.lam)
    ks = args.k_range
    if not ks or min(ks) < 0:
        raise UsageError("k range must be non-empty and non-negative")
    s = params.lam if args.exponent is None else args.exponent
    nodes = args.nodes or default_nodes(max(ks))
    spec = ZonalKernelSpec(params.N, s) if args.oracle else None
    rows = []
    for k in ks:
        closed = mu_closed(params, s, k)
        row = {"k": k, "mu_closed": closed}
        if args.oracle:
            row["mu_oracle"] = mu_quadrature(spec, k, nodes)
            row["rel_err"] = abs(row["mu_oracle"] - closed) / closed
        else:
            # without the oracle, compare against the ratio recurrence instead
            prev = mu_closed(params, s, k - 1) * mu_ratio(params, s, k - 1) if k > 0 else closed
            row["rel_err"] = abs(prev - closed) / closed
        rows.append(row)
    columns = ["k", "mu_closed"] + (["mu_oracle"] if args.oracle else []) + ["rel_err"]
    worst = max(r["rel_err"] for r in rows)
    return {"columns": columns, "rows": rows, "max_rel_err": worst, "pass": worst <= ORACLE_TOL}, worst <= ORACLE_TOL


def _safe_name(text):
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in text)


def cmd_decay(args):
    fit = decay_exponent_fit(args.N, args.lam, args.theta, args.radii)
    os.makedirs(args.out, exist_ok=True)
    stem = _safe_name(f"decay_N{args.N}_lambda{args.lam:g}_theta{args.theta:g}")
    data_path = os.path.join(args.out, stem + ".dat")
    with open(data_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# log_s log_J\n")
        for s, j in zip(fit.radii, fit.values):
            fh.write(f"{math.log(s)!r} {math.log(j)!r}\n")
    script_path = None
    if args.plot_script:
        script_path = os.path.join(args.out, stem + "_plot.py")
        with open(script_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_PLOT_TEMPLATE.format(data=stem + ".dat", png=stem + ".png",
                                           slope=fit.predicted, title=f"{fit.regime}"))
    ok = fit.slope_error <= SLOPE_TOL
    if fit.regime == "theta=N":
        ok = ok and fit.log_coefficient is not None and fit.log_coefficient > 0
    results = {
        "regime": fit.regime,
        "fitted_slope": fit.slope,
        "predicted_slope": fit.predicted,
        "slope_error": fit.slope_error,
        "slope_tolerance": SLOPE_TOL,
        "log_coefficient": fit.log_coefficient,
        "data_file": os.path.basename(data_path),
        "plot_script": os.path.basename(script_path) if script_path else None,
        "pass": ok,
    }
    return results, ok


_PLOT_TEMPLATE = '''"""Plot the decay data next to this script (not run automatically)."""
import os

import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
log_s, log_j = np.loadtxt(os.path.join(here, "{data}"), unpack=True)
plt.plot(log_s, log_j, "o", label="quadrature")
plt.plot(log_s, log_j[0] + {slope!r} * (log_s - log_s[0]), "--", label="predicted slope")
plt.xlabel("log s")
plt.ylabel("log J")
plt.title("{title}")
plt.legend()
plt.savefig(os.path.join(here, "{png}"))
'''


def _residual_check(name, params, args):
    N = params.N
    if name == "bubble":
        vals = {s: bubble_residual_relative(params, s) for s in BUBBLE_RADII}
        worst = max(vals.values())
        details = {"radii": list(BUBBLE_RADII), "relative_residuals": list(vals.values())}
    elif name == "fixed-point":
        radii = args.radii or DEFAULT_FIXED_POINT_RADII
        reports = [fixed_point_report(params, j, radii) for j in (1, N + 1)]
        worst = max(r.max_residual for r in reports)
        details = {f"j={r.j}": {"degree": r.degree, "max_residual": r.max_residual} for r in reports}
        details["radii"] = list(radii)
    elif name == "hls":
        worst = hls_equality_check(params)
        details = {}
    else:
        parts = {
            "distance": distance_identity_error(N, 1000, args.seed),
            "round_trip": round_trip_error(N, 1000, args.seed),
            "generator_pushforward": generator_pushforward_error(N, 1000, args.seed),
        }
        worst = max(parts.values())
        details = {"points": 1000, **parts}
    tol = TOLERANCES[name]
    return {"max_residual": worst, "tolerance": tol, "pass": worst <= tol, "details": details}


def cmd_residuals(args):
    params = make_params(args.N, args.lam)
    names = list(TOLERANCES) if args.which == "all" else [args.which]
    checks = {name: _residual_check(name, params, args) for name in names}
    ok = all(c["pass"] for c in checks.values())
    return {"checks": checks, "pass": ok}, ok


def cmd_grid(args):
    if not args.N_range:
        raise UsageError("N range is empty")
    summary = grid_certify(args.N_range, args.lambda_resolution, args.kmax, args.tol,
                           threads=args.threads or default_threads())
    cells = [{"N": c.N, "lambda": c.lam, "verdict": c.verdict, "failed": list(c.failed)} for c in summary.cells]
    results = {"overall": summary.overall, "cells": cells, "worst_margins": summary.worst_margins()}
    return results, summary.overall == "pass"


def cmd_selftest(args):
    checks = {}
    checks["certify_6_4"] = certify(make_params(6, 4)).passed
    params = make_params(3, 1)
    checks["mu_oracle_3_1"] = all(
        abs(mu_quadrature(ZonalKernelSpec(3, 1.0), k) / mu_closed(params, 1.0, k) - 1) <= ORACLE_TOL
        for k in range(11)
    )
    checks["bubble_3_1"] = bubble_residual_relative(params, 1.0) <= TOLERANCES["bubble"]
    checks["hls_3_1"] = hls_equality_check(params) <= TOLERANCES["hls"]
    checks["stereo_4"] = distance_identity_error(4, 200, args.seed) <= TOLERANCES["stereo"]
    ok = all(checks.values())
    return {"checks": checks, "pass": ok}, ok


COMMANDS = {
    "certify": cmd_certify,
    "mu": cmd_mu,
    "decay": cmd_decay,
    "residuals": cmd_residuals,
    "grid": cmd_grid,
    "selftest": cmd_selftest,
}


# -- output -------------------------------------------------------------------------------


def _csv_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_value(x) for x in v)
    return "" if v is None else str(v)


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], out)
    else:
        out.append((prefix, obj))


def render_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    res = report["results"]
    command = report["command"]
    if command == "certify":
        cols = ["k", "mu_lambda", "mu_newton", "symbol", "dim"]
        writer.writerow(cols)
        writer.writerows([_csv_value(line[c]) for c in cols] for line in res["lines"])
    elif command == "mu":
        writer.writerow(res["columns"])
        writer.writerows([_csv_value(row[c]) for c in res["columns"]] for row in res["rows"])
    elif command == "grid":
        cols = ["N", "lambda", "verdict", "failed"]
        writer.writerow(cols)
        writer.writerows([_csv_value(cell[c]) for c in cols] for cell in res["cells"])
    else:
        writer.writerow(["key", "value"])
        rows = []
        _flatten("", res, rows)
        writer.writerows([k, _csv_value(v)] for k, v in rows)
    return buf.getvalue()


def render_text(report):
    rows = []
    _flatten("", report["results"], rows)
    head = f"{report['command']}  (schema {report['schema_version']}, {report['runtime_ms']} ms)"
    lines = [head]
    for key, value in rows:
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}: {len(value)} rows")
            continue
        lines.append(f"{key}: {_csv_value(value)}")
    return "\n".join(lines) + "\n"


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return render_csv(report)
    return render_text(report)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or ("csv" if args.command == "mu" else "json")
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command",)}
    if "lam" in params:
        params["lambda"] = params.pop("lam")
    if params.get("threads") is None:
        params["threads"] = default_threads()
    start = time.perf_counter()
    try:
        results, ok = COMMANDS[args.command](args)
    except (DomainError, UsageError) as exc:
        print(f"hartree-spectral {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"hartree-spectral {args.command}: numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_FAILED
    report = _jsonable({
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "params": params,
        "results": results,
        "runtime_ms": int(round(1000 * (time.perf_counter() - start))),
    })
    validate_report(report)
    text = render(report, fmt)
    sys.stdout.write(text)
    if args.save:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{args.command}.{fmt}"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK if ok else EXIT_FAILED
