"""Command-line front end.

Every subcommand writes CSV or JSON to ``--out`` (stdout when omitted) and
prints a one-line summary to stderr.  Exit codes: 0 success, 2 bad input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .compare import (compare_mq_gmm_normal_scale, compare_mq_ml, compare_mq_mm,
                      figure1_data, figure2_data, weibull_rho0)
from .distributions import FamilyId, FamilySpec, make_family
from .errors import DomainError, NumericalError, QldpError
from .lambda_opt import (counterexample_check, lambda_tilde_1, lambda_tilde_2,
                         optimal_lambda)
from .mc_harness import SimPlan, decay_rate
from .mm_rate import MmRateContext, gmm_rate_curve, mm_rate_curve
from .mq_rate import MqRateContext, rate_curve
from .table import Table

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


# -- serialisation ----------------------------------------------------------

def fmt_num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _open(path):
    if path is None or str(path) == "-":
        return None
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise DomainError(f"cannot write {path}: {exc}") from None


def emit_csv(table: Table, path=None, stream=None) -> str:
    """Write ``table`` as CSV with ``# key: value`` metadata lines; returns the text."""
    buf = io.StringIO()
    for k, v in table.meta.items():
        val = ",".join(fmt_num(x) for x in v) if isinstance(v, (list, tuple)) else fmt_num(v)
        buf.write(f"# {k}: {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt_num(x) for x in row])
    _write(buf.getvalue(), path, stream)
    return buf.getvalue()


def read_csv(text: str) -> Table:
    """Inverse of :func:`emit_csv` for numeric tables."""
    meta, lines = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition(": ")
            meta[k] = v
        elif line:
            lines.append(line)
    if not lines:
        return Table([], [], meta)
    cols = lines[0].split(",")
    rows = [tuple(float(x) for x in ln.split(",")) for ln in lines[1:]]
    return Table(cols, rows, meta)


def _json_value(v, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        # JSON has no infinity literal; the sentinel travels as a string
        return json.dumps(fmt_num(f)) if not math.isfinite(f) else fmt_num(f)
    if isinstance(v, (bool, np.bool_, int, np.integer)):
        return fmt_num(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}"
                 for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        return "[" + ", ".join(_json_value(x, indent, level + 1) for x in v) + "]"
    if hasattr(v, "value"):
        return json.dumps(v.value)
    return json.dumps(str(v))


def emit_json(report: dict, path=None, stream=None) -> str:
    """Write ``report`` as JSON, keys in insertion order, floats at 17 digits."""
    text = _json_value(report, 2, 0) + "\n"
    _write(text, path, stream)
    return text


def _write(text, path, stream):
    fh = _open(path)
    if fh is None:
        (stream or sys.stdout).write(text)
        return
    with fh:
        fh.write(text)


# -- argument helpers -------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:count`` with inclusive endpoints."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid spec must be start:stop:count, got {spec!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f"malformed grid spec {spec!r}") from None
    if n < 0 or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"malformed grid spec {spec!r}")
    return np.linspace(a, b, n)


def parse_int_list(spec: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in spec.split(",") if x.strip())
    except ValueError:
        raise DomainError(f"malformed integer list {spec!r}") from None
    if not vals:
        raise DomainError("empty integer list")
    return vals


def _add_family(p: argparse.ArgumentParser, required=True):
    g = p.add_argument_group("family")
    g.add_argument("--family", required=required, choices=[f.value for f in FamilyId])
    g.add_argument("--rho", type=float, help="Weibull shape")
    g.add_argument("--eta", type=float, help="shift of the scale-family base")
    g.add_argument("--s", type=float, help="scale of location/skew bases")
    g.add_argument("--g", help="right-endpoint generator: identity, exp-minus-one, power")
    g.add_argument("--y", type=float, help="exponent of the power generator")
    g.add_argument("--base", help="base location family of gtilde")


def _add_output(p, default_format="csv"):
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=default_format)


def family_from_args(args) -> FamilySpec:
    params = {k: getattr(args, k) for k in ("rho", "eta", "s", "g", "y", "base")
              if getattr(args, k, None) is not None}
    return make_family(args.family, **params)


def _default_theta_grid(fam: FamilySpec, theta0: float) -> str:
    lo, hi = fam.theta_domain
    if lo == 0.0 and hi == math.inf:
        return f"{0.5 * theta0!r}:{1.5 * theta0!r}:101"
    if lo == -1.0 and hi == 1.0:
        return "-0.99:0.99:199"
    return f"{theta0 - 1.0!r}:{theta0 + 1.0!r}:101"


def _emit(args, table_or_report, summary):
    if isinstance(table_or_report, Table):
        if args.format == "json":
            emit_json({"meta": table_or_report.meta, "columns": table_or_report.columns,
                       "rows": [list(r) for r in table_or_report.rows]}, args.out)
        else:
            emit_csv(table_or_report, args.out)
    else:
        if args.format == "csv":
            flat = {k: v for k, v in table_or_report.items() if not isinstance(v, (dict, list))}
            emit_csv(Table(list(flat), [tuple(flat.values())]), args.out)
        else:
            emit_json(table_or_report, args.out)
    where = args.out if args.out else "stdout"
    print(f"{args.command}: {summary} -> {where}", file=sys.stderr)


# -- subcommands ------------------------------------------------------------

def cmd_analyze(args):
    fam = family_from_args(args)
    theta0 = fam.check_theta(args.theta0)
    grid_spec = args.grid or _default_theta_grid(fam, theta0)
    thetas = parse_grid(grid_spec)
    for t in thetas:
        fam.check_theta(float(t))
    if args.estimator == "mq":
        if args.lam is None:
            raise DomainError("--lambda is required for the mq estimator")
        curve = rate_curve(MqRateContext(fam, theta0, args.lam), thetas)
    elif args.estimator == "mm":
        curve = mm_rate_curve(MmRateContext(fam, theta0, exploratory=args.exploratory), thetas)
    else:
        curve = gmm_rate_curve(theta0, thetas, fam)
    meta = {**curve.meta, "grid": grid_spec}
    table = Table(["theta", "rate"], curve.rows(), meta)
    _emit(args, table, f"{len(table)} rows")


def cmd_optimal_lambda(args):
    theta0 = args.theta0
    if args.eta_grid:
        etas = parse_grid(args.eta_grid)
        rows = []
        fam0 = family_from_args(args)
        for eta in etas:
            args.eta = float(eta)
            rep = optimal_lambda(family_from_args(args), theta0, n_grid=args.grid_points)
            lams = rep.maximizers + [math.nan] * (2 - len(rep.maximizers))
            rows.append((float(eta), lams[0], lams[1], rep.curvature_at_max))
        meta = {"family": fam0.id.value, "theta0": float(theta0), "eta_grid": args.eta_grid,
                "grid_points": args.grid_points}
        table = Table(["eta", "lambda_max_1", "lambda_max_2", "curvature"], rows, meta)
        _emit(args, table, f"{len(rows)} rows")
        return
    fam = family_from_args(args)
    rep = optimal_lambda(fam, theta0, n_grid=args.grid_points)
    meta = {"family": rep.family, "theta0": rep.theta0, "method": rep.method,
            **rep.settings}
    if rep.note:
        meta["note"] = rep.note
    rows = [(x, rep.curvature_at_max) for x in rep.maximizers]
    table = Table(["lambda_max", "curvature"], rows, meta)
    shown = ",".join(format(x, ".10f") for x in rep.maximizers) or "none"
    _emit(args, table, f"lambda_max = {shown}")


def cmd_compare(args):
    if args.vs == "gmm":
        fam = family_from_args(args)
        if fam.id is not FamilyId.NORMAL_SCALE:
            raise DomainError("--vs gmm is only available for normal-scale")
        res = compare_mq_gmm_normal_scale(fam.fixed_params["eta"], args.theta0)
    else:
        if args.lam is None:
            raise DomainError("--lambda is required for --vs mm and --vs ml")
        fam = family_from_args(args)
        fn = compare_mq_mm if args.vs == "mm" else compare_mq_ml
        res = fn(fam, args.theta0, args.lam)
    _emit(args, res.as_dict(), res.verdict.value)


def cmd_figure(args):
    if args.which == 1:
        grid = parse_grid(args.grid or "-3:3:121")
        table = figure1_data(grid, args.theta0)
    else:
        grid = parse_grid(args.grid or "0.85:1.15:301")
        table = figure2_data(grid, args.theta0, args.lam if args.lam is not None else 0.75)
    table.meta.setdefault("grid", args.grid or "default")
    _emit(args, table, f"figure {args.which}, {len(table)} rows")


def cmd_simulate(args):
    fam = family_from_args(args)
    plan = SimPlan(fam, args.theta0, args.lam, args.eps, parse_int_list(args.ns), args.reps,
                   args.seed)
    est = decay_rate(plan, args.estimator, fit=args.fit, threads=args.threads)
    report = est.as_dict()
    rows = [(n, d, b, p) for n, d, b, p in zip(est.ns, est.deviations, est.out_of_range,
                                                est.p_hat)]
    table = Table(["n", "deviations", "out_of_range", "p_hat"], rows,
                  {**est.meta, "reps": est.reps, "estimator": est.estimator,
                   "slope": est.slope, "predicted_rate": est.predicted_rate})
    csv_path = args.csv
    if csv_path is None and args.out:
        csv_path = str(Path(args.out).with_suffix(".csv"))
    emit_json(report, args.out)
    if csv_path is not None:
        emit_csv(table, csv_path)
    else:
        emit_csv(table)
    print(f"simulate: slope {est.slope:.6g} vs predicted {est.predicted_rate:.6g} "
          f"(gap {est.relative_gap:.1%}) -> {args.out or 'stdout'}", file=sys.stderr)


def constants_table() -> dict:
    l1, l2 = lambda_tilde_1(), lambda_tilde_2()
    return {"lambda_tilde_1": l1, "lambda_tilde_2": l2, "rho0": weibull_rho0(),
            "four_l1_one_minus_l1": 4.0 * l1 * (1.0 - l1), "six_over_pi_squared": 6.0 / math.pi ** 2}


def cmd_constants(args):
    vals = constants_table()
    if args.format == "json":
        emit_json(vals, args.out)
    else:
        text = "".join(f"{k} {v:.10f}\n" for k, v in vals.items())
        _write(text, args.out, None)
    print(f"constants: {len(vals)} values -> {args.out or 'stdout'}", file=sys.stderr)


def cmd_counterexample(args):
    params = {} if args.s is None else {"s": args.s}
    rep = counterexample_check(args.base or "normal-loc", **params)
    report = {"base": rep.base, "slope": rep.slope, "window": list(rep.window),
              "max_rel_error": rep.max_rel_error, "max_rel_error_fd": rep.max_rel_error_fd,
              "curvature_at_half": rep.curvature_at_half,
              "curvature_near_edges": list(rep.curvature_near_edges),
              "strict_local_min": rep.strict_local_min,
              "base_derivative_at_half": rep.base_derivative_at_half}
    _emit(args, report, "strict local minimum at 1/2" if rep.strict_local_min
          else "no strict local minimum at 1/2")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qldp", description=(
        "Large-deviation rate functions of quantile and moment estimators."))
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="rate curve theta -> rate as CSV")
    _add_family(a)
    a.add_argument("--theta0", type=float, required=True)
    a.add_argument("--lambda", dest="lam", type=float)
    a.add_argument("--estimator", choices=["mq", "mm", "gmm"], default="mq")
    a.add_argument("--grid", help="theta grid start:stop:count (inclusive)")
    a.add_argument("--exploratory", action="store_true",
                   help="allow the moment rate where it is not a good rate function")
    _add_output(a)
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("optimal-lambda", help="level(s) maximising the MQ curvature")
    _add_family(o)
    o.add_argument("--theta0", type=float, required=True)
    o.add_argument("--eta-grid", help="tabulate over eta (scale families) start:stop:count")
    o.add_argument("--grid-points", type=int, default=4096)
    _add_output(o)
    o.set_defaults(func=cmd_optimal_lambda)

    c = sub.add_parser("compare", help="local speed verdict of MQ against another estimator")
    _add_family(c)
    c.add_argument("--theta0", type=float, required=True)
    c.add_argument("--lambda", dest="lam", type=float)
    c.add_argument("--vs", choices=["mm", "gmm", "ml"], default="mm")
    _add_output(c, "json")
    c.set_defaults(func=cmd_compare)

    f = sub.add_parser("figure", help="figure datasets: 1 = gumbel-scale curvatures over eta, "
                       "2 = exponential rates at level 3/4")
    f.add_argument("which", type=int, choices=[1, 2])
    f.add_argument("--theta0", type=float, default=1.0)
    f.add_argument("--lambda", dest="lam", type=float, help="level for figure 2 (default 0.75)")
    f.add_argument("--grid", help="eta grid (figure 1) or theta grid (figure 2)")
    _add_output(f)
    f.set_defaults(func=cmd_figure)

    s = sub.add_parser("simulate", help="Monte Carlo decay rate of deviation probabilities")
    _add_family(s)
    s.add_argument("--theta0", type=float, required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=0.5)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--ns", default="50,100,200,400,800")
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--estimator", choices=["mq", "mm"], default="mq")
    s.add_argument("--fit", choices=["affine_log", "origin"], default="affine_log")
    s.add_argument("--threads", type=int, help="worker threads (default QLDP_THREADS or 1)")
    s.add_argument("--out", help="JSON report path (default stdout)")
    s.add_argument("--csv", help="per-n CSV path (default next to --out)")
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("constants", help="universal levels and thresholds")
    _add_output(k, "csv")
    k.set_defaults(func=cmd_constants)

    x = sub.add_parser("counterexample", help="curvature check of the three-piece location family")
    x.add_argument("--base", choices=["normal-loc", "cauchy-loc", "logistic-loc"])
    x.add_argument("--s", type=float)
    _add_output(x, "json")
    x.set_defaults(func=cmd_counterexample)
    return p


_VALUE_FLAGS = {"--grid", "--eta-grid", "--theta0", "--eta", "--lambda"}


def _glue_negative_values(argv):
    # argparse takes "-1:1:21" for an option; bind such values to their flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except NumericalError as exc:
        print(f"{args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QldpError, ValueError, OSError) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
