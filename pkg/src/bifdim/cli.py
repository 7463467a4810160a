"""Command line interface: ``bifdim orbit | dim | classify | scan | content``.

Exit codes: 0 success, 1 other failures, 2 expression parse error,
3 numeric domain error, 4 estimator precondition failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .classify import (DEFAULT_MAX_ORDER, DEFAULT_TOL, check_bifurcation_conditions,
                       classify_fixed_point, predict_and_measure)
from .dynamics import (BUILTINS, DEFAULT_FLOOR, Cycle, MapSystem, default_seed,
                       distance_sequence, find_cycles, find_fixed_points, iterate)
from .errors import BifdimError, DomainError, ParseError, PreconditionError
from .exprmap import parse
from .fractal import (DEFAULT_SAMPLES, PointSet, conjectured_content, content_estimate,
                      dim_sausage, dim_tricot)

log = logging.getLogger("bifdim")

EXIT_OK, EXIT_OTHER, EXIT_PARSE, EXIT_DOMAIN, EXIT_PRECONDITION = 0, 1, 2, 3, 4
DEFAULT_N = 1_000_000
DEFAULT_COUNT = 1_000_000
MAX_SCAN_PERIOD = 8
DEFAULT_INTERVALS = {"logistic": (0.0, 1.0), "exponential": (-5.0, 5.0), "custom": (-5.0, 5.0)}


class UsageError(BifdimError):
    pass


# -- CSV ---------------------------------------------------------------------------


def write_orbit_csv(path, xs):
    """Write ``n,x`` rows with 17 significant digits (lossless for doubles)."""
    xs = np.asarray(xs, dtype=float)
    buf = io.StringIO()
    buf.write("n,x\n")
    if xs.size:
        np.savetxt(buf, np.column_stack([np.arange(1, xs.size + 1), xs]),
                   fmt=("%d", "%.17g"), delimiter=",")
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def read_orbit_csv(path):
    """Read an ``n,x`` file (or a bare column of values); returns (n, x)."""
    fh = sys.stdin if path == "-" else open(path, newline="")
    try:
        rows = [r for r in csv.reader(fh) if r and r[0].strip()]
    finally:
        if fh is not sys.stdin:
            fh.close()
    if rows and not _is_number(rows[0][-1]):
        rows = rows[1:]
    if not rows:
        return np.zeros(0), np.zeros(0)
    if len(rows[0]) >= 2:
        n = np.array([float(r[0]) for r in rows])
        x = np.array([float(r[1]) for r in rows])
    else:
        x = np.array([float(r[0]) for r in rows])
        n = np.arange(1, x.size + 1, dtype=float)
    return n, x


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


# -- shared argument handling --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_OTHER, f"{self.prog}: error: {message}\n")


def _interval(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError("interval needs lo < hi")
    return lo, hi


def _range(text):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    if lo > hi or not step > 0:
        raise argparse.ArgumentTypeError("range needs lo <= hi and step > 0")
    return lo, hi, step


def _add_map_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--map", choices=sorted(BUILTINS), help="built-in family")
    g.add_argument("--expr", help="custom map F(lam, x), e.g. 'lam*x*(1-x)'")
    g.add_argument("--recursion", metavar="F",
                   help="iterate x -> x - F(x)")
    g.add_argument("--recursion-osc", metavar="F",
                   help="iterate x -> -x - F(x)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="parameter value (default: %(default)s)")
    p.add_argument("--power", "-q", type=int, default=1,
                   help="iterate F^q per step (default: %(default)s)")


def _map_spec(args):
    if args.map:
        return {"family": args.map}
    if args.expr:
        return {"family": "custom", "expr": args.expr}
    if args.recursion:
        return {"family": "recursion", "expr": args.recursion, "oscillating": False}
    return {"family": "recursion", "expr": args.recursion_osc, "oscillating": True}


def _build_map(spec, lam, power=1):
    fam = spec["family"]
    if fam in BUILTINS:
        return MapSystem(fam, lam, power)
    if fam == "recursion":
        return MapSystem.recursion(spec["expr"], spec["oscillating"], lam, power)
    return MapSystem.custom(spec["expr"], lam, power)


def _default_interval(system):
    return DEFAULT_INTERVALS.get(system.family, DEFAULT_INTERVALS["custom"])


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return json.loads(json.dumps(cfg, default=str))


def _report(command, args, result, diagnostics=()):
    doc = {
        "command": command,
        "config": _config(args),
        "result": result,
        "diagnostics": list(diagnostics),
        "version": __version__,
    }
    text = json.dumps(doc, indent=2, default=_json_default)
    out = getattr(args, "report", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return doc


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _finite_or_none(v):
    return None if v is None or not math.isfinite(v) else v


# -- orbit ------------------------------------------------------------------------------


def cmd_orbit(args):
    system = _build_map(_map_spec(args), args.lam, args.power)
    orbit = iterate(system, args.x1, args.n, args.floor)
    write_orbit_csv(args.out, orbit.xs)
    info = sys.stderr if args.out in (None, "-") else sys.stdout
    print(f"stop_reason: {orbit.stop_reason}", file=info)
    print(f"points: {len(orbit)}", file=info)
    print(f"final: {orbit.final!r}", file=info)
    if orbit.stop_reason.kind == "diverged" and orbit.stop_reason.note.startswith("domain"):
        return EXIT_DOMAIN
    return EXIT_OK


# -- dim / content input ----------------------------------------------------------------


def _load_values(args):
    """Values and their time index from --in or --set, after --target/--skip."""
    diagnostics = []
    if args.set:
        expr = parse(args.set, variables=("n", "lam"))
        n = np.arange(1, args.count + 1, dtype=float)
        x = np.asarray(expr.vector_function()(n, 0.0), dtype=float) * np.ones_like(n)
        if not np.all(np.isfinite(x)):
            raise DomainError("set expression is not finite for every n")
    elif args.input:
        n, x = read_orbit_csv(args.input)
    else:
        raise UsageError("need --in FILE or --set EXPR")
    if args.skip:
        n, x = n[args.skip:], x[args.skip:]
    if x.size == 0:
        raise PreconditionError("empty input")
    limits = [0.0]
    if args.target:
        pts = [float(v) for v in args.target.split(",")]
        if len(pts) == 1:
            x = np.abs(x - pts[0])
        else:
            x = distance_sequence(x, Cycle(tuple(sorted(pts)), len(pts), math.nan)).d
        diagnostics.append(f"values replaced by distances to {pts}")
    elif args.complete:
        limits = [float(v) for v in args.limit.split(",")] if args.limit else [0.0]
    return n, x, limits, diagnostics


def _point_set(args, x, limits):
    segments = []
    if args.complete and x.size:
        for r in range(min(args.stride, x.size)):
            last = float(x[x.size - 1 - r])
            lim = min(limits, key=lambda a: abs(a - last))
            segments.append((last, lim))
    return PointSet(x, note=args.input or args.set or "", segments=segments)


def _tricot(n, x, stride, diagnostics):
    """Largest rarefaction estimate over residue classes of the given stride."""
    best = None
    errors = []
    for r in range(stride):
        xs, ns = x[r::stride], n[r::stride]
        try:
            est = dim_tricot(np.abs(xs), index=ns)
        except PreconditionError as exc:
            errors.append(f"class {r}: {exc}")
            continue
        if best is None or est.d > best.d:
            best = est
    diagnostics.extend(errors)
    if best is None:
        raise PreconditionError("; ".join(errors) or "no usable residue class")
    return best


def _estimate_dict(est, n_points):
    out = est.to_dict()
    out["r2"] = out.pop("fit_r2")
    out["n_points"] = n_points
    return out


def cmd_dim(args):
    n, x, limits, diagnostics = _load_values(args)
    result = {}
    if args.method in ("sausage", "both"):
        s = _point_set(args, x, [0.0] if args.target else limits)
        est = dim_sausage(s, args.eps_max, args.eps_min, args.samples)
        result["sausage"] = _estimate_dict(est, len(s))
        if est.note:
            diagnostics.append(est.note)
    if args.method in ("tricot", "both"):
        vals = x if args.target or not args.complete else x - limits[0]
        est = _tricot(n, vals, args.stride, diagnostics)
        result["tricot"] = _estimate_dict(est, int(x.size))
    if args.method != "both":
        result = result[args.method]
    _report("dim", args, result, diagnostics)
    return EXIT_OK


def cmd_content(args):
    n, x, limits, diagnostics = _load_values(args)
    s = _point_set(args, x, [0.0] if args.target else limits)
    est = content_estimate(s, args.d, args.eps_max, args.eps_min, args.samples)
    result = est.to_dict()
    result["n_points"] = len(s)
    result["nondegenerate"] = bool(0.05 < est.lower and est.upper < 50)
    if not result["nondegenerate"]:
        diagnostics.append("window extrema outside (0.05, 50): content looks degenerate")
    if args.conjecture:
        A, alpha = args.conjecture
        c = conjectured_content(A, alpha)
        dev = max(abs(est.lower - c), abs(est.upper - c)) / c
        result["conjectured"] = c
        result["relative_deviation"] = dev
        print(f"conjectured content: {c!r}  relative deviation: {dev:.4f}", file=sys.stderr)
    _report("content", args, result, diagnostics)
    return EXIT_OK


# -- classify ------------------------------------------------------------------------------


def _candidate_points(system, lo, hi, diagnostics):
    """Fixed points of F, or points of minimal-period q cycles for power q."""
    if system.power == 1:
        return [fp.x for fp in find_fixed_points(system, lo, hi)]
    base = system.with_power(1)
    cycles = find_cycles(base, system.power, lo, hi, diagnostics=diagnostics)
    return sorted(p for c in cycles for p in c.points)


def cmd_classify(args):
    system = _build_map(_map_spec(args), args.lam, args.power)
    diagnostics = []
    if args.x0 is not None:
        points = [args.x0]
    else:
        lo, hi = args.interval or _default_interval(system)
        points = _candidate_points(system, lo, hi, diagnostics)
        if not points:
            raise PreconditionError(f"no fixed point of F^{system.power} found on [{lo}, {hi}]")
    rows = []
    for x0 in points:
        row = classify_fixed_point(system, x0, args.order, args.tol).to_dict()
        if args.family_check:
            try:
                row["bifurcation"] = check_bifurcation_conditions(system, args.lam, x0).to_dict()
            except BifdimError as exc:
                row["bifurcation"] = {"error": str(exc)}
        rows.append(row)
    _report("classify", args, {"points": rows}, diagnostics)
    return EXIT_OK


# -- scan ------------------------------------------------------------------------------------


SCAN_COLUMNS = ["lambda", "points", "period", "multiplier", "kind", "predicted_dim",
                "measured_dim", "measured_beta", "error"]


def _lambda_grid(lo, hi, step):
    if lo == hi:
        return []
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(count)]


def _pick_cycle(system, lo, hi, tol):
    """Lowest-period cycle that is not repelling; ties go to the smallest |multiplier|."""
    for q in range(1, MAX_SCAN_PERIOD + 1):
        cycles = [c for c in find_cycles(system, q, lo, hi) if abs(c.multiplier) <= 1 + tol]
        if cycles:
            return min(cycles, key=lambda c: abs(c.multiplier))
    return None


def scan_row(spec, lam, interval, measure, n, order, tol):
    """One scan row; errors end up in the ``error`` field."""
    row = dict.fromkeys(SCAN_COLUMNS)
    row["lambda"] = lam
    try:
        system = _build_map(spec, lam)
        lo, hi = interval or _default_interval(system)
        cyc = _pick_cycle(system, lo, hi, tol)
        if cyc is None:
            raise PreconditionError(f"no attracting cycle of period <= {MAX_SCAN_PERIOD}")
        row["points"] = ";".join(repr(p) for p in cyc.points)
        row["period"] = cyc.period
        row["multiplier"] = cyc.multiplier
        cls = classify_fixed_point(system.with_power(cyc.period), cyc.points[0], order, tol)
        row["kind"] = cls.kind
        row["predicted_dim"] = None if cls.predicted_dim is None else float(cls.predicted_dim)
        if measure and cls.predicted_dim is not None:
            side = -1 if cls.side == "left" else 1
            x1 = default_seed(cyc.points[0], hi - lo, side)
            target = cyc if cyc.period > 1 else cyc.points[0]
            m = predict_and_measure(system, target, x1, n, order, tol)
            if m.error:
                row["error"] = m.error
            else:
                row["measured_dim"] = m.sausage.d
                row["measured_beta"] = _finite_or_none(m.decay.beta) if m.decay else None
    except (BifdimError, ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _scan_task(job):
    return scan_row(*job)


def cmd_scan(args):
    lo, hi, step = args.range
    lams = _lambda_grid(lo, hi, step)
    spec = _map_spec(args)
    parse(spec.get("expr") or BUILTINS[spec["family"]])  # fail fast on a bad expression
    jobs = [(spec, lam, args.interval, args.measure, args.n, args.order, args.tol) for lam in lams]
    workers = args.workers or os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        rows = [_scan_task(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_task, jobs))  # preserves lambda order

    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        if args.long:
            w.writerow(["lambda", "quantity", "value"])
            for r in rows:
                for k in SCAN_COLUMNS[1:]:
                    if r[k] is not None:
                        w.writerow([_fmt(r["lambda"]), k, _fmt(r[k])])
        else:
            w.writerow(SCAN_COLUMNS)
            for r in rows:
                w.writerow(["" if r[k] is None else _fmt(r[k]) for k in SCAN_COLUMNS])
    finally:
        if fh is not sys.stdout:
            fh.close()
    failed = sum(1 for r in rows if r["error"])
    print(f"rows: {len(rows)}  with errors: {failed}", file=sys.stderr)
    return EXIT_OK


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


# -- entry point ------------------------------------------------------------------------------


def _add_set_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--in", dest="input", metavar="CSV", help="orbit file with n,x rows ('-' for stdin)")
    src.add_argument("--set", metavar="EXPR", help="synthetic set a_n as an expression in n, e.g. '1/n'")
    p.add_argument("--count", type=int, default=DEFAULT_COUNT,
                   help="terms of --set (default: %(default)s)")
    p.add_argument("--target", metavar="X[,X...]",
                   help="replace values by distances to this point or cycle")
    p.add_argument("--skip", type=int, default=0, help="drop this many leading values (default: 0)")
    p.add_argument("--stride", type=int, default=1,
                   help="residue classes that converge monotonically (default: 1)")
    p.add_argument("--complete", action="store_true",
                   help="add the segment from each class's last value to its limit")
    p.add_argument("--limit", metavar="X[,X...]",
                   help="limit point(s) used by --complete without --target (default: 0)")
    p.add_argument("--eps-min", type=float, default=None, help="lower radius (default: from gap ranks)")
    p.add_argument("--eps-max", type=float, default=None, help="upper radius (default: from gap ranks)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                   help="radii in the window (default: %(default)s)")
    p.add_argument("--report", metavar="JSON", help="also write the JSON report here")


def build_parser():
    p = _Parser(prog="bifdim", description="Box dimension of orbits near nonhyperbolic fixed points.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    o = sub.add_parser("orbit", help="iterate a map and write n,x CSV")
    _add_map_args(o)
    o.add_argument("--x1", type=float, required=True, help="initial point")
    o.add_argument("--n", type=int, default=DEFAULT_N, help="maximum points (default: %(default)s)")
    o.add_argument("--floor", type=float, default=DEFAULT_FLOOR,
                   help="stop when |x_{n+1} - x_n| < floor (default: %(default)s)")
    o.add_argument("--out", default="-", help="CSV path, '-' for stdout (default: %(default)s)")
    o.set_defaults(func=cmd_orbit)

    d = sub.add_parser("dim", help="box dimension of a point set")
    _add_set_args(d)
    d.add_argument("--method", choices=("sausage", "tricot", "both"), default="sausage",
                   help="estimator (default: %(default)s)")
    d.set_defaults(func=cmd_dim)

    c = sub.add_parser("classify", help="classify fixed points or cycle points")
    _add_map_args(c)
    where = c.add_mutually_exclusive_group(required=True)
    where.add_argument("--x0", type=float, help="fixed point of F^q to classify")
    where.add_argument("--auto", action="store_true", help="locate fixed points on --interval")
    c.add_argument("--interval", type=_interval, help="lo:hi search interval for --auto")
    c.add_argument("--order", type=int, default=DEFAULT_MAX_ORDER,
                   help="highest derivative order examined (default: %(default)s)")
    c.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help="tolerance for multipliers and derivatives (default: %(default)s)")
    c.add_argument("--family-check", action="store_true",
                   help="also test the saddle-node and period-doubling hypotheses")
    c.add_argument("--report", metavar="JSON", help="also write the JSON report here")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("scan", help="classify (and measure) along a parameter range")
    _add_map_args(s)
    s.add_argument("--range", type=_range, required=True, help="lo:hi:step")
    s.add_argument("--interval", type=_interval, help="lo:hi search interval for cycles")
    s.add_argument("--measure", action="store_true", help="iterate and measure each row")
    s.add_argument("--n", type=int, default=DEFAULT_N, help="orbit length for --measure (default: %(default)s)")
    s.add_argument("--order", type=int, default=DEFAULT_MAX_ORDER, help="(default: %(default)s)")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL, help="(default: %(default)s)")
    s.add_argument("--workers", type=int, default=0, help="processes, 0 = all cores (default: 0)")
    s.add_argument("--long", action="store_true", help="write lambda,quantity,value rows")
    s.add_argument("--out", default="-", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_scan)

    k = sub.add_parser("content", help="Minkowski content window extrema")
    _add_set_args(k)
    k.add_argument("--d", type=float, required=True, help="dimension used for normalization")
    k.add_argument("--conjecture", nargs=2, type=float, metavar=("A", "ALPHA"),
                   help="compare with the conjectured content for f(x) = A x^ALPHA")
    k.set_defaults(func=cmd_content)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc.message} at byte {exc.offset}", file=sys.stderr)
        print(exc.pointer(), file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (BifdimError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
