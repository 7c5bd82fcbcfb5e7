"""Command-line interface.

Subcommands: classify, simulate, forbidden, sweep, portrait.
Exit codes: 0 ok, 2 degenerate parameters, 3 usage error, 4 forbidden start.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction

import numpy as np

from .classify import (
    Behavior, Equilibrium, LineOfEquilibria, NegativeCoefficient, classify_behavior,
    classify_nonneg, equilibria, period2_criterion, system_verdict,
)
from .core import DegenerateRiccati, Line, Params, Point, Tolerances, iterate, validate_params
from .forbidden import HORIZON, forbidden_scan, is_forbidden
from .solution import NotApplicable, closed_form_exact, closed_form_orbit, conic_of, line_L
from .spectrum import Regime, spectrum as compute_spectrum

EXIT_OK, EXIT_DEGENERATE, EXIT_USAGE, EXIT_FORBIDDEN = 0, 2, 3, 4
MAX_GRID = 10 ** 6


class UsageError(Exception):
    pass


# serialisation --------------------------------------------------------------

def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    if v == 0:
        return "0"
    return format(v, ".17g")


def _plain(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (Fraction, np.floating)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _point(z):
    return None if z is None else [float(z[0]), float(z[1])]


def _line(ln: Line):
    return {"a": ln.a, "b": ln.b, "c": ln.c}


def spectrum_json(s):
    return {
        "real_roots": [{"value": r.value, "multiplicity": r.multiplicity} for r in s.real_roots],
        "complex_pair": None if s.complex_pair is None else
        {"rho": s.complex_pair.rho, "theta": s.complex_pair.theta},
        "moduli": [abs(z) for z in s.eigenvalues()],
        "spectral_radius": s.spectral_radius,
        "regime": s.regime,
    }


def equilibrium_json(e):
    out = {
        "associated_lambda": e.associated_lambda,
        "multiplicity": e.multiplicity,
        "stability": e.stability.kind if e.stability else None,
        "jacobian_eigen_moduli": list(e.stability.jacobian_eigen_moduli) if e.stability else None,
    }
    if isinstance(e, LineOfEquilibria):
        out.update(kind="line", line=_line(e.line))
    else:
        out.update(kind="point", point=_point(e.point))
    return out


def behavior_json(b: Behavior):
    out = {"kind": b.kind, "diagnostics": list(b.diagnostics)}
    if b.equilibrium is not None:
        out["equilibrium"] = equilibrium_json(b.equilibrium)
    if b.cycle:
        out["cycle"] = [_point(z) for z in b.cycle]
    if b.period is not None:
        out["period"] = b.period
    if b.line is not None:
        out["L"] = _line(b.line.line)
        out["parallel"] = _line(b.line.parallel)
        out["lambda"] = b.line.lam
    if b.conic is not None:
        out["conic"] = {"eccentricity": b.conic.eccentricity, "P": b.conic.P,
                        "directrix": b.conic.directrix,
                        "transform": [list(r) for r in b.conic.rows]}
    if b.witness_n is not None:
        out["witness_n"] = b.witness_n
    return out


def nonneg_json(r):
    return {
        "kind": r.kind,
        "subcase": r.subcase,
        "equilibrium": _point(r.equilibrium.point) if r.equilibrium else None,
        "fixed_points": [_point(e.point) for e in r.fixed_points],
        "cycle_line": _line(r.cycle_line) if r.cycle_line else None,
        "checks": dict(r.checks),
    }


# argument handling ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _number(text: str) -> Fraction:
    """Decimal, integer or p/q; kept exact until the caller converts."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    return value


def _tuple_of(n: int, name: str):
    def parse(text: str):
        parts = [t for t in text.replace(" ", "").split(",")]
        if len(parts) != n:
            raise argparse.ArgumentTypeError(f"{name} needs {n} comma-separated values, got {text!r}")
        return tuple(_number(t) for t in parts)
    parse.__name__ = name
    return parse


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a {kind.__name__}: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return parse


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _range(text: str):
    """'lo:hi' or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        v = float(_number(parts[0]))
        return v, v
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"range must look like lo:hi, got {text!r}")
    lo, hi = (float(_number(t)) for t in parts)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise argparse.ArgumentTypeError(f"empty or invalid range {text!r}")
    return lo, hi


def _common(sp, initial=True):
    g = sp.add_argument_group("system")
    g.add_argument("--params", type=_tuple_of(4, "params"), required=False,
                   help="alpha1,beta1,alpha2,beta2 (decimals or p/q)")
    if initial:
        g.add_argument("--initial", type=_tuple_of(2, "initial"), default=None,
                       help="initial point x0,y0 (default: none)")
    g.add_argument("--horizon", type=_positive(int), default=1000,
                   help="iteration budget for orbits and probes (default: %(default)s)")
    g.add_argument("--forbidden-horizon", type=_positive(int), default=HORIZON,
                   help="number of forbidden lines scanned (default: %(default)s)")
    g.add_argument("--seed", type=_nonneg_int, default=0, help="seed for sampled probes (default: %(default)s)")
    t = sp.add_argument_group("tolerances")
    d = Tolerances()
    t.add_argument("--divide-tol", type=_positive(float), default=d.divide,
                   help="zero-denominator threshold (default: %(default)s)")
    t.add_argument("--cluster-tol", type=_positive(float), default=d.cluster,
                   help="root merging threshold (default: %(default)s)")
    t.add_argument("--membership-tol", type=_positive(float), default=d.membership,
                   help="point-to-line distance for forbidden membership (default: %(default)s)")
    t.add_argument("--period-tol", type=_positive(float), default=d.period,
                   help="period detection tolerance (default: %(default)s)")
    sp.add_argument("--config", default=None, help="key=value file; flags given here win")
    sp.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ratsys", description="Analyse x' = (a1 + b1 x)/y, y' = (a2 + b2 x)/y.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("classify", help="spectrum, equilibria and verdicts as JSON")
    _common(sp)

    sp = sub.add_parser("simulate", help="trajectory with closed-form comparison")
    _common(sp)
    sp.add_argument("--steps", type=_nonneg_int, default=None, help="steps to take (default: --horizon)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: %(default)s)")
    sp.add_argument("--exact", action="store_true",
                    help="rational arithmetic on the given decimals (default: off)")

    sp = sub.add_parser("forbidden", help="forbidden lines with their step index")
    _common(sp, initial=False)
    sp.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: %(default)s)")

    sp = sub.add_parser("sweep", help="classify every cell of a parameter grid")
    for name in ("alpha1", "beta1", "alpha2", "beta2"):
        sp.add_argument(f"--{name}", type=_range, required=False, help=f"{name} as lo:hi or a single value")
    sp.add_argument("--samples", type=_positive(int), default=5, help="grid points per varying axis (default: %(default)s)")
    sp.add_argument("--cluster-tol", type=_positive(float), default=Tolerances().cluster,
                    help="root merging threshold (default: %(default)s)")
    sp.add_argument("--jobs", type=_positive(int), default=1, help="worker processes (default: %(default)s)")
    sp.add_argument("--config", default=None, help="key=value file; flags given here win")
    sp.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")

    sp = sub.add_parser("portrait", help="SVG phase portrait")
    _common(sp)
    sp.add_argument("--viewport", type=_tuple_of(4, "viewport"), default=None,
                    help="xmin,xmax,ymin,ymax (default: -3,3,-3,3)")
    sp.add_argument("--orbits", type=_nonneg_int, default=8, help="sampled orbits (default: %(default)s)")
    sp.add_argument("--steps", type=_nonneg_int, default=200, help="steps per orbit (default: %(default)s)")
    sp.add_argument("--size", type=_positive(int), default=600, help="image width and height in px (default: %(default)s)")
    return ap


def read_config(path: str) -> list:
    """Turn a key=value file into flags."""
    argv = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}")
    for i, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                argv.append(flag)
        else:
            argv.append(f"{flag}={value}")
    return argv


# flags whose values may start with a minus sign
_SIGNED = {"--params", "--initial", "--viewport", "--alpha1", "--beta1", "--alpha2", "--beta2"}


def _attach_signed(argv: list) -> list:
    """Rewrite '--initial -0.5,1' as '--initial=-0.5,1' so argparse keeps the value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and argv[i + 1][1:2] not in ("-", ""):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def parse_args(argv):
    argv = _attach_signed(list(argv))
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        # config first, command line second: later flags win
        cmd = argv.index(args.command)
        args = ap.parse_args(argv[:cmd + 1] + read_config(args.config) + argv[cmd + 1:])
    return args


def _tolerances(args) -> Tolerances:
    return Tolerances(args.divide_tol, args.cluster_tol, args.membership_tol, args.period_tol)


def _params(args, exact=False) -> Params:
    if args.params is None:
        raise UsageError("--params is required")
    vals = args.params if exact else tuple(float(v) for v in args.params)
    return validate_params(*vals)


def _float_point(z):
    return None if z is None else Point(float(z[0]), float(z[1]))


# commands -------------------------------------------------------------------

def cmd_classify(args, out) -> int:
    p = _params(args)
    tols = _tolerances(args)
    s = compute_spectrum(p, tols.cluster)
    lines, fdiag = forbidden_scan(p, args.forbidden_horizon)
    z0 = _float_point(args.initial)
    p2 = period2_criterion(p)
    verdict = system_verdict(p, s)
    report = {
        "config": _config_json(args, p),
        "spectrum": spectrum_json(s),
        "equilibria": [equilibrium_json(e) for e in equilibria(p, s)],
        "period2": {"exists": p2 is not None, "cycle": [_point(z) for z in p2] if p2 else None},
        "system_verdict": verdict,
        "forbidden": [dict(n=ln.witness_n, **_line(ln)) for ln in lines],
        "diagnostics": list(s.diagnostics) + fdiag,
    }
    try:
        report["nonneg"] = nonneg_json(classify_nonneg(p, s))
    except NegativeCoefficient:
        report["nonneg"] = None
    if z0 is not None:
        b = classify_behavior(p, z0, budget=args.horizon, tols=tols, s=s,
                              horizon=args.forbidden_horizon)
        report["behavior"] = behavior_json(b)
        report["verdict"] = b.kind
    else:
        report["behavior"] = None
        report["verdict"] = verdict
    out.write(dumps(report) + "\n")
    return EXIT_OK


def _config_json(args, p):
    cfg = {"params": [float(c) for c in p], "horizon": args.horizon,
           "forbidden_horizon": args.forbidden_horizon, "seed": args.seed,
           "tolerances": {"divide": args.divide_tol, "cluster": args.cluster_tol,
                          "membership": args.membership_tol, "period": args.period_tol}}
    if getattr(args, "initial", None) is not None:
        cfg["initial"] = _point(args.initial)
    return cfg


def _relative_gap(z, w):
    if z is None or w is None:
        return math.nan
    return max(abs(z[i] - w[i]) / max(1.0, abs(z[i])) for i in range(2))


def cmd_simulate(args, out) -> int:
    if args.initial is None:
        raise UsageError("simulate needs --initial")
    steps = args.horizon if args.steps is None else args.steps
    tols = _tolerances(args)
    p = _params(args, exact=args.exact)
    if args.exact:
        z0 = Point(*args.initial)
        orbit = iterate(p, z0, steps, 0)
        closed = closed_form_exact(p, z0, steps)
    else:
        z0 = _float_point(args.initial)
        w = is_forbidden(p, z0, args.forbidden_horizon, tols.membership)
        if w is not None and iterate(p, z0, w, tols.divide).hit == w:
            _warn(f"initial point lies on the forbidden set (witness n = {w})")
            return EXIT_FORBIDDEN
        orbit = iterate(p, z0, steps, tols.divide)
        closed = closed_form_orbit(p, z0, steps)
    rows = []
    for n, z in enumerate(orbit.points):
        c = closed[n] if n < len(closed) else None
        gap = _relative_gap(z, c) if not args.exact else (0.0 if c == z else _relative_gap(z, c))
        rows.append((n, float(z[0]), float(z[1]),
                     None if c is None else float(c[0]), None if c is None else float(c[1]), gap))
    status = "complete" if orbit.complete else f"hit_forbidden at step {orbit.hit}"
    if args.format == "json":
        doc = {"config": _config_json(args, p), "status": orbit.status, "hit": orbit.hit,
               "exact": bool(args.exact),
               "rows": [dict(zip(("n", "x", "y", "x_closed", "y_closed", "discrepancy"), r)) for r in rows]}
        out.write(dumps(doc) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "x", "y", "x_closed", "y_closed", "discrepancy"])
        for r in rows:
            w.writerow([r[0]] + ["" if v is None else format_float(v) for v in r[1:]])
        w.writerow(["status", status, "", "", "", ""])
    return EXIT_OK


def cmd_forbidden(args, out) -> int:
    p = _params(args)
    lines, diags = forbidden_scan(p, args.forbidden_horizon)
    for d in diags:
        _warn(d, level="note")
    if args.format == "json":
        out.write(dumps([dict(n=ln.witness_n, **_line(ln)) for ln in lines]) + "\n")
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "a", "b", "c"])
    for ln in lines:
        w.writerow([ln.witness_n, format_float(ln.a), format_float(ln.b), format_float(ln.c)])
    return EXIT_OK


SWEEP_FIELDS = ("alpha1", "beta1", "alpha2", "beta2", "status", "regime",
                "n_equilibria", "verdict", "period2_exists")


def sweep_cell(values, cluster_tol):
    a1, b1, a2, b2 = values
    row = dict(zip(("alpha1", "beta1", "alpha2", "beta2"), values))
    try:
        p = validate_params(a1, b1, a2, b2)
    except DegenerateRiccati:
        row.update(status="degenerate", regime="", n_equilibria="", verdict="",
                   period2_exists=a1 * b2 == 0)
        return row
    s = compute_spectrum(p, cluster_tol)
    row.update(status="ok", regime=s.regime.value, n_equilibria=len(equilibria(p, s, with_stability=False)),
               verdict=system_verdict(p, s), period2_exists=period2_criterion(p) is not None)
    return row


def cmd_sweep(args, out) -> int:
    axes = []
    for name in ("alpha1", "beta1", "alpha2", "beta2"):
        r = getattr(args, name)
        if r is None:
            raise UsageError(f"--{name} is required")
        lo, hi = r
        axes.append([lo] if lo == hi else list(np.linspace(lo, hi, args.samples)))
    total = math.prod(len(a) for a in axes)
    if total > MAX_GRID:
        raise UsageError(f"grid has {total} cells, more than {MAX_GRID}")
    cells = [tuple(float(v) for v in c) for c in _product(axes)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(sweep_cell, cells, [args.cluster_tol] * len(cells), chunksize=64))
    else:
        rows = [sweep_cell(c, args.cluster_tol) for c in cells]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for r in rows:
        w.writerow([format_float(r[k]) if isinstance(r[k], float) else str(r[k]).lower()
                    if isinstance(r[k], bool) else r[k] for k in SWEEP_FIELDS])
    return EXIT_OK


def _product(axes):
    return itertools.product(*axes)


# portrait -------------------------------------------------------------------

def _clip_line(ln: Line, box):
    """Segment of a*x + b*y + c = 0 inside the box, or None."""
    xmin, xmax, ymin, ymax = box
    pts = []
    if ln.b != 0:
        for x in (xmin, xmax):
            y = -(ln.a * x + ln.c) / ln.b
            if ymin <= y <= ymax:
                pts.append((x, y))
    if ln.a != 0:
        for y in (ymin, ymax):
            x = -(ln.b * y + ln.c) / ln.a
            if xmin <= x <= xmax:
                pts.append((x, y))
    pts = sorted(set(pts))
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]


class _Canvas:
    def __init__(self, box, size):
        self.box, self.size = box, size
        self.parts = []

    def inside(self, z):
        xmin, xmax, ymin, ymax = self.box
        return (z is not None and math.isfinite(z[0]) and math.isfinite(z[1])
                and xmin <= z[0] <= xmax and ymin <= z[1] <= ymax)

    def map(self, z):
        xmin, xmax, ymin, ymax = self.box
        return ((z[0] - xmin) / (xmax - xmin) * self.size,
                (ymax - z[1]) / (ymax - ymin) * self.size)

    @staticmethod
    def f(v):
        s = f"{v:.6f}"
        return "0.000000" if s == "-0.000000" else s

    def polyline(self, pts, cls, stroke):
        if len(pts) < 2:
            return
        coords = " ".join(f"{self.f(u)},{self.f(v)}" for u, v in map(self.map, pts))
        self.parts.append(f'<polyline class="{cls}" points="{coords}" fill="none" '
                          f'stroke="{stroke}" stroke-width="1"/>')

    def circle(self, z, cls, r, fill):
        u, v = self.map(z)
        self.parts.append(f'<circle class="{cls}" cx="{self.f(u)}" cy="{self.f(v)}" r="{r}" fill="{fill}"/>')

    def line(self, ln: Line, cls, stroke):
        seg = _clip_line(ln, self.box)
        if seg is None:
            return
        (u1, v1), (u2, v2) = self.map(seg[0]), self.map(seg[1])
        self.parts.append(
            f'<line class="{cls}" data-a="{format_float(ln.a)}" data-b="{format_float(ln.b)}" '
            f'data-c="{format_float(ln.c)}" x1="{self.f(u1)}" y1="{self.f(v1)}" '
            f'x2="{self.f(u2)}" y2="{self.f(v2)}" stroke="{stroke}" stroke-dasharray="6,4"/>')

    def runs(self, pts):
        """Split a point sequence into maximal runs inside the viewport."""
        run = []
        for z in pts:
            if self.inside(z):
                run.append(z)
            else:
                if run:
                    yield run
                run = []
        if run:
            yield run


def render_portrait(p: Params, box, n_orbits, steps, seed, size=600, z0=None,
                    tols: Tolerances = Tolerances()) -> str:
    s = compute_spectrum(p, tols.cluster)
    cv = _Canvas(box, size)
    rng = np.random.default_rng(seed)
    xmin, xmax, ymin, ymax = box
    starts = [Point(float(rng.uniform(xmin, xmax)), float(rng.uniform(ymin, ymax))) for _ in range(n_orbits)]

    if p.beta2 != 0:
        ll = line_L(p, s.dominant_real)
        cv.line(ll.line, "line-L", "#c0392b")
        cv.line(ll.parallel, "line-parallel", "#8e44ad")
        if s.regime is Regime.COMPLEX_EQUAL:
            seed_point = z0 if z0 is not None else (starts[0] if starts else None)
            try:
                conic = conic_of(p, seed_point, s) if seed_point is not None else None
            except (NotApplicable, ArithmeticError):
                conic = None
            if conic is not None:
                phis = np.linspace(0.0, 2 * math.pi, 721)
                for run in cv.runs([conic.curve(float(t)) for t in phis]):
                    cv.polyline(run, "conic", "#16a085")

    for i, z in enumerate(([z0] if z0 is not None else []) + starts):
        orbit = iterate(p, z, steps, tols.divide)
        for run in cv.runs(orbit.points):
            cv.polyline(run, f"orbit orbit-{i}", "#2c3e50")
        for q in orbit.points:
            if cv.inside(q):
                cv.circle(q, "orbit-point", 1.2, "#2c3e50")

    for e in equilibria(p, s, with_stability=False):
        if isinstance(e, LineOfEquilibria):
            cv.line(e.line, "equilibrium-line", "#27ae60")
        elif cv.inside(e.point):
            cv.circle(e.point, "equilibrium", 4, "#e67e22")

    head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}" data-viewport="{",".join(format_float(v) for v in box)}">\n'
            f'<rect width="{size}" height="{size}" fill="white"/>\n')
    return head + "\n".join(cv.parts) + ("\n" if cv.parts else "") + "</svg>\n"


def cmd_portrait(args, out) -> int:
    p = _params(args)
    box = tuple(float(v) for v in (args.viewport or (-3, 3, -3, 3)))
    if not all(math.isfinite(v) for v in box) or box[0] >= box[1] or box[2] >= box[3]:
        raise UsageError("viewport must satisfy xmin < xmax and ymin < ymax")
    out.write(render_portrait(p, box, args.orbits, args.steps, args.seed, args.size,
                              _float_point(args.initial), _tolerances(args)))
    return EXIT_OK


# entry point ----------------------------------------------------------------

def _warn(msg, level="error"):
    colour = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    tag = f"\033[31m{level}\033[0m" if colour else level
    print(f"ratsys: {tag}: {msg}", file=sys.stderr)


COMMANDS = {"classify": cmd_classify, "simulate": cmd_simulate, "forbidden": cmd_forbidden,
            "sweep": cmd_sweep, "portrait": cmd_portrait}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        buf = io.StringIO()
        code = COMMANDS[args.command](args, buf)
    except UsageError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    except DegenerateRiccati as exc:
        _warn(str(exc))
        return EXIT_DEGENERATE
    except ValueError as exc:
        _warn(str(exc))
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
