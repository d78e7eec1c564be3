"""
Command-line harness.

Subcommands ``kernel``, ``zoo``, ``waveguide``, ``poisson`` and ``wave``
each print one table as CSV or JSON. Any flag may also be given in a
``key = value`` config file (``--config``); keys are the long flag names
and flags given on the command line win.

Exit codes: 0 success, 1 usage, 2 numeric failure, 3 geometry error,
4 divergence.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import zoo
from .discretization import build_weights
from .errors import (
    DegenerateBoundaryError,
    DivergenceError,
    DSCError,
    GeometryError,
    NumericFailure,
)
from .kernels import KernelFamily, KernelParams, eval_derivative

EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_GEOMETRY = 3
EXIT_DIVERGENCE = 4

# sigma/delta paired with the half bandwidth when --sigma-over-delta is unset
RATIO_BY_BANDWIDTH = {36: 4.2, 24: 3.2, 12: 2.65, 6: 2.0}

TEST_FUNCTIONS = {
    "cos": np.cos,
    "one": np.ones_like,
    "x": lambda x: np.asarray(x, dtype=float),
    "gauss": lambda x: np.exp(-np.asarray(x) ** 2),
    "sin-shift": lambda x: np.sin(np.asarray(x) + 1.0),
}


class UsageError(Exception):
    pass


class Table:
    """Column names plus rows of numbers (or short strings)."""

    def __init__(self, columns, rows):
        self.columns = list(columns)
        self.rows = [tuple(r) for r in rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row {r} has {len(r)} fields, expected {len(self.columns)}")


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def to_csv(table):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(float(value)):
            return "null"
        return _fmt(value)
    if isinstance(value, (bool, np.bool_, int, np.integer)):
        return _fmt(value)
    return json.dumps(str(value))


def to_json(table):
    records = []
    for row in table.rows:
        fields = ", ".join(f"{json.dumps(c)}: {_json_value(v)}" for c, v in zip(table.columns, row))
        records.append("  {" + fields + "}")
    return "[\n" + ",\n".join(records) + "\n]\n" if records else "[]\n"


# -- config files -------------------------------------------------------------


def read_config(path):
    """``{key: value}`` from ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("_", "-")] = value
    return out


def _apply_config(parser, config):
    """Install config values as parser defaults, so explicit flags win."""
    by_flag = {}
    for action in parser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_flag[opt[2:]] = action
    defaults = {}
    for key, raw in config.items():
        action = by_flag.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} needs true/false, got {raw!r}")
            defaults[action.dest] = low in ("true", "1", "yes")
        else:
            try:
                value = action.type(raw) if action.type else raw
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from exc
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
            defaults[action.dest] = value
    parser.set_defaults(**defaults)


# -- subcommands --------------------------------------------------------------


def _kernel_params(args):
    family = KernelFamily.parse(args.family)
    if args.sigma is not None and args.sigma_over_delta is not None:
        raise UsageError("give --sigma or --sigma-over-delta, not both")
    if args.sigma is not None:
        sigma = math.inf if args.sigma.lower() in ("inf", "infinity") else float(args.sigma)
    elif args.sigma_over_delta is not None:
        sigma = args.sigma_over_delta * args.delta
    else:
        sigma = RATIO_BY_BANDWIDTH.get(args.half_bandwidth, 3.2) * args.delta
    return KernelParams(family, args.delta, sigma, args.half_bandwidth, args.kernel_order)


def cmd_kernel(args):
    params = _kernel_params(args)
    unit = f"[1/length^{args.order}]" if args.order else "[1]"
    if args.action == "dump":
        table = build_weights(params, args.order)
        # sorted by the offset x_k - x_{k+j} = -j delta at which the weight is taken
        rows = [(-j, j, float(table[j])) for j in range(table.half_bandwidth, -table.half_bandwidth - 1, -1)]
        return Table(["offset[delta]", "j", f"weight{unit}"], rows), ("kernel", params, args.order)
    lo, hi = args.range
    x = np.linspace(lo, hi, args.points)
    y = np.atleast_1d(eval_derivative(params, args.order, x))
    return Table(["offset[length]", f"value{unit}"], zip(x.tolist(), y.tolist())), ("curve",)


def _zoo_kind(args):
    tag = args.kind.lower()
    if tag == "lorentz":
        return zoo.DeltaSequenceKind.lorentz(args.lorentz_order)
    if tag == "landau":
        return zoo.DeltaSequenceKind.landau(args.landau_a)
    if tag == "poussin":
        return zoo.DeltaSequenceKind.poussin(args.poussin_p)
    if tag in ("dilated-gauss", "dilated-lorentz"):
        return zoo.KINDS[tag]
    return zoo.DeltaSequenceKind(tag)


def _schedule(text):
    try:
        return [float(v) if any(c in v for c in ".eE") else int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}") from exc


def _pair(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from exc
    return lo, hi


def cmd_zoo(args):
    kind = _zoo_kind(args)
    lo, hi = args.range if args.range else (None, None)
    quad = zoo.Quadrature(args.step, lo, hi)
    if args.report == "positivity":
        rows = []
        for a in args.schedule:
            rep = zoo.positivity_and_mass(kind, a, quad)
            rows.append((a, rep.min_value, rep.mass))
        return Table(["param", "min_value", "mass"], rows), ("zoo-positivity",)
    fn = TEST_FUNCTIONS[args.test_fn]
    target = float(fn(np.array(0.0)))
    values = zoo.convergence_probe(kind, args.schedule, fn, quad)
    rows = [(a, v, abs(v - target)) for a, v in zip(args.schedule, values)]
    return Table(["param", "integral", "abs_error"], rows), ("zoo",)


def cmd_waveguide(args):
    from .solvers import WaveguideProblem, solve_waveguide

    ratio = args.sigma_over_delta
    family = KernelFamily.parse(args.family)
    common = dict(n_modes=args.modes, omega=args.omega, eps_nu=args.eps_nu,
                  keep_modes=bool(args.figure))
    if args.shape == "square":
        m = args.n if args.m is None else args.m
        ratio = ratio if ratio is not None else RATIO_BY_BANDWIDTH.get(m, 3.2)
        problem = WaveguideProblem.square(args.n, m, ratio, family, **common)
    else:
        ratio = 4.8 if ratio is None else ratio
        problem = WaveguideProblem.shaped(args.shape, args.n, args.m, ratio, family, **common)
    report = solve_waveguide(problem)
    columns = ["mode", "eigenvalue[1/length^2]", "analytic[1/length^2]", "abs_error[1/length^2]"]
    rows = report.rows()
    if args.omega is not None:
        columns.append("propagation_constant[1/length]")
        rows = [r + (float(b),) for r, b in zip(rows, report.metadata["propagation_constant"])]
    return Table(columns, rows), ("waveguide", report, problem)


def cmd_poisson(args):
    from .solvers import ChargePatch, ElectrostaticsProblem, charged_patch, solve_electrostatics

    if args.laplace_only and args.patch:
        raise UsageError("--laplace-only excludes --patch")
    if args.laplace_only:
        patches = ()
    elif args.patch:
        patches = tuple(ChargePatch(*p) for p in args.patch)
    else:
        patches = (charged_patch(),)
    m = args.n - 1 if args.m is None else args.m
    ratio = 3.2 if args.sigma_over_delta is None else args.sigma_over_delta
    potentials = (args.left, args.right, args.bottom, args.top)
    problem = ElectrostaticsProblem.box(args.n, args.side, m, ratio, KernelFamily.parse(args.family),
                                        potentials, patches)
    report = solve_electrostatics(problem)
    x, y = problem.grid.mesh()
    rows = [("node", xv, yv, v) for xv, yv, v in zip(x.ravel(), y.ravel(), report.field.values.ravel())]
    cx = cy = 0.5 * args.side
    rows.append(("probe:center", cx, cy, report.probes["center"]))
    for px, py in args.probe or ():
        from .solvers import probe

        rows.append(("probe", px, py, probe(report.field, problem.kernel, px, py)))
    return Table(["kind", "x[m]", "y[m]", "potential[V]"], rows), ("poisson", report)


def cmd_wave(args):
    from .solvers import WavePropagationProblem, propagate_wave

    m = args.n if args.m is None else args.m
    ratio = args.sigma_over_delta if args.sigma_over_delta is not None else RATIO_BY_BANDWIDTH.get(m, 3.2)
    problem = WavePropagationProblem.cube(
        args.n, m, ratio, dims=args.dims, family=KernelFamily.parse(args.family),
        eps_nu=args.eps_nu, dt=args.dt, t_end=args.t_end, report_every=args.report_every,
        track_energy=args.energy,
    )
    trace = propagate_wave(problem)
    columns = ["t[time]", "linf_error[1]"]
    rows = trace.rows()
    if args.energy:
        columns.append("energy[1]")
        rows = [r + (float(e),) for r, e in zip(rows, trace.energy)]
    return Table(columns, rows), ("wave", trace)


# -- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-", help="output path ('-' for stdout)")
    p.add_argument("--config", help="key = value file supplying defaults for any flag")
    p.add_argument("--figure", help="also render a matplotlib figure to this path")


def _kernel_flags(p, family="shannon"):
    p.add_argument("--family", default=family,
                   help="shannon, dirichlet, modified-dirichlet, lagrange or poussin")
    p.add_argument("--sigma-over-delta", type=float)
    p.add_argument("--kernel-order", type=int, help="L for Dirichlet/Lagrange families")


def build_parser():
    parser = _Parser(prog="dsckit", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", help="kernel values or derivative weights")
    k.add_argument("action", choices=("dump", "eval"),
                   help="dump: 2M+1 weight table; eval: values on an offset sweep")
    _common(k)
    _kernel_flags(k)
    k.add_argument("--delta", type=float, default=1.0)
    k.add_argument("--sigma", help="regularization width, or 'inf'")
    k.add_argument("--order", type=int, default=0, help="derivative order q (0..4)")
    k.add_argument("--half-bandwidth", type=int, default=4)
    k.add_argument("--range", type=_pair, default=(-4.0, 4.0), help="eval sweep 'lo,hi'")
    k.add_argument("--points", type=int, default=81)
    k.set_defaults(func=cmd_kernel)

    z = sub.add_parser("zoo", help="delta-sequence convergence and positivity")
    _common(z)
    z.add_argument("--kind", default="gauss",
                   choices=sorted(set(zoo.KINDS) | {"lorentz", "landau", "poussin"}))
    z.add_argument("--schedule", type=_schedule, default=_schedule("0.5,0.1,0.02"),
                   help="comma-separated sequence parameters")
    z.add_argument("--test-fn", choices=sorted(TEST_FUNCTIONS), default="cos")
    z.add_argument("--report", choices=("probe", "positivity"), default="probe")
    z.add_argument("--step", type=float)
    z.add_argument("--range", type=_pair, help="quadrature range 'lo,hi'")
    z.add_argument("--lorentz-order", type=int, default=1)
    z.add_argument("--landau-a", type=float, default=1.0)
    z.add_argument("--poussin-p", type=int, default=0)
    z.set_defaults(func=cmd_zoo)

    w = sub.add_parser("waveguide", help="TM waveguide eigenvalues")
    _common(w)
    _kernel_flags(w)
    w.add_argument("--shape", choices=("square", "T", "E"), default="square")
    w.add_argument("--n", type=int, default=24, help="intervals (square) or nodes (T/E) per side")
    w.add_argument("--m", type=int, help="half bandwidth (default n)")
    w.add_argument("--modes", type=int, default=20)
    w.add_argument("--omega", type=float, help="angular frequency for propagation constants")
    w.add_argument("--eps-nu", type=float, default=1.0)
    w.set_defaults(func=cmd_waveguide)

    e = sub.add_parser("poisson", help="electrostatic potential in a box")
    _common(e)
    _kernel_flags(e)
    e.add_argument("--n", type=int, default=32, help="nodes per side")
    e.add_argument("--m", type=int, help="half bandwidth (default n-1)")
    e.add_argument("--side", type=float, default=1.0, help="box side [m]")
    e.add_argument("--laplace-only", action="store_true", help="no charge patch")
    e.add_argument("--patch", type=_patch, action="append",
                   help="x0,x1,y0,y1,rho[C/m^2],eps_r; repeatable")
    e.add_argument("--left", type=float, default=0.0, help="potential at x=0 [V]")
    e.add_argument("--right", type=float, default=0.0, help="potential at x=side [V]")
    e.add_argument("--bottom", type=float, default=0.0, help="potential at y=0 [V]")
    e.add_argument("--top", type=float, default=10.0, help="potential at y=side [V]")
    e.add_argument("--probe", type=_pair, action="append", help="extra probe point 'x,y'")
    e.set_defaults(func=cmd_poisson)

    v = sub.add_parser("wave", help="periodic wave propagation error trace")
    _common(v)
    _kernel_flags(v)
    v.add_argument("--n", type=int, default=24, help="nodes per axis")
    v.add_argument("--m", type=int, help="half bandwidth (default n)")
    v.add_argument("--dims", type=int, choices=(1, 2, 3), default=3)
    v.add_argument("--dt", type=float, help="time step (default: stability estimate)")
    v.add_argument("--t-end", type=float, default=10.0)
    v.add_argument("--report-every", type=float, default=1.0)
    v.add_argument("--eps-nu", type=float, default=1.0)
    v.add_argument("--energy", action="store_true", help="add the discrete energy column")
    v.set_defaults(func=cmd_wave)
    return parser


def _patch(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad patch {text!r}") from exc
    if len(vals) != 6:
        raise argparse.ArgumentTypeError("patch needs x0,x1,y0,y1,rho,eps_r")
    return (vals[0], vals[1]), (vals[2], vals[3]), vals[4], vals[5]


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        _apply_config(subparser, config)
        args = parser.parse_args(argv)
    return args


def run(argv=None, stdout=None):
    """Entry point returning the exit code instead of calling ``sys.exit``."""
    stdout = stdout or sys.stdout
    try:
        args = parse_args(argv)
        table, plot = args.func(args)
        text = to_json(table) if args.format == "json" else to_csv(table)
        if args.output == "-":
            stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        if args.figure:
            from .plotting import render

            render(args.figure, table, plot)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"dsckit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"dsckit: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except GeometryError as exc:
        print(f"dsckit: geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (NumericFailure, DegenerateBoundaryError, FloatingPointError) as exc:
        print(f"dsckit: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ImportError as exc:
        print(f"dsckit: error: --figure needs matplotlib ({exc})", file=sys.stderr)
        return EXIT_USAGE
    except (DSCError, OSError, ValueError) as exc:
        print(f"dsckit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
