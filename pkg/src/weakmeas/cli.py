"""Command-line front end emitting CSV.

Every output starts with ``#`` metadata lines (tool version and the
configuration echo), then one header line, then rows with numbers written
to 17 significant digits.  No timestamps are written, so identical
invocations give byte-identical files.

Exit status: 0 success, 2 domain or setup errors, 3 oracle-check tolerance
violation, 64 usage error, 74 output I/O error.
"""
from __future__ import annotations

import argparse
import cmath
import io
import math
import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from weakmeas import __version__, ensemble, figures, gaussian_oracle, optimize, setups, weak_core
from weakmeas.errors import DomainError, SeriesConvergenceError, WeakMeasurementError

__all__ = ["RunConfig", "build_parser", "parse_config", "run", "main"]

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_TOLERANCE = 3
EXIT_USAGE = 64
EXIT_IO = 74

COMMANDS = ("stats", "scan", "density", "optimal", "figure", "oracle-check", "errata", "ensemble")
SCAN_COLUMNS = ("s", "angle", "z", "mean", "var_pointer", "var_conjugate", "snr")
_SERIES_MAX_S = 5.0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """A parsed invocation: the subcommand plus its options, in radians."""

    command: str
    setup: str = "aav"
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % float(x)


def _render(config: RunConfig, header: Sequence[str], rows: Iterable[Sequence], notes: Sequence[str] = ()) -> str:
    out = io.StringIO()
    out.write(f"# weakmeas {__version__}\n")
    out.write(f"# command: {config.command}\n")
    out.write(f"# setup: {config.setup}\n")
    for key in sorted(config.options):
        if key == "output":
            continue
        value = config.options[key]
        if isinstance(value, (list, tuple)):
            value = ",".join(_fmt(v) for v in value)
        elif value is not None:
            value = _fmt(value)
        out.write(f"# {key}: {value}\n")
    for note in notes:
        out.write(f"# {note}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


# --------------------------------------------------------------------------
# statistics shared by stats and scan
# --------------------------------------------------------------------------

def _custom_weak_value(options) -> complex:
    re, im = options.get("re"), options.get("im")
    if re is None or im is None:
        raise UsageError("--setup custom needs --re and --im")
    return complex(re, im)


def _row(setup: str, s: float, angle: float, options) -> list:
    if setup == "aav":
        st = setups.aav_closed_forms(setups.AavPoint(s, angle))
        return [s, angle, st.z, st.mean_pz, st.delta_pz_sq, st.delta_z_sq, st.snr]
    if setup == "dsjh":
        st = setups.dsjh_closed_forms(setups.DsjhPoint(s, angle))
        return [s, angle, st.z, st.mean_kx, st.delta_x_sq, st.delta_p_sq, st.snr]
    a_w = _custom_weak_value(options)
    st = weak_core.moments_nonorthogonal(weak_core.MeasurementPoint.of(s, a_w))
    return [s, cmath.phase(a_w), st.z, st.mean_q, st.var_q, st.var_p, st.mean_q / math.sqrt(st.var_q)]


def _weak_value_for(setup: str, angle: float, options) -> complex:
    if setup == "aav":
        setups._require_aav_overlap(angle)
        return math.tan(angle / 2.0)
    if setup == "dsjh":
        setups._require_dsjh_overlap(angle)
        return -1j / math.tan(angle / 2.0)
    return _custom_weak_value(options)


def _two_level(setup: str, angle: float, options) -> setups.TwoLevelSetup:
    if setup == "aav":
        return setups.aav_setup(angle)
    if setup == "dsjh":
        return setups.dsjh_setup(angle)
    a_w = _custom_weak_value(options)
    # <f| = (1, 1)/sqrt 2 with sigma_z; pre amplitudes (1 + A_w, 1 - A_w) normalized
    pre = np.array([1.0 + a_w, 1.0 - a_w])
    return setups.TwoLevelSetup(pre / np.linalg.norm(pre), np.array([1.0, 1.0]) / math.sqrt(2.0), np.diag([1.0, -1.0]))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _cmd_stats(config: RunConfig):
    o = config.options
    return SCAN_COLUMNS, [_row(config.setup, o["s"], o.get("angle") or 0.0, o)], ()


def _range(lo, hi, steps, log=False):
    if steps < 1:
        raise UsageError("step counts must be positive")
    if steps == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, steps) if log else np.linspace(lo, hi, steps)


def _cmd_scan(config: RunConfig):
    o = config.options
    s_values = _range(o["s_min"], o["s_max"], o["s_steps"], o["log_s"])
    angles = [0.0] if config.setup == "custom" else _range(o["angle_min"], o["angle_max"], o["angle_steps"])
    rows = [_row(config.setup, float(s), float(a), o) for s in s_values for a in angles]
    return SCAN_COLUMNS, rows, ()


def _cmd_density(config: RunConfig):
    o = config.options
    s = o["s"]
    a_w = _weak_value_for(config.setup, o.get("angle") or 0.0, o)
    pt = weak_core.MeasurementPoint.of(s, a_w)
    points = o["points"]
    if o["space"] == "q":
        sigma = 1.0 / math.sqrt(2.0 * s)
        half = 1.0 + 10.0 * sigma
        x = np.linspace(-half, half, points)
        rows = zip(x, weak_core.initial_density_v(s, x), weak_core.density_q_nonorthogonal(pt, x))
    else:
        half = 10.0 * math.sqrt(s / 2.0)
        x = np.linspace(-half, half, points)
        rows = zip(x, weak_core.initial_density_u(s, x), weak_core.density_p_nonorthogonal(pt, x))
    abscissa = "v" if o["space"] == "q" else "u"
    return (abscissa, "initial", "post_selected"), list(rows), ()


def _cmd_optimal(config: RunConfig):
    o = config.options
    kind = o["kind"]
    if kind == "max":
        if config.setup != "dsjh":
            raise UsageError("--kind max applies to --setup dsjh only")
        s_m, phi_m, value = optimize.dsjh_global_max()
        return ("s_m", "phi_m", "value"), [[s_m, phi_m, value]], ()
    solvers = {
        ("aav", "expectation"): optimize.aav_optimal_expectation,
        ("aav", "snr"): optimize.aav_optimal_snr,
        ("dsjh", "expectation"): optimize.dsjh_optimal_expectation,
        ("dsjh", "snr"): optimize.dsjh_optimal_snr,
    }
    if (config.setup, kind) not in solvers:
        raise UsageError(f"no optimal line for setup {config.setup!r}")
    solver = solvers[config.setup, kind]
    points = [solver(float(s)) for s in _range(o["s_min"], o["s_max"], o["s_steps"], o["log_s"])]
    companions = sorted(points[0].companion_stats)
    rows = [[p.s, p.angle, p.objective_value] + [p.companion_stats[c] for c in companions] for p in points]
    return ("s", "angle", "objective", *companions), rows, ()


def _cmd_figure(config: RunConfig):
    o = config.options
    table = figures.figure_data(o["number"], o["s_points"], o["angle_points"], o["line_points"])
    return table.columns, table.data.tolist(), (f"figure {table.number}: {table.caption}",)


def _cmd_oracle_check(config: RunConfig):
    o = config.options
    s, angle = o["s"], o.get("angle") or 0.0
    setup = _two_level(config.setup, angle, o)
    overlap, a_w = setups.weak_value_of(setup)
    if isinstance(a_w, setups.OrthogonalFlag):
        raise DomainError("orthogonal selection: use the errata command")
    spec = gaussian_oracle.default_grid(s)
    if o.get("points") or o.get("half_width"):
        spec = gaussian_oracle.GridSpec(o.get("half_width") or spec.half_width, o.get("points") or spec.points)
    report = gaussian_oracle.oracle_report(setup, s, spec)
    pt = weak_core.MeasurementPoint.of(s, a_w)
    closed = weak_core.moments_nonorthogonal(pt)
    series = None
    if s <= _SERIES_MAX_S:
        try:
            series = gaussian_oracle.series_moments(pt, o["series_terms"])
        except SeriesConvergenceError:
            series = None
    rows = []
    for key, residual in report.residuals_vs_closed_form.items():
        series_residual = math.nan
        if series is not None and hasattr(closed, key):
            ref = getattr(closed, key)
            series_residual = abs(getattr(series, key) - ref) / max(abs(ref), 1e-2)
        rows.append([key, residual, series_residual])
    tol = o["tolerance"]
    worst = max(max(r[1] for r in rows), max((r[2] for r in rows if not math.isnan(r[2])), default=0.0))
    status = EXIT_OK if worst <= tol else EXIT_TOLERANCE
    notes = (f"weak_value: {_fmt(a_w.re)}{'+' if a_w.im >= 0 else '-'}{_fmt(abs(a_w.im))}i",
             f"grid: points={spec.points} half_width={_fmt(spec.half_width)}",
             f"max_residual: {_fmt(worst)} ({'pass' if status == EXIT_OK else 'FAIL'})")
    return ("quantity", "oracle_residual", "series_residual"), rows, notes, status


def _cmd_errata(config: RunConfig):
    rows = []
    for s in config.options["s_values"]:
        st = weak_core.moments_orthogonal(s)
        rep = gaussian_oracle.orthogonal_oracle(s)
        res = rep.residuals_vs_closed_form
        rows.append([
            s, st.z_o_paper, st.z_o_series, rep.z, st.var_p_paper, st.var_p_oracle_ref,
            st.var_q_paper, st.var_q_oracle_ref, res["density_u_paper"], res["density_v_paper"],
            res["density_u_normalized"], res["density_v_normalized"],
        ])
    header = (
        "s", "z_o_paper", "z_o_series", "z_o_oracle", "var_p_paper", "var_p_oracle", "var_q_paper",
        "var_q_oracle", "density_u_paper_residual", "density_v_paper_residual",
        "density_u_normalized_residual", "density_v_normalized_residual",
    )
    return header, rows, ("orthogonal selection: printed closed forms next to series and grid oracle",)


def _cmd_ensemble(config: RunConfig):
    o = config.options
    s, angle = o["s"], o.get("angle")
    if config.setup == "aav":
        angle = optimize.aav_optimal_snr(s).angle if angle is None else angle
        point = setups.AavPoint(s, angle)
    elif config.setup == "dsjh":
        angle = optimize.dsjh_optimal_snr(s).angle if angle is None else angle
        point = setups.DsjhPoint(s, angle)
    else:
        raise UsageError("ensemble supports --setup aav or dsjh")
    res = ensemble.snr_scaling(point, o["n_values"], o["trials"], o["seed"])
    rows = [
        [n, m, sd, snr, res.single_shot_snr * math.sqrt(n)]
        for n, m, sd, snr in zip(res.n_values, res.mean, res.std, res.snr)
    ]
    notes = (f"resolved_angle: {_fmt(angle)}", f"slope: {_fmt(res.slope)}", f"single_shot_snr: {_fmt(res.single_shot_snr)}")
    return ("n", "mean", "std", "snr", "sqrt_n_single_shot"), rows, notes


_HANDLERS = {
    "stats": _cmd_stats,
    "scan": _cmd_scan,
    "density": _cmd_density,
    "optimal": _cmd_optimal,
    "figure": _cmd_figure,
    "oracle-check": _cmd_oracle_check,
    "errata": _cmd_errata,
    "ensemble": _cmd_ensemble,
}


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

def _float_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--setup", choices=("aav", "dsjh", "custom"), default="aav")
    common.add_argument("--re", type=float, help="real part of the weak value (custom setup)")
    common.add_argument("--im", type=float, help="imaginary part of the weak value (custom setup)")
    common.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    common.add_argument("-o", "--output", help="write CSV here instead of stdout")

    parser = _Parser(prog="weakmeas", description="All-order weak measurement toolkit (CSV output).")
    parser.add_argument("--version", action="version", version=f"weakmeas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", parents=[common], help="closed-form statistics at one point")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--angle", type=float)

    p = sub.add_parser("scan", parents=[common], help="statistics over an (s, angle) lattice")
    p.add_argument("--s-min", type=float, required=True)
    p.add_argument("--s-max", type=float, required=True)
    p.add_argument("--s-steps", type=int, default=11)
    p.add_argument("--log-s", action="store_true")
    p.add_argument("--angle-min", type=float)
    p.add_argument("--angle-max", type=float)
    p.add_argument("--angle-steps", type=int, default=11)

    p = sub.add_parser("density", parents=[common], help="initial and post-selected density")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--angle", type=float)
    p.add_argument("--space", choices=("p", "q"), default="q")
    p.add_argument("--points", type=int, default=801)

    p = sub.add_parser("optimal", parents=[common], help="optimal lines and the DSJH maximum")
    p.add_argument("--kind", choices=("expectation", "snr", "max"), required=True)
    p.add_argument("--s-min", type=float, default=1e-3)
    p.add_argument("--s-max", type=float, default=10.0)
    p.add_argument("--s-steps", type=int, default=41)
    p.add_argument("--log-s", action="store_true")

    p = sub.add_parser("figure", parents=[common], help="data behind figure N (1-10)")
    p.add_argument("number", type=int, choices=figures.FIGURE_NUMBERS)
    p.add_argument("--s-points", type=int, default=100)
    p.add_argument("--angle-points", type=int, default=128)
    p.add_argument("--line-points", type=int, default=200)

    p = sub.add_parser("oracle-check", parents=[common], help="closed forms against grid oracle and series")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--angle", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--half-width", type=float)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--series-terms", type=int, default=60)

    p = sub.add_parser("errata", parents=[common], help="orthogonal-case report")
    p.add_argument("--s-values", type=_float_list, default=[0.01, 0.1, 0.5, 1.0, 2.0, 5.0])

    p = sub.add_parser("ensemble", parents=[common], help="sqrt(N) table for the sample mean")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--angle", type=float, help="defaults to the optimal-SNR angle")
    p.add_argument("--n-values", type=_int_list, default=[1, 10, 100, 1000, 10000])
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    return parser


_ANGLE_KEYS = ("angle", "angle_min", "angle_max")


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command, setup, degrees = ns.pop("command"), ns.pop("setup"), ns.pop("degrees")
    if degrees:
        for key in _ANGLE_KEYS:
            if ns.get(key) is not None:
                ns[key] = math.radians(ns[key])
    if setup == "custom":
        _custom_weak_value(ns)
    else:
        ns.pop("re")
        ns.pop("im")
        if command in ("stats", "density", "oracle-check") and ns.get("angle") is None:
            raise UsageError(f"{command} needs --angle for setup {setup}")
        if command == "scan" and (ns.get("angle_min") is None or ns.get("angle_max") is None):
            raise UsageError("scan needs --angle-min and --angle-max")
    return RunConfig(command=command, setup=setup, options=ns)


def run(config: RunConfig, stdout=None) -> int:
    """Execute ``config``; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        result = _HANDLERS[config.command](config)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except WeakMeasurementError as exc:
        print(f"weakmeas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    header, rows, notes = result[:3]
    status = result[3] if len(result) > 3 else EXIT_OK
    text = _render(config, header, rows, notes)
    path = config.options.get("output")
    try:
        if path:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"weakmeas: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
