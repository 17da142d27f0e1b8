"""Command-line interface.

Reports and tables are written as CSV (default) or JSON. Exit codes: 2 for
invalid arguments, 3 when a critical-gain scan finds no sign change, 0
otherwise; a Bell violation is a result, not an error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from bellopt import __version__, fock, lhv, scan
from bellopt import inequalities as iq
from bellopt import observables as obs
from bellopt.inequalities import BellExpression, BellKind

SCHEMA_VERSION = "1"
AUTO_TAIL = 1e-10
AUTO_CAP = 60


def _gain(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError(f"must be a finite non-negative number, got {text}")
    return value


def _positive(text):
    value = _gain(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _cutoff(text):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'auto', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'auto', got {text!r}")
    return value


def _chain_length(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError("L must be at least 2")
    return value


def _resolve_cutoff(cutoff, gamma):
    if cutoff == "auto":
        return fock.auto_cutoff(gamma, AUTO_TAIL, cap=AUTO_CAP)
    return cutoff


def _angle(args, value):
    return math.radians(value) if args.degrees else value


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt(v) for v in value)
    if value is None:
        return ""
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def render(rows, fmt, name, extra=None):
    """Serialize a list of flat dicts."""
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": name, "rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    if rows:
        fields = list(rows[0])
        for row in rows[1:]:
            fields += [k for k in row if k not in fields]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row.get(f)) for f in fields])
    return buf.getvalue()


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# Subcommands ------------------------------------------------------------------

def cmd_state(args):
    cutoff = _resolve_cutoff(args.cutoff, args.gamma)
    tail = fock.tail_weight(args.gamma, cutoff)
    rows = []
    for n in range(cutoff + 1):
        w = fock.sector_weight(args.gamma, n)
        if w > 0:
            rows.append({"pairs": n, "weight": w, "tail_weight": tail})
    _emit(args, render(rows, args.format, "state", {"gamma": args.gamma, "cutoff_pairs": cutoff}))
    return 0


def cmd_correlate(args):
    cutoff = _resolve_cutoff(args.cutoff, args.gamma)
    state = fock.bsv_state(args.gamma, cutoff)
    theta, phi = _angle(args, args.theta), _angle(args, args.phi)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": args.kind,
        "gamma": args.gamma,
        "theta": theta,
        "phi": phi,
        "cutoff_pairs": cutoff,
        "tail_weight": fock.tail_weight(args.gamma, cutoff),
    }
    if args.kind == "E":
        ratio = obs.correlator_E_intensity(state, theta, phi)
        doc["numerator"] = ratio.numerator
        doc["denominator"] = ratio.denominator
        try:
            doc["value"] = ratio.value
        except obs.ZeroIntensityDenominator as exc:
            doc["value"] = None
            doc["error"] = str(exc)
    elif args.kind == "stokes":
        doc["side"] = args.side
        angle = theta if args.side == "A" else phi
        doc["value"] = obs.stokes_prime_expectation(state, args.side, angle)
    else:
        doc["value"] = iq.state_correlator(state, args.kind)(theta, phi)
    _emit(args, json.dumps(_jsonable(doc), indent=2) + "\n")
    return 0


def _pair_settings(args):
    if args.optimal_settings:
        return iq.optimal_chsh_settings()
    missing = [n for n in ("theta", "theta2", "phi", "phi2") if getattr(args, n) is None]
    if missing:
        raise SystemExit(_usage_error(args, f"missing settings: {', '.join('--' + m for m in missing)} (or use --optimal-settings)"))
    return (
        (_angle(args, args.theta), _angle(args, args.theta2)),
        (_angle(args, args.phi), _angle(args, args.phi2)),
    )


def _usage_error(args, message):
    args._parser.print_usage(sys.stderr)
    sys.stderr.write(f"{args._parser.prog}: error: {message}\n")
    return 2


def _report_rows(reports):
    return [r.as_dict() for r in reports]


def _evaluate(args, kind, thetas, phis):
    if args.source == "closed_form":
        return scan.closed_form_report(kind, args.gamma, thetas, phis)
    cutoff = _resolve_cutoff(args.cutoff, args.gamma)
    state = fock.bsv_state(args.gamma, cutoff)
    return iq.evaluate(state, BellExpression(kind, thetas, phis), gamma=args.gamma)


def cmd_chsh(args):
    thetas, phis = _pair_settings(args)
    kind = {"E": BellKind.CHSH_E, "C": BellKind.CHSH_C, "F": BellKind.CHSH_F}[args.correlator]
    report = _evaluate(args, kind, thetas, phis)
    _emit(args, render(_report_rows([report]), args.format, "chsh"))
    return 0


def cmd_ch(args):
    thetas, phis = _pair_settings(args)
    report = _evaluate(args, BellKind.CH_K, thetas, phis)
    _emit(args, render(_report_rows([report]), args.format, "ch"))
    return 0


CHAIN_KINDS = {
    "C": BellKind.CHAINED_C,
    "E": BellKind.CHAINED_E,
    "dist-rates": BellKind.CHAINED_DIST_RATES,
    "dist-int": BellKind.CHAINED_DIST_INTENSITIES,
}


def cmd_chained(args):
    kind = CHAIN_KINDS[args.correlator]
    thetas, phis = iq.chain_settings_for(kind, args.L)
    if args.source == "closed_form" and kind.is_distance:
        raise SystemExit(_usage_error(args, "distance chains have no closed form; use --source fock_oracle"))
    report = _evaluate(args, kind, thetas, phis)
    _emit(args, render(_report_rows([report]), args.format, "chained"))
    return 0


def cmd_critical(args):
    kw = {}
    if args.cutoff != "auto":
        kw["cutoff"] = args.cutoff
    result = scan.critical_gain(args.kind, args.L, args.source, tol=args.tol, gamma_max=args.gamma_max, optimize=args.optimize, seed=args.seed, **kw)
    _emit(args, render([result.as_dict()], args.format, "critical"))
    return 0


def cmd_table1(args):
    rows = scan.table1(tuple(args.sources), range(2, args.L_max + 1), tol=args.tol)
    report = scan.discrepancies(rows, {f"ratios_{args.sources[0]}": "ratios_reference"}, 0.003)
    _emit(args, render(rows, args.format, "table1", {"discrepancies": report}))
    return 0


def cmd_table2(args):
    rows = scan.table2(args.cutoff, range(2, args.L_max + 1), tol=args.tol)
    report = scan.discrepancies(rows, {"intensities_crit": "intensities_reference", "rates_crit": "rates_reference"}, 0.02)
    _emit(args, render(rows, args.format, "table2", {"discrepancies": report}))
    return 0


def cmd_visibility(args):
    n = int(round(args.gmax / args.step))
    gammas = [round(i * args.step, 12) for i in range(n + 1)]
    _emit(args, render(scan.visibility_curve(gammas), args.format, "visibility"))
    return 0


def cmd_fuzz(args):
    result = lhv.fuzz_bounds(args.seed, args.samples, max_L=args.max_L)
    rows = [
        {"check": name, "evaluated": result.checks[name], "violations": result.violations.get(name, 0), "worst_margin": result.worst_margin[name]}
        for name in result.checks
    ]
    summary = {"root_seed": args.seed, "samples": args.samples, "violations": result.total_violations}
    text = render(rows, args.format, "fuzz", summary)
    if args.format == "csv":
        text += f"violations: {result.total_violations}\n"
    _emit(args, text)
    return 0


def cmd_loophole(args):
    model = lhv.loophole_model(args.M, args.eps)
    thetas, phis = iq.optimal_chsh_settings()
    projected = lhv.constrained_projection(model)
    rows = []
    for label, m, kind in (
        ("declared totals", model, BellKind.CHSH_E),
        ("declared totals", model, BellKind.CHSH_C),
        ("constrained projection", projected, BellKind.CHSH_E),
        ("constrained projection", projected, BellKind.CHSH_C),
    ):
        rep = lhv.model_report(m, BellExpression(kind, thetas, phis))
        rep.note = label
        rep.extra = {"M": args.M, "eps": args.eps}
        rows.append(rep.as_dict())
    _emit(args, render(rows, args.format, "loophole-demo"))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="bellopt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write to this file instead of stdout")

    angles = argparse.ArgumentParser(add_help=False)
    angles.add_argument("--degrees", action="store_true", help="angles are given in degrees")

    def add(name, func, parents=(), **kw):
        p = sub.add_parser(name, parents=[common, *parents], **kw)
        p.set_defaults(func=func, _parser=p)
        return p

    p = add("state", cmd_state, help="squeezed-vacuum sector weights")
    p.add_argument("--gamma", type=_gain, required=True)
    p.add_argument("--cutoff", type=_cutoff, default="auto")

    p = add("correlate", cmd_correlate, (angles,), help="one correlator value as JSON")
    p.add_argument("--kind", choices=("E", "C", "F", "K", "dist-rates", "dist-int", "stokes"), required=True)
    p.add_argument("--gamma", type=_gain, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--side", choices=("A", "B"), default="A", help="side for --kind stokes")
    p.add_argument("--cutoff", type=_cutoff, default="auto")

    for name, func in (("chsh", cmd_chsh), ("ch", cmd_ch)):
        p = add(name, func, (angles,), help=f"{name.upper()} report")
        if name == "chsh":
            p.add_argument("--correlator", choices=("E", "C", "F"), default="C")
        p.add_argument("--gamma", type=_gain, required=True)
        for a in ("theta", "theta2", "phi", "phi2"):
            p.add_argument(f"--{a}", type=float)
        p.add_argument("--optimal-settings", action="store_true")
        p.add_argument("--source", choices=scan.SOURCES, default="fock_oracle")
        p.add_argument("--cutoff", type=_cutoff, default="auto")

    p = add("chained", cmd_chained, help="chained inequality at equal-spacing settings")
    p.add_argument("--correlator", choices=tuple(CHAIN_KINDS), default="C")
    p.add_argument("--L", type=_chain_length, default=3)
    p.add_argument("--gamma", type=_gain, required=True)
    p.add_argument("--source", choices=scan.SOURCES, default="fock_oracle")
    p.add_argument("--cutoff", type=_cutoff, default="auto")

    p = add("critical", cmd_critical, help="critical gain by bisection")
    p.add_argument("--kind", choices=[k.value for k in BellKind], required=True)
    p.add_argument("--L", type=_chain_length, default=2)
    p.add_argument("--source", choices=scan.SOURCES, default="closed_form")
    p.add_argument("--tol", type=_positive, default=1e-3)
    p.add_argument("--gamma-max", type=_positive, default=2.5)
    p.add_argument("--cutoff", type=_cutoff, default="auto")
    p.add_argument("--optimize", action="store_true", help="maximize the margin over settings")
    p.add_argument("--seed", type=int, default=0)

    p = add("table1", cmd_table1, help="critical gains of intensity and ratio chains")
    p.add_argument("--sources", nargs="+", choices=scan.SOURCES, default=list(scan.SOURCES))
    p.add_argument("--L-max", type=_chain_length, default=13)
    p.add_argument("--tol", type=_positive, default=1e-4)

    p = add("table2", cmd_table2, help="critical gains of distance chains")
    p.add_argument("--cutoff", type=int, default=25)
    p.add_argument("--L-max", type=_chain_length, default=7)
    p.add_argument("--tol", type=_positive, default=1e-4)

    p = add("visibility", cmd_visibility, help="visibility curves")
    p.add_argument("--gmax", type=_positive, default=3.0)
    p.add_argument("--step", type=_positive, default=0.01)

    p = add("fuzz", cmd_fuzz, help="random hidden-variable models against the bounds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--max-L", type=_chain_length, default=5)

    p = add("loophole-demo", cmd_loophole, help="model exploiting setting-dependent totals")
    p.add_argument("--M", type=_positive, default=10.0)
    p.add_argument("--eps", type=_positive, default=1.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except scan.BracketError as exc:
        sys.stderr.write(f"bracket failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
