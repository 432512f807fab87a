"""Command-line front end.

Every physical input is a dimensionless product with the pulse width T
(alphaT, deltaT, gammaT, tmaxT, omega4T).  Values resolve in the order
built-in default < ``--config`` JSON < command-line flag.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import DegenerateDenominator, QuadratureError, weak_damping_p3, zeno_predict
from .experiments import (
    FigureId,
    FigureSpec,
    SweepSpec,
    linear_grid,
    log_grid,
    render_figure,
    sweep_gamma,
)
from .hamiltonians import BasisKind, ModelKind
from .lindblad import ReservoirSpec, propagate_master
from .propagator import SimOptions, StepSizeUnderflow, propagate
from .pulses import PulseConfig, Sequence

PROG = "openstirap"

MODELS = [m.value for m in ModelKind]
SEQUENCES = [s.value for s in Sequence]
BASES = [b.value for b in BasisKind]
FIGURES = ["fig2", "fig3a", "fig3b", "fig4", "fig4a", "fig4b"]

COMMON_DEFAULTS = {"alphaT": 10.0, "deltaT": 1.0, "tmaxT": 10.0, "sequence": "counterintuitive",
                   "rtol": 1e-10, "atol": 1e-12, "samples": 2001}

DEFAULTS = {
    "simulate": {**COMMON_DEFAULTS, "model": "effective", "gammaT": 0.0, "basis": "adiabatic",
                 "out": None},
    "master": {**COMMON_DEFAULTS, "gammaT": 0.0, "nplus": 0.0, "nminus": 0.0, "omega4T": 0.0,
               "out": None},
    "sweep": {**COMMON_DEFAULTS, "gammaT_min": 0.0, "gammaT_max": 3.0, "points": 61, "log": False,
              "models": "effective,phenomenological", "analytic": False, "out": None,
              "workers": None},
    "analytic": {**COMMON_DEFAULTS, "model": "effective", "gammaT": 0.1},
    "zeno": {"model": "effective", "sequence": "counterintuitive"},
    "figure": {"alphaT": 10.0, "deltaT": 1.0, "tmaxT": 10.0, "gammaT": None, "variant": None,
               "out_dir": ".", "rtol": 1e-10, "atol": 1e-12, "samples": 2001, "points": None},
}

CONFIG_HELP = """\
--config takes a flat JSON object whose keys are the flag names without
leading dashes, with '-' written as '_' (e.g. {"alphaT": 20, "gammaT": 0.5}).
An optional object keyed by the subcommand name (one level deep) overrides
top-level keys for that subcommand.  Flags given on the command line always
win over config values.  STIRAP_WORKERS bounds the sweep worker count."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _add_pulse_flags(p, with_gamma=True, with_sequence=True):
    p.add_argument("--alphaT", type=float, help="pulse area parameter alpha*T (dimensionless; default 10)")
    p.add_argument("--deltaT", type=float, help="single-photon detuning Delta*T (dimensionless, >= 0; default 1)")
    if with_gamma:
        p.add_argument("--gammaT", type=float, help="decay rate Gamma*T (dimensionless, >= 0)")
    p.add_argument("--tmaxT", type=float, help="window half-width t_max/T (dimensionless, >= 5; default 10)")
    if with_sequence:
        p.add_argument("--sequence", choices=SEQUENCES, help="pulse ordering (default counterintuitive)")


def _add_solver_flags(p):
    p.add_argument("--rtol", type=float, help="relative integrator tolerance (default 1e-10)")
    p.add_argument("--atol", type=float, help="absolute integrator tolerance (default 1e-12)")
    p.add_argument("--samples", type=int, help="number of uniform output samples (default 2001)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="STIRAP in an open three-level system.",
                     epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=CONFIG_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", metavar="PATH", help="JSON file with default values for the flags")
        return p

    p = add("simulate", "propagate the three-level amplitudes under one model")
    p.add_argument("--model", choices=MODELS, help="generator (default effective)")
    p.add_argument("--basis", choices=BASES, help="integration basis (default adiabatic)")
    _add_pulse_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out", metavar="CSV", help="write t_over_T,p1,p2,p3,norm to this file")

    p = add("master", "integrate the four-level master equation")
    _add_pulse_flags(p)
    p.add_argument("--nplus", type=float, help="thermal occupation N at the |+> Bohr frequency (default 0)")
    p.add_argument("--nminus", type=float, help="thermal occupation N at the |-> Bohr frequency (default 0)")
    p.add_argument("--omega4T", type=float, help="energy of auxiliary level |4> times T (default 0)")
    _add_solver_flags(p)
    p.add_argument("--out", metavar="CSV", help="write t_over_T,p1,p2,p3,p4,trace to this file")

    p = add("sweep", "post-pulse populations over a Gamma*T grid")
    _add_pulse_flags(p, with_gamma=False)
    p.add_argument("--gammaT-min", dest="gammaT_min", type=float, help="first Gamma*T (default 0)")
    p.add_argument("--gammaT-max", dest="gammaT_max", type=float, help="last Gamma*T (default 3)")
    p.add_argument("--points", type=int, help="number of grid points (default 61)")
    p.add_argument("--log", action="store_const", const=True, help="log-spaced grid (needs gammaT-min > 0)")
    p.add_argument("--models", help="comma-separated models (default effective,phenomenological)")
    p.add_argument("--analytic", action="store_const", const=True,
                   help="add the weak-damping formula column p3_analytic")
    p.add_argument("--workers", type=int, help="worker threads (default: STIRAP_WORKERS or CPU count)")
    _add_solver_flags(p)
    p.add_argument("--out", metavar="CSV", help="write the sweep table to this file (default: stdout)")

    p = add("analytic", "weak-damping closed-form P3 after the pulses")
    p.add_argument("--model", choices=MODELS, help="generator (default effective)")
    _add_pulse_flags(p)

    p = add("zeno", "strong-damping outcome for a model and sequence")
    p.add_argument("--model", choices=MODELS, help="generator (default effective)")
    p.add_argument("--sequence", choices=SEQUENCES, help="pulse ordering (default counterintuitive)")

    p = add("figure", "reproduce a figure as CSV + SVG")
    p.add_argument("figure", choices=FIGURES, help="which figure")
    p.add_argument("--variant", metavar="MODEL-SEQUENCE",
                   help="for fig4: e.g. effective-intuitive or phenomenological-counterintuitive")
    p.add_argument("--alphaT", type=float, help="pulse area parameter alpha*T (default 10)")
    p.add_argument("--deltaT", type=float, help="single-photon detuning Delta*T (default 1)")
    p.add_argument("--gammaT", type=float, help="Gamma*T for fig4 traces (default 500)")
    p.add_argument("--tmaxT", type=float, help="window half-width t_max/T (default 10)")
    p.add_argument("--points", type=int, help="Gamma grid size for fig2/fig3 (default 61, fig3b 51)")
    _add_solver_flags(p)
    p.add_argument("--out-dir", dest="out_dir", metavar="DIR", help="output directory (default .)")
    return parser


def _load_config(path, command):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    section = data.get(command)
    if isinstance(section, dict):
        for k, v in section.items():
            if isinstance(v, dict):
                raise UsageError(f"config {path}: nesting deeper than one level under {command!r}")
            flat[k] = v
    known = DEFAULTS[command]
    for key in flat:
        if key not in known and key not in DEFAULTS:
            raise UsageError(f"config {path}: unknown key {key!r} for {command}")
    return {k: v for k, v in flat.items() if k in known}


def resolve(args, command) -> dict:
    """Merge defaults, config file values and explicit flags for ``command``."""
    values = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        values.update(_load_config(args.config, command))
    for key in DEFAULTS[command]:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _cfg(v, sequence=None) -> PulseConfig:
    return PulseConfig(alpha_t=float(v["alphaT"]), delta_t=float(v["deltaT"]),
                       sequence=sequence or v["sequence"], t_max_over_t=float(v["tmaxT"]))


def _opts(v) -> SimOptions:
    return SimOptions(rel_tol=float(v["rtol"]), abs_tol=float(v["atol"]), sampling=int(v["samples"]))


def _echo(v) -> str:
    return ", ".join(f"{k}={v[k]}" for k in sorted(v) if v[k] is not None)


def cmd_simulate(v, out):
    cfg = _cfg(v)
    tr = propagate(cfg, float(v["gammaT"]), v["model"], v["basis"], _opts(v))
    if v["out"]:
        tr.to_csv(v["out"])
    print(f"p1_final={tr.p1_final:.12g} p2_final={tr.p2[-1]:.12g} "
          f"p3_final={tr.p3_final:.12g} norm_final={tr.norm_final:.12g}", file=out)


def cmd_master(v, out):
    cfg = _cfg(v)
    res = ReservoirSpec(gamma=float(v["gammaT"]), n_plus=float(v["nplus"]),
                        n_minus=float(v["nminus"]), omega4=float(v["omega4T"]))
    tr = propagate_master(cfg, res, _opts(v))
    if v["out"]:
        tr.to_csv(v["out"])
    print(f"p1_final={tr.p1[-1]:.12g} p2_final={tr.p2[-1]:.12g} p3_final={tr.p3[-1]:.12g} "
          f"p4_final={tr.p4[-1]:.12g} trace_final={tr.trace[-1]:.12g}", file=out)


def cmd_sweep(v, out):
    lo, hi, n = float(v["gammaT_min"]), float(v["gammaT_max"]), int(v["points"])
    if v["log"]:
        if lo <= 0:
            raise ValueError("--log needs gammaT-min > 0")
        grid = log_grid(lo, hi, n)
    else:
        grid = linear_grid(lo, hi, n)
    models = tuple(ModelKind.parse(m) for m in str(v["models"]).split(",") if m.strip())
    spec = SweepSpec(_cfg(v), grid, models, include_analytic=bool(v["analytic"]),
                     output_path=v["out"], opts=_opts(v))
    result = sweep_gamma(spec, workers=v["workers"])
    failed = [r for r in result.rows if r.error]
    if not v["out"]:
        out.write(result.csv())
    else:
        print(f"wrote {len(result.rows)} rows to {v['out']}", file=out)
    for r in failed:
        print(f"{PROG}: warning: gammaT={r.gamma_t} model={r.model.value}: {r.error}", file=sys.stderr)


def cmd_analytic(v, out):
    cfg = _cfg(v)
    p3 = weak_damping_p3(cfg, float(v["gammaT"]), v["model"])
    print(f"p3_analytic={p3:.12g}", file=out)


def cmd_zeno(v, out):
    pred = zeno_predict(v["model"], v["sequence"])
    print(pred.outcome.value, file=out)


def _parse_variant(text):
    parts = str(text).lower().split("-", 1)
    if len(parts) != 2:
        raise UsageError(f"--variant must look like MODEL-SEQUENCE, got {text!r}")
    try:
        return ModelKind.parse(parts[0]), Sequence.parse(parts[1])
    except ValueError:
        raise UsageError(f"unknown --variant {text!r}; models {MODELS}, sequences {SEQUENCES}") from None


def cmd_figure(v, out):
    name = v["figure"]
    model = sequence = None
    if v["variant"]:
        if not name.startswith("fig4"):
            raise UsageError("--variant only applies to fig4")
        model, sequence = _parse_variant(v["variant"])
    fig_id = FigureId.FIG4A if name == "fig4" else FigureId.parse(name)
    if name == "fig4" and model is None:
        model, sequence = ModelKind.EFFECTIVE, Sequence.INTUITIVE
    grid = None
    if v["points"]:
        n = int(v["points"])
        grid = log_grid(1e-2, 1e3, n) if fig_id is FigureId.FIG3B else linear_grid(0.0, 3.0, n)
    kw = dict(alpha_t=float(v["alphaT"]), delta_t=float(v["deltaT"]), gamma_grid=grid,
              model=model, sequence=sequence, t_max_over_t=float(v["tmaxT"]), opts=_opts(v))
    if v["gammaT"] is not None:
        kw["gamma_t"] = float(v["gammaT"])
    spec = FigureSpec(fig_id, **kw)
    if name == "fig4":
        spec = FigureSpec(fig_id, stem=f"fig4_{model.value}-{sequence.value}", **kw)
    csv_path, svg_path = render_figure(spec, v["out_dir"])
    print(f"wrote {csv_path} and {svg_path}", file=out)


COMMANDS = {
    "simulate": cmd_simulate,
    "master": cmd_master,
    "sweep": cmd_sweep,
    "analytic": cmd_analytic,
    "zeno": cmd_zeno,
    "figure": cmd_figure,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        values = resolve(args, command)
        if command == "figure":
            values["figure"] = args.figure
    except UsageError as exc:
        print(f"{PROG} {command}: error: {exc}", file=sys.stderr)
        return 2
    try:
        COMMANDS[command](values, out)
    except UsageError as exc:
        print(f"{PROG} {command}: error: {exc}", file=sys.stderr)
        return 2
    except (StepSizeUnderflow, QuadratureError, DegenerateDenominator, ValueError, OSError) as exc:
        print(f"{PROG} {command}: error: {exc} [{_echo(values)}]", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
