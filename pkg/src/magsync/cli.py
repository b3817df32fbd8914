"""
Command-line front end.

Exit codes: 0 success, 1 config or usage error, 2 unstable operating point
for a single-point command, 3 I/O error. Failures print one JSON object
``{"error": <code>, "message": ..., "details": [...]}`` on stderr.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .lindyn import (InstabilityError, build_model, dump_arrays,
                     evolve_covariance, lyapunov_residual, stability,
                     steady_covariance)
from .measures import measure_all
from .physpar import (TWO_PI, ConfigError, describe, load_config)
from .sweep import (PRESETS, Axis, SweepSpec, figure_preset, run_sweep,
                    write_csv, write_sidecar)

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_IO = 0, 1, 2, 3
ERROR_CODES = {EXIT_CONFIG: "config_error", EXIT_UNSTABLE: "unstable", EXIT_IO: "io_error"}


class CLIError(Exception):
    def __init__(self, exit_code, message, details=None, code=None):
        self.exit_code = exit_code
        self.code = code or ERROR_CODES[exit_code]
        self.details = list(details or [])
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(EXIT_CONFIG, message, code="usage_error")


def _log_base(text):
    if text in ("e", "ln"):
        return math.e
    try:
        b = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid log base {text!r}") from None
    if not b > 1:
        raise argparse.ArgumentTypeError("log base must be > 1")
    return b


def _load(args):
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {args.config}: {exc.strerror}") from None
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc), details=exc.problems) from None
    if getattr(args, "full_linearization", False):
        cfg = cfg.replace(full_linearization=True)
    return cfg


def _outdir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot create {path}: {exc.strerror}") from None
    if not os.access(path, os.W_OK):
        raise CLIError(EXIT_IO, f"output directory {path} is not writable")
    return path


def _write_outputs(result, outdir, stem, log_base):
    _outdir(outdir)
    csv_path = os.path.join(outdir, f"{stem}.csv")
    try:
        write_csv(result, csv_path, log_base)
        write_sidecar(result, os.path.join(outdir, f"{stem}.json"), log_base)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {csv_path}: {exc.strerror}") from None
    return csv_path


def _model(cfg):
    try:
        return build_model(cfg)
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc), details=exc.problems) from None
    except np.linalg.LinAlgError as exc:
        raise CLIError(EXIT_CONFIG, f"mean-field solve failed: {exc}") from None


def cmd_check(args, out):
    cfg = _load(args)
    print(describe(cfg), file=out)
    return EXIT_OK


def cmd_stability(args, out):
    cfg = _load(args)
    rep = stability(_model(cfg).K)
    doc = {
        "stable": rep.stable,
        "max_real_part": rep.max_real_part,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in
                        sorted(rep.eigenvalues, key=lambda z: (-z.real, z.imag))],
    }
    print(json.dumps(doc, indent=2), file=out)
    if not rep.stable:
        raise CLIError(EXIT_UNSTABLE, "operating point is unstable",
                       details=[f"max real part {rep.max_real_part:.6g} rad/s"])
    return EXIT_OK


def cmd_steady(args, out):
    cfg = _load(args)
    model = _model(cfg)
    rep = stability(model.K)
    if not rep.stable:
        raise CLIError(EXIT_UNSTABLE, "operating point is unstable",
                       details=[f"max real part {rep.max_real_part:.6g} rad/s"])
    C = steady_covariance(model.K, model.L, check_stability=False)
    m = measure_all(C)
    doc = m.as_dict()
    doc["E_dd"] = m.E_dd / math.log(args.log_base)
    doc["log_base"] = "e" if args.log_base == math.e else args.log_base
    doc["stable"] = True
    doc["max_real_part"] = rep.max_real_part
    doc["residual"] = lyapunov_residual(model.K, C, model.L)
    print(json.dumps(doc, indent=2), file=out)
    if args.output:
        _outdir(args.output)
        try:
            dump_arrays(os.path.join(args.output, "steady.bin"), model, C, cfg)
        except OSError as exc:
            raise CLIError(EXIT_IO, f"cannot write arrays: {exc.strerror}") from None
    return EXIT_OK


def cmd_evolve(args, out):
    cfg = _load(args)
    times = tuple(float(t) for t in np.linspace(0.0, args.t_max, args.samples))
    try:
        spec = SweepSpec(base=cfg, axes=(), mode="evolve", times=times, name="evolve")
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc), details=exc.problems) from None
    rep = stability(_model(cfg).K)
    if not rep.stable:
        raise CLIError(EXIT_UNSTABLE, "operating point is unstable",
                       details=[f"max real part {rep.max_real_part:.6g} rad/s"])
    result = run_sweep(spec)
    path = _write_outputs(result, args.output, "evolve", args.log_base)
    print(path, file=out)
    return EXIT_OK


_AXIS_UNITS = {"rad/s": 1.0, "Hz": TWO_PI, "kHz": TWO_PI * 1e3, "MHz": TWO_PI * 1e6,
               "GHz": TWO_PI * 1e9, "K": 1.0, "mK": 1e-3, "rad": 1.0}


def parse_axis(text, base):
    """
    ``PARAMS=START:STOP:NUM[:log][@UNIT]``.

    PARAMS is one attribute or a comma-separated tied group (``delta_a,delta_c``).
    UNIT is a physical unit (Hz means /2pi Hz) or the name of another
    parameter, whose base value becomes the scale (``@omega_b``).
    """
    try:
        lhs, rhs = text.split("=", 1)
        unit = None
        if "@" in rhs:
            rhs, unit = rhs.split("@", 1)
        parts = rhs.split(":")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        log = len(parts) > 3 and parts[3] == "log"
    except (ValueError, IndexError):
        raise CLIError(EXIT_CONFIG, f"bad axis {text!r}; expected PARAMS=START:STOP:NUM[:log][@UNIT]",
                       code="usage_error") from None
    params = tuple("lam" if p == "lambda" else p for p in lhs.split(","))
    for p in params:
        if not hasattr(base, p) or p in ("drive", "site2"):
            raise CLIError(EXIT_CONFIG, f"unknown sweep parameter {p!r}")
    if unit is None:
        unit = {"T": "K", "theta": "rad"}.get(params[0], "Hz")
    if unit in _AXIS_UNITS:
        scale = _AXIS_UNITS[unit]
    elif hasattr(base, unit) and isinstance(getattr(base, unit), float):
        scale = getattr(base, unit)
    else:
        raise CLIError(EXIT_CONFIG, f"unknown axis unit {unit!r}")
    grid = np.geomspace(start, stop, num) if log else np.linspace(start, stop, num)
    name = ",".join(lhs.split(","))
    name = f"{name}/{unit}" if unit not in ("K", "rad", "rad/s") else name
    try:
        return Axis(name=name, params=params, values=tuple(float(v) * scale for v in grid),
                    unit=unit, scale=scale)
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc)) from None


def cmd_sweep(args, out):
    cfg = _load(args)
    axes = tuple(parse_axis(a, cfg) for a in args.axis)
    times = None
    if args.evolve:
        times = tuple(float(t) for t in np.linspace(0.0, args.t_max, args.samples))
    try:
        spec = SweepSpec(base=cfg, axes=axes, mode="evolve" if args.evolve else "steady",
                         times=times, name=args.name)
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc), details=exc.problems) from None
    result = run_sweep(spec, workers=args.workers)
    print(_write_outputs(result, args.output, args.name, args.log_base), file=out)
    return EXIT_OK


def cmd_figure(args, out):
    cfg = _load(args)
    kw = {}
    if args.grid is not None:
        kw = {"n2d": args.grid, "n1d": args.grid}
    if args.samples is not None:
        kw["n_time"] = args.samples
    try:
        spec = figure_preset(args.name, cfg, **kw)
    except ConfigError as exc:
        raise CLIError(EXIT_CONFIG, str(exc), details=exc.problems) from None
    if args.t_max is not None and spec.mode == "evolve":
        n = len(spec.times)
        spec = SweepSpec(base=spec.base, axes=spec.axes, mode="evolve", name=spec.name,
                         times=tuple(float(t) for t in np.linspace(0.0, args.t_max, n)))
    result = run_sweep(spec, workers=args.workers)
    print(_write_outputs(result, args.output, args.name, args.log_base), file=out)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="magsync", description="Two-magnon entanglement and synchronization simulator")
    p.add_argument("--version", action="version", version=f"magsync {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, output=False, output_required=False):
        sp.add_argument("config", help="config file")
        sp.add_argument("--full-linearization", action="store_true",
                        help="include the phonon back-action term on the magnons")
        sp.add_argument("--log-base", type=_log_base, default=math.e,
                        help="logarithm base for printed E_dd: e (default) or a number such as 2")
        if output:
            sp.add_argument("-o", "--output", required=output_required, help="output directory")

    sp = sub.add_parser("check", help="validate a config and print resolved parameters")
    sp.add_argument("config")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("stability", help="drift-matrix eigenvalues")
    common(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("steady", help="steady-state measures")
    common(sp, output=True)
    sp.set_defaults(func=cmd_steady)

    sp = sub.add_parser("evolve", help="time evolution from vacuum")
    common(sp, output=True, output_required=True)
    sp.add_argument("--t-max", type=float, default=1e-6, help="final time in s")
    sp.add_argument("--samples", type=int, default=2001)
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("sweep", help="1-D or 2-D parameter sweep")
    common(sp, output=True, output_required=True)
    sp.add_argument("--axis", action="append", required=True,
                    help="PARAMS=START:STOP:NUM[:log][@UNIT], repeat for a second axis")
    sp.add_argument("--name", default="sweep")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--evolve", action="store_true", help="time evolution at each axis point")
    sp.add_argument("--t-max", type=float, default=1e-6)
    sp.add_argument("--samples", type=int, default=2001)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("figure", help="reproduce a figure preset as CSV")
    sp.add_argument("name", choices=PRESETS)
    common(sp, output=True, output_required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--grid", type=int, default=None, help="override grid resolution")
    sp.add_argument("--samples", type=int, default=None, help="override time samples (fig6)")
    sp.add_argument("--t-max", type=float, default=None, help="override final time (fig6)")
    sp.set_defaults(func=cmd_figure)
    return p


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, stdout)
    except CLIError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc), "details": exc.details}),
              file=stderr)
        return exc.exit_code
    except InstabilityError as exc:
        print(json.dumps({"error": "unstable", "message": str(exc), "details": []}), file=stderr)
        return EXIT_UNSTABLE


if __name__ == "__main__":
    sys.exit(main())
