"""Command line entry point: ``optofilter <subcommand> --config <path>``.

Exit codes: 0 success, 2 configuration error, 3 physics error at a
single-point run.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import runs
from .config import MAX_TOL, load_config
from .errors import ConfigError, PhysicsError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def _positive_tol(text):
    x = float(text)
    if not 0 < x <= MAX_TOL:
        raise argparse.ArgumentTypeError(f"tol must lie in (0, {MAX_TOL:g}]")
    return x


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("need a positive integer")
    return n


def build_parser():
    parser = argparse.ArgumentParser(
        prog="optofilter",
        description="Conditional states of a Wiener-filtered optomechanical mirror.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("derive", "print the derived parameters"),
        ("spectrum", "unconditional and conditional spectra on a frequency grid"),
        ("sweep2d", "evaluate quantities on a two-parameter grid"),
        ("report", "full single-point report (JSON)"),
        ("angle", "print the homodyne angle minimizing omega_theta / omega_m"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="config file, or recipe:fig1 ... recipe:fig4")
        p.add_argument("--out", help="output path (default: config 'out' or stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--tol", type=_positive_tol, help="quadrature relative tolerance")
        p.add_argument("--threads", type=_positive_int, default=1, help="worker processes for sweeps")
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _overlay_path(out):
    path = Path(out)
    return str(path.with_name(path.stem + "_overlay" + path.suffix))


def run(args):
    cfg = load_config(args.config)
    if args.tol is not None:
        cfg = replace(cfg, tol=args.tol)
    out = args.out if args.out is not None else cfg.out
    fmt = args.format or cfg.format

    if args.command == "derive":
        doc = runs.derive_doc(cfg)
        if fmt == "json":
            _emit(runs.dumps(doc), out)
        else:
            lines = ["name,value"] + [f"{k},{v if isinstance(v, bool) else runs.fmt(v)}" for k, v in doc.items()]
            _emit("\n".join(lines) + "\n", out)
    elif args.command == "angle":
        p = runs.resolved_params(cfg)
        d = runs.derive(p, warn=False)
        theta = runs.optimal_angle(d.zeta, d.alpha)
        if fmt == "json":
            _emit(runs.dumps({"theta_opt": theta, "alpha": d.alpha, "zeta": d.zeta}), out)
        else:
            _emit(runs.fmt(theta) + "\n", out)
    elif args.command == "report":
        _emit(runs.dumps(runs.run_report(cfg)), out)
    elif args.command == "spectrum":
        rows = runs.run_spectrum(cfg)
        _emit(runs.spectrum_json(rows) if fmt == "json" else runs.spectrum_csv(rows), out)
    elif args.command == "sweep2d":
        grid = runs.run_sweep2d(cfg, threads=args.threads)
        if fmt == "json":
            _emit(runs.sweep_json(grid), out)
        else:
            _emit(runs.sweep_csv(grid), out)
            if grid.overlay:
                if out is None:
                    print("overlay series not written: needs --out", file=sys.stderr)
                else:
                    _emit(runs.overlay_csv(grid), _overlay_path(out))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physics error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
