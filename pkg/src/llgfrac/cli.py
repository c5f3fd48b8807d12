"""Command-line study runner.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import LLGError
from .harness import (
    StudyKind, config_summary, format_csv, parse_resolution, preset, run_study,
    study_defaults, write_csv,
)
from .schemes import SchemeKind

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

STUDY_ALIASES = {
    "temporal": StudyKind.TEMPORAL,
    "spatial": StudyKind.SPATIAL,
    "coupled3d": StudyKind.COUPLED3D,
    "norm": StudyKind.NORM,
    "normpreservation": StudyKind.NORM,
    "stability": StudyKind.STABILITY,
    "stabilityprobe": StudyKind.STABILITY,
}
FORCING_AT = {"mid": 0.5, "left": 0.0}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_study_flags(p):
    # every default is None so that unset flags fall through to the config file
    p.add_argument("--scheme", choices=[k.value for k in SchemeKind])
    p.add_argument("--alpha", type=float)
    p.add_argument("--dim", type=int, choices=(1, 3))
    p.add_argument("--n", type=int, help="nodes per axis when h is fixed")
    p.add_argument("--nt", type=int, help="step count when k is fixed")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--refine", help="comma-separated k or h values, e.g. T/80,T/160 or 1/16,1/32")
    p.add_argument("--forcing-at", choices=sorted(FORCING_AT),
                   help="where in each step the forcing is sampled (default mid)")
    p.add_argument("--allow-large", action="store_true", default=None,
                   help="permit 3D rows beyond 48 nodes per axis")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--no-timing", action="store_true", default=None,
                   help="omit the wall-time column for byte-reproducible output")
    p.add_argument("--config", help="key=value file; its entries override defaults, flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="llgfrac", description="LLG scheme convergence and structure studies")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("temporal", "spatial", "coupled3d", "norm", "stability"):
        _add_study_flags(sub.add_parser(name, help=f"{name} study"))
    run = sub.add_parser("run", help="study selected by --study or the config file")
    run.add_argument("--study", choices=sorted(STUDY_ALIASES))
    _add_study_flags(run)
    table = sub.add_parser("table", help="run one of the reference study presets")
    table.add_argument("number", type=int, choices=range(1, 7))
    _add_study_flags(table)
    return parser


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lower().replace("-", "_")] = value
    return out


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _coerce(key, value):
    try:
        if key in ("alpha", "t"):
            return float(value)
        if key in ("dim", "n", "nt"):
            return int(value)
        if key in ("allow_large", "no_timing"):
            return _BOOL[str(value).lower()]
    except (ValueError, KeyError):
        raise UsageError(f"bad value for {key}: {value!r}") from None
    return value


KNOWN_KEYS = {"study", "scheme", "alpha", "t", "dim", "n", "nt", "refine", "forcing_at",
              "allow_large", "out", "no_timing"}


def resolve(args) -> tuple:
    """Merge defaults < config file < flags into (StudyConfig, out path, include_timing)."""
    settings = {}
    if args.config:
        for key, value in read_config(args.config).items():
            if key not in KNOWN_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            settings[key] = _coerce(key, value)
    flags = {"scheme": args.scheme, "alpha": args.alpha, "t": args.T, "dim": args.dim,
             "n": args.n, "nt": args.nt, "refine": args.refine, "forcing_at": args.forcing_at,
             "allow_large": args.allow_large, "out": args.out, "no_timing": args.no_timing}
    if getattr(args, "study", None):
        flags["study"] = args.study
    settings.update({k: v for k, v in flags.items() if v is not None})

    if args.command == "table":
        base = preset(f"table{args.number}")
    else:
        name = args.command if args.command != "run" else settings.get("study")
        if name is None:
            raise UsageError("run needs --study or a study key in the config file")
        try:
            kind = STUDY_ALIASES[str(name).lower()]
        except KeyError:
            raise UsageError(f"unknown study {name!r}") from None
        base = study_defaults(kind, settings.get("dim", 1))

    T = settings.get("t", base.T)
    changes = {"T": T}
    for key in ("scheme", "alpha", "dim", "n", "nt", "allow_large"):
        if key in settings:
            changes[key] = settings[key]
    if "refine" in settings:
        try:
            changes["refine"] = tuple(parse_resolution(tok, T) for tok in settings["refine"].split(",") if tok.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad refinement list: {exc}") from None
    elif T != base.T and not base.sweeps_h:
        # keep the default step counts when only the final time changes
        changes["refine"] = tuple(k * T / base.T for k in base.refine)
    if "forcing_at" in settings:
        if settings["forcing_at"] not in FORCING_AT:
            raise UsageError(f"forcing_at must be one of {sorted(FORCING_AT)}")
        changes["forcing_offset"] = FORCING_AT[settings["forcing_at"]]
    out = settings.get("out")
    changes["output"] = out
    try:
        cfg = replace(base, **changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg, out, not settings.get("no_timing", False)


def _print_summary(report, stream):
    cfg = config_summary(report.config)
    print("# " + " ".join(f"{k}={v}" for k, v in cfg.items() if k != "refine"), file=stream)
    for key, fit in report.orders.items():
        print(f"# order vs {key}: " + " ".join(f"{n}={v:.4f}" for n, v in fit.items()), file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg, out, timing = resolve(args)
    except UsageError as exc:
        print(f"llgfrac: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except OSError as exc:
        print(f"llgfrac: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        report = run_study(cfg)
    except ValueError as exc:
        print(f"llgfrac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LLGError as exc:
        print(f"llgfrac: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    try:
        if out:
            write_csv(report, out, include_timing=timing)
        else:
            sys.stdout.write(format_csv(report, include_timing=timing))
    except OSError as exc:
        print(f"llgfrac: {exc}", file=sys.stderr)
        return EXIT_IO
    _print_summary(report, sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
