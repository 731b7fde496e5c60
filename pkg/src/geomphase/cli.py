"""Command-line entry point: ``geomphase run|validate|list-scenarios``.

Exit codes: 0 success, 1 physics failure (a deviation beyond the
configured tolerance, a flagged row, or a systemic physics error),
2 config error, 3 I/O error.
"""

import argparse
import os
import sys

from .errors import ConfigError
from .scenarios import KINDS, ScenarioAbort, emit_report, load_config, run_scenario

EXIT_OK, EXIT_PHYSICS, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

_KIND_HELP = {
    "berry-cone": "discrete, connection or adiabatic Berry phase of a spin in a field sweeping a cone",
    "berry-custom-loop": "Berry phase for a field following a geodesic polygon",
    "aa-precession": "cyclic precession of a spin coherent state in a constant field",
    "aa-vs-berry-sweep": "cyclic phase of slow cone sweeps against the Berry phase",
    "wz-quadrupole": "non-Abelian holonomy of a Kramers pair of the spin quadrupole",
    "pancharatnam-chain": "phase of a beam through a closed chain of polarizers",
}


def build_parser():
    p = argparse.ArgumentParser(prog="geomphase", description="Geometric-phase scenario runner.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario config and write its report")
    run.add_argument("config")
    run.add_argument("--format", choices=("csv", "json"), default=None,
                     help="report format (default: from the output extension, else csv)")
    run.add_argument("--out", default=None, help="report path (default: config 'output', else stdout)")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--jobs", type=int, default=1, help="worker processes for independent rows")
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")
    sub.add_parser("list-scenarios", help="list the supported scenario kinds")
    return p


def _load(path):
    try:
        return load_config(path), None
    except ConfigError as exc:
        return None, ("\n".join(f"config error: {e}" for e in exc.errors), EXIT_CONFIG)
    except OSError as exc:
        return None, (f"cannot read {path}: {exc.strerror or exc}", EXIT_IO)


def _resolve_out(args, cfg):
    if args.out is not None:
        return args.out
    if cfg.output is None:
        return None
    # relative outputs in a config resolve against the config's directory
    return os.path.join(os.path.dirname(os.path.abspath(args.config)), cfg.output)


def _cmd_run(args):
    cfg, err = _load(args.config)
    if err:
        print(err[0], file=sys.stderr)
        return err[1]
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2 ** 64:
            print("config error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
            return EXIT_CONFIG
        cfg = cfg.with_seed(args.seed)
    if args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    out = _resolve_out(args, cfg)
    fmt = args.format or ("json" if out and out.endswith(".json") else "csv")
    try:
        report = run_scenario(cfg, jobs=args.jobs)
    except ScenarioAbort as exc:
        print(f"scenario aborted: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    try:
        text = emit_report(report, fmt, out)
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    if out is None:
        sys.stdout.write(text)
    for c in report.checks:
        status = "ok" if c.passed else "FAILED"
        print(f"check {status}: {c.name}" + (f" [{c.detail}]" if c.detail and not c.passed else ""),
              file=sys.stderr)
    flagged = [r.level for r in report.rows if r.flagged]
    if flagged:
        print(f"flagged rows: {', '.join(flagged)}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_PHYSICS


def _cmd_validate(args):
    cfg, err = _load(args.config)
    if err:
        print(err[0], file=sys.stderr)
        return err[1]
    print(f"{args.config}: valid {cfg.kind} scenario '{cfg.name}'")
    return EXIT_OK


def _cmd_list(args):
    for k in KINDS:
        print(f"{k:20s} {_KIND_HELP[k]}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "validate": _cmd_validate, "list-scenarios": _cmd_list}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
