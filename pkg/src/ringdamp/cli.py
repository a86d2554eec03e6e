"""Command-line interface.

Subcommands: simulate, portrait, sweep, equilibria, validate.
Exit codes are a stable scripting contract:
    0  success
    2  usage or configuration error
    3  numerical failure during integration
    4  validation failure
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, configio, experiments
from .analysis import equilibria as find_equilibria
from .errors import ConfigError, NumericalDomainError, RingdampError
from .experiments import run_config_from_dict, scenario_dict, sweep_spec_from_dict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

OUT_ROOT_ENV = "RINGDAMP_OUT_ROOT"


def _out_root():
    return Path(os.environ.get(OUT_ROOT_ENV, "runs"))


def _add_config_source(parser, default_scenario=None):
    parser.add_argument("--config", type=Path, help="YAML run-config file")
    parser.add_argument("--scenario", choices=sorted(experiments.SCENARIOS),
                        default=default_scenario,
                        help="built-in named scenario")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY.PATH=VALUE",
                        help="override a config key (repeatable)")


def _add_common(parser):
    parser.add_argument("--out", type=Path, help="output directory")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", "-q", action="store_true")
    verbosity.add_argument("--verbose", "-v", action="store_true")


def _load_run_doc(args, context):
    if (args.config is None) == (args.scenario is None):
        raise ConfigError(f"{context}: give exactly one of --config or --scenario")
    doc = configio.load_yaml(args.config) if args.config is not None \
        else scenario_dict(args.scenario)
    configio.apply_overrides(doc, args.overrides)
    return doc


def _resolve_out(args, name):
    return args.out if args.out is not None else _out_root() / name


def _print_run_summary(result, quiet):
    if quiet:
        return
    manifest = result.manifest
    print(f"run directory: {result.out_dir}")
    print(f"terminated: {manifest['terminated']}")
    if manifest["casimir_max_rel_err"] is not None:
        print(f"casimir max relative drift: {manifest['casimir_max_rel_err']:.3e}")
    if result.settling is not None:
        rep = result.settling
        settled = f"{rep.settling_time:g} s" if rep.settled else "not settled"
        print(f"settling time (below {np.degrees(rep.threshold):g} deg): {settled}")
        print(f"residual nutation: {np.degrees(rep.residual_nutation):.4f} deg")


def _cmd_simulate(args):
    doc = _load_run_doc(args, "simulate")
    config = run_config_from_dict(doc)
    out_dir = _resolve_out(args, config.name)
    result = experiments.run(config, out_dir,
                             settling_threshold=np.deg2rad(args.threshold_deg),
                             render_figures=args.plots)
    _print_run_summary(result, args.quiet)
    return EXIT_NUMERICAL if result.manifest["terminated"].startswith("error") \
        else EXIT_OK


def _cmd_portrait(args):
    doc = _load_run_doc(args, "portrait")
    doc["outputs"] = ["portrait"]
    config = run_config_from_dict(doc)
    out_dir = _resolve_out(args, f"{config.name}-portrait")
    result = experiments.run(config, out_dir,
                             portrait_offset=np.deg2rad(args.offset_deg),
                             render_figures=args.plots)
    if not args.quiet:
        print(f"portrait bundle: {result.out_dir / 'portrait'}")
    return EXIT_NUMERICAL if result.manifest["terminated"].startswith("error") \
        else EXIT_OK


def _cmd_sweep(args):
    doc = configio.load_yaml(args.config)
    configio.apply_overrides(doc, args.overrides)
    spec = sweep_spec_from_dict(doc)
    out_dir = _resolve_out(args, f"{spec.base.name}-sweep")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_csv = out_dir / "sweep.csv"
    rows = experiments.sweep(spec, out_csv=out_csv, workers=args.workers)
    failures = sum(1 for r in rows if r["error"])
    if not args.quiet:
        print(f"sweep table: {out_csv} ({len(rows)} rows, {failures} failed)")
    return EXIT_OK


def _cmd_equilibria(args):
    if args.config is not None or args.scenario is not None:
        doc = _load_run_doc(args, "equilibria")
        params = run_config_from_dict(doc).params
    else:
        doc = scenario_dict("paper-point-mass")
        configio.apply_overrides(doc, args.overrides)
        params = run_config_from_dict(doc).params
    points = find_equilibria(params, args.h_mag, classify=not args.no_classify)
    print(f"{'axis':>5} {'h':>28} {'classification':>22} {'rhs residual':>14}")
    for p in points:
        h_txt = "[" + ", ".join(f"{v:+.3g}" for v in p.momentum) + "]"
        cls = p.classification.value if p.classification else "-"
        print(f"{p.axis:>5} {h_txt:>28} {cls:>22} {p.rhs_residual:>14.3e}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        import json
        doc = [{"axis": p.axis, "momentum": [float(v) for v in p.momentum],
                "slug_rate": p.slug_rate,
                "classification": p.classification.value if p.classification else None,
                "rhs_residual": p.rhs_residual} for p in points]
        with open(args.out / "equilibria.json", "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _cmd_validate(args):
    from .validation import run_all
    results = run_all()
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        if not r.passed:
            failed += 1
        print(f"[{mark}] {r.name:<{width}}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ringdamp",
        description="Spinning-satellite ring nutation damper simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configuration and "
                       "persist series, settling report, and manifest")
    _add_config_source(p)
    _add_common(p)
    p.add_argument("--threshold-deg", type=float, default=2.0,
                   help="settling threshold in degrees (default 2)")
    p.add_argument("--plots", action="store_true",
                   help="render report figures next to the CSV output")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("portrait", help="trajectory bundle seeded near the "
                       "six axis points on one momentum sphere")
    _add_config_source(p)
    _add_common(p)
    p.add_argument("--offset-deg", type=float, default=5.0,
                   help="angular offset of seeds from each axis (default 5)")
    p.add_argument("--plots", action="store_true",
                   help="render sphere figures next to the CSV output")
    p.set_defaults(func=_cmd_portrait)

    p = sub.add_parser("sweep", help="Cartesian parameter sweep with a "
                       "metrics table")
    p.add_argument("--config", type=Path, required=True,
                   help="YAML sweep-spec file")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY.PATH=VALUE")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel worker processes (default 1)")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("equilibria", help="the six axis fixed points with "
                       "empirical stability classification")
    _add_config_source(p)
    _add_common(p)
    p.add_argument("--h-mag", type=float, default=1.0,
                   help="momentum-sphere radius (default 1)")
    p.add_argument("--no-classify", action="store_true",
                   help="skip the probe-trajectory classification")
    p.set_defaults(func=_cmd_equilibria)

    p = sub.add_parser("validate", help="run the invariant suite and print "
                       "a pass/fail table")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDomainError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RingdampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
