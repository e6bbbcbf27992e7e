"""Command-line entry point: ``disturbed-fso <verb> [--config PATH] [--out DIR] ...``.

Every number printed here comes from the same library calls a script would
make; the CLI only loads configuration and writes files.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import golden
from .scenario import (
    ConfigError,
    ExperimentPlan,
    load_scenario,
    parse_scenario,
    reference_scenario,
    run_scenario,
    with_wavelength,
)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_VERB_KIND = {"cloud": "cloud", "column": "column", "haze": "haze"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disturbed-fso",
        description="Optical link loss in a nuclear-disturbed atmosphere and its effect on heralded entanglement.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    helps = {
        "link-budget": "clear-air link attenuation plus any configured disturbance",
        "cloud": "stabilized-cloud scenario",
        "column": "layered debris column read from CSV",
        "haze": "PM2.5 haze scenario",
        "qse-sweep": "simulate heralded pairs and estimate entanglement vs loss",
        "golden": "write the reference-value table and a regeneration log",
    }
    for verb, text in helps.items():
        p = sub.add_parser(verb, help=text)
        p.add_argument("--config", type=Path, help="scenario JSON file")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--seed", type=int, help="experiment seed (overrides config)")
        p.add_argument("--chains", type=int, help="number of sampler chains (overrides config)")
        p.add_argument("--wavelength-nm", type=float, help="wavelength override in nm")
    return parser


def _scenario(args):
    if args.config is not None:
        return load_scenario(args.config)
    return parse_scenario(reference_scenario())


def _apply_overrides(scenario, args):
    if args.wavelength_nm is not None:
        if not args.wavelength_nm > 0:
            raise ConfigError("--wavelength-nm must be > 0")
        scenario = with_wavelength(scenario, args.wavelength_nm)
    if args.chains is not None:
        if args.chains < 2:
            raise ConfigError("--chains must be >= 2")
        if scenario.experiment is not None:
            plan = scenario.experiment
            scenario = replace(
                scenario, experiment=replace(plan, sampler=replace(plan.sampler, n_chains=args.chains))
            )
    return scenario


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.verb == "golden":
        out = args.out or Path("golden")
        for path in golden.generate_reference_tables(out):
            print(path)
        return 0

    stage = "configuration"
    try:
        scenario = _apply_overrides(_scenario(args), args)
        kind = _VERB_KIND.get(args.verb)
        if kind is not None and scenario.disturbance_kind != kind:
            raise ConfigError(
                f"'{args.verb}' needs disturbance.kind = \"{kind}\", "
                f"config has \"{scenario.disturbance_kind}\"",
                source=str(args.config) if args.config else None,
            )
        if args.verb == "qse-sweep":
            if scenario.experiment is None:
                raise ConfigError("'qse-sweep' needs an \"experiment\" section",
                                  source=str(args.config) if args.config else None)  # fmt: skip
        elif scenario.experiment is not None:
            scenario = replace(scenario, experiment=None)
        stage = f"{args.verb} computation"
        result = run_scenario(scenario, output_path=args.out, seed=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"error: {stage} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    print(json.dumps(result.summary, indent=2))
    if result.sweep is not None and args.out is None and scenario.output_path is None:
        from .experiment import SWEEP_COLUMNS

        print(",".join(SWEEP_COLUMNS))
        for row in result.sweep:
            print(",".join(str(getattr(row, c)) for c in SWEEP_COLUMNS))
    return 0


if __name__ == "__main__":
    sys.exit(main())
