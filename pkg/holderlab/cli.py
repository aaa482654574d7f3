"""Command line entry point of the laboratory."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
import sys
from typing import TextIO

import yaml

from . import __version__
from .config import DEFAULT_SUITE, load_suite, read_config
from .const import EXIT_OK, EXIT_USAGE, EXIT_VERDICT_FAILED, EXPERIMENT_PREFIX, FORMAT_JSON
from .exceptions import ConfigError, HolderLabError
from .models import ExperimentConfig, RunManifest
from .registry import experiment_descriptions, run_experiment
from .utils import FORMATS, check_format, emit, utcnow

_LOGGER = logging.getLogger(__name__)


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holderlab",
        description="Run matrix experiments on operator Hölder, Zygmund and Schatten-class inequalities.",
    )
    parser.add_argument("--config", type=Path, help="YAML experiment suite (default: the packaged suite)")
    parser.add_argument("--out", type=Path, default=Path("."), help="directory receiving the reports")
    parser.add_argument(
        "--format", default=FORMAT_JSON, metavar="|".join(FORMATS), help="report format (default: json)"
    )
    parser.add_argument("--seed", type=int, help="override every seed of the configuration")
    parser.add_argument(
        "--jobs", type=_positive_int, default=1, help="parallel trial workers; results do not depend on it"
    )
    parser.add_argument(
        "--list-experiments", action="store_true", help="print the registered experiments and exit"
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def list_experiments(stream: TextIO) -> None:
    """Print every experiment id with its description and defaults."""
    for experiment_id, descriptor in experiment_descriptions().items():
        stream.write(f"{EXPERIMENT_PREFIX}{experiment_id}\n")
        stream.write(f"    {descriptor.get('description', '')}\n")
        defaults = descriptor.get("defaults")
        if defaults:
            rendered = yaml.safe_dump(defaults, default_flow_style=True, sort_keys=False).strip()
            stream.write(f"    defaults: {rendered}\n")


def run_suite(
    configs: list[ExperimentConfig], seed: int, config_digest: str, jobs: int = 1
) -> RunManifest:
    """Run the experiments in order and collect their reports."""
    manifest = RunManifest(
        version=__version__,
        config_digest=config_digest,
        seed=seed,
        started=utcnow(),
        configs=list(configs),
    )
    for index, config in enumerate(configs, start=1):
        _LOGGER.info("Experiment %s/%s: %s", index, len(configs), config.experiment_id)
        manifest.reports.append(run_experiment(config, jobs))
    manifest.finished = utcnow()
    return manifest


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.list_experiments:
        list_experiments(sys.stdout)
        return EXIT_OK

    try:
        check_format(args.format)
        text, digest = read_config(args.config or DEFAULT_SUITE)
        suite = load_suite(text, args.seed)
        manifest = run_suite(suite.experiments, suite.seed, digest, args.jobs)
        emit(manifest, args.format, args.out)
    except ConfigError as err:
        _LOGGER.error("Invalid configuration: %s", err)
        return EXIT_USAGE
    except HolderLabError as err:
        _LOGGER.error("%s", err)
        return EXIT_USAGE

    if not manifest.passed:
        failed = [report.experiment_id for report in manifest.reports if not report.passed]
        _LOGGER.warning("Verdicts failed for %s", ", ".join(failed))
        return EXIT_VERDICT_FAILED
    return EXIT_OK
