"""Command-line interface.

Commands:
    simulate  Simulate a volatility path and write noisy observations.
    estimate  Estimate the density from an observations file.
    mc        Run a Monte-Carlo study for each requested sample size.
    selftest  Run the analytic-identity checks.

Configuration is resolved as preset values, then config-file values, then
command-line flags, and written to ``manifest.toml`` in the output
directory. Feeding that manifest back with ``--config`` repeats the run.

Example:
    ```bash
    mellin-volatility simulate --process exp-ou --n 5000 --delta 0.01 --seed 7
    mellin-volatility estimate --input out/observations.csv --adaptive --out est
    mellin-volatility mc --preset figure1 --reps 2 --seed 1
    ```
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tomllib
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from mellin_volatility.config import RunConfig
from mellin_volatility.estimator import (
    build_estimate,
    evaluate_clipped,
    evaluate_surface,
    select_cutoff,
)
from mellin_volatility.evaluation import run_monte_carlo
from mellin_volatility.exceptions import NumericalDiagnosticError, ReplicationError
from mellin_volatility.io import (
    read_observations,
    write_diagnostics,
    write_manifest,
    write_mc_outputs,
    write_observations,
    write_surface,
)
from mellin_volatility.noise import NoiseModel
from mellin_volatility.processes import generate_observations, simulate_path
from mellin_volatility.registry import PresetRegistry, default_registry
from mellin_volatility.selftest import run_selftest
from mellin_volatility.types import (
    CutoffRect,
    FrequencyGrid,
    NoiseKind,
    ProcessKind,
    SelectionMode,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

OBSERVATIONS_FILE = "observations.csv"
SURFACE_FILE = "surface.csv"
DIAGNOSTICS_FILE = "diagnostics.csv"

_NOT_CONFIG = frozenset({"command", "config", "verbose"})


def _float_pair(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from exc


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    common.add_argument("--config", type=Path, help="TOML config file, e.g. a previous manifest")
    common.add_argument("--preset", help="named preset applied below file and flags")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads (default: available cores)")

    sim = common.add_argument_group("simulation")
    sim.add_argument("--process", choices=[p.value for p in ProcessKind])
    sim.add_argument("--n", type=int, help="number of observations")
    sim.add_argument("--sizes", type=_int_list, help="sample sizes for mc, e.g. 5000,20000")
    sim.add_argument("--delta", type=float, help="observation step in (0, 1)")
    sim.add_argument("--delta-rule", choices=["fixed", "theorem-rate"])
    sim.add_argument("--substeps", type=int, help="Euler steps per observation interval")
    sim.add_argument("--burn-in", type=int, help="discarded leading intervals")
    sim.add_argument("--cir-theta", type=_float_pair, metavar="A,B")
    sim.add_argument("--cir-kappa", type=_float_pair, metavar="A,B")
    sim.add_argument("--cir-sigma", type=_float_pair, metavar="A,B")

    est = common.add_argument_group("estimation")
    est.add_argument("--noise", choices=[k.value for k in NoiseKind])
    est.add_argument("--gamma-shape", type=_float_pair, metavar="A,B")
    est.add_argument("--gamma-rate", type=_float_pair, metavar="A,B")
    est.add_argument("--c", type=_float_pair, metavar="A,B", help="development point")
    est.add_argument("--k", type=_float_pair, metavar="A,B", help="fixed cutoff box")
    est.add_argument("--adaptive", action="store_true", default=None)
    est.add_argument("--chi", type=float, help="penalty constant")
    est.add_argument("--grid-step", type=float, help="candidate lattice step")
    est.add_argument("--frequency-step", type=float, help="trapezoid step in frequency")
    est.add_argument("--mode", choices=[m.value for m in SelectionMode])
    est.add_argument("--oracle-chi", type=float, help="penalty constant of the noiseless oracle")
    est.add_argument("--input", help="observations CSV")

    ev = common.add_argument_group("evaluation")
    ev.add_argument("--reps", type=int, help="Monte-Carlo replications")
    ev.add_argument("--probe-min", type=float)
    ev.add_argument("--probe-max", type=float)
    ev.add_argument("--probe-size", type=int)
    ev.add_argument("--section-coordinate", type=float)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mellin-volatility",
        description="Mellin spectral cut-off density estimation for stochastic volatility.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    commands.add_parser("simulate", parents=[common], help="simulate noisy observations")
    commands.add_parser("estimate", parents=[common], help="estimate the density surface")
    commands.add_parser("mc", parents=[common], help="run a Monte-Carlo study")
    selftest = commands.add_parser("selftest", help="run analytic-identity checks")
    selftest.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def resolve_config(
    args: argparse.Namespace, registry: PresetRegistry | None = None
) -> RunConfig:
    """Merge preset, config file and flags into a validated ``RunConfig``.

    Raises:
        UnknownPresetError: If the preset is not registered.
        pydantic.ValidationError: If the merged values are invalid.
        OSError: If the config file cannot be read.
    """
    registry = registry or default_registry()
    file_data: dict[str, Any] = {}
    if args.config is not None:
        with open(args.config, "rb") as f:
            file_data = tomllib.load(f)

    flags = {
        name: value
        for name, value in vars(args).items()
        if name not in _NOT_CONFIG and value is not None
    }
    preset_name = flags.get("preset", file_data.get("preset"))
    data: dict[str, Any] = {}
    if preset_name is not None:
        data.update(registry.resolve(preset_name).values)
    data.update(file_data)
    data.update(flags)
    data["command"] = args.command
    data.setdefault("threads", os.cpu_count() or 1)
    return RunConfig(**data)


def cmd_simulate(config: RunConfig) -> list[Path]:
    """Simulate one path and write ``observations.csv``."""
    out = Path(config.out)
    bundle = simulate_path(
        config.process, config.path_config(), config.ou_params(), config.cir_params()
    )
    noise = NoiseModel.from_kind(config.noise, config.gamma_shape, config.gamma_rate)
    obs = generate_observations(bundle, config.seed, noise, c=config.c)
    return [write_observations(out / OBSERVATIONS_FILE, bundle, obs)]


def cmd_estimate(config: RunConfig) -> list[Path]:
    """Estimate on the probe grid; write ``surface.csv`` and, if adaptive, ``diagnostics.csv``."""
    if config.input is None:
        raise ValueError("estimate needs an observations file (--input)")
    if not config.adaptive and config.k is None:
        raise ValueError("estimate needs a fixed cutoff (--k) or --adaptive")

    out = Path(config.out)
    obs = read_observations(config.input, config.delta, config.c)
    noise = NoiseModel.from_kind(config.noise, config.gamma_shape, config.gamma_rate)
    written: list[Path] = []
    if config.adaptive:
        _, diagnostics = select_cutoff(obs, noise, config.selection_config())
        handle = diagnostics.estimate()
        written.append(write_diagnostics(out / DIAGNOSTICS_FILE, diagnostics))
    else:
        cutoff = CutoffRect.of(config.k)
        grid = FrequencyGrid(cutoff, config.frequency_step)
        handle = build_estimate(obs, noise, obs.c, cutoff, grid)

    probe = config.probe_axis()
    columns = {
        "estimate": evaluate_surface(handle, probe, probe),
        "estimate_clipped": evaluate_clipped(handle, probe, probe),
    }
    written.append(write_surface(out / SURFACE_FILE, probe, probe, columns))
    return written


def cmd_mc(config: RunConfig) -> list[Path]:
    """Run one study per sample size and write its CSVs, suffixed by ``n``."""
    written: list[Path] = []
    for n in config.sample_sizes():
        result = run_monte_carlo(config.mc_config(n))
        for kind in ("noisy", "oracle"):
            s = result.summary(kind)
            logger.info(
                "n=%d %s ISE: median %.4g (quartiles %.4g, %.4g)",
                n,
                kind,
                s.median,
                s.lower_quartile,
                s.upper_quartile,
            )
        written.extend(write_mc_outputs(config.out, result))
    return written


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate, "mc": cmd_mc}


def exit_code(exc: BaseException) -> int | None:
    """Exit status for an error, or None if it is not an expected failure."""
    if isinstance(exc, ReplicationError) and exc.__cause__ is not None:
        return exit_code(exc.__cause__)
    if isinstance(exc, NumericalDiagnosticError):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (ValueError, KeyError)):
        return EXIT_VALIDATION
    return None


def run(args: argparse.Namespace, registry: PresetRegistry | None = None) -> int:
    if args.command == "selftest":
        return run_selftest()
    config = resolve_config(args, registry)
    write_manifest(config.out, config)
    for path in COMMANDS[config.command](config):
        print(path)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``mellin-volatility`` console script."""
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except Exception as exc:
        code = exit_code(exc)
        if code is None:
            raise
        logger.debug("Command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
