"""
Command line front end.

Every command reads a scenario (JSON, see ScenarioConfig) and writes
plot-ready CSV files and JSON reports into --out:

    simulate      concentration.csv, clean_voltage.csv, noisy_voltage.csv, simulation.json
    sweep         sweep_T<period>_{concentration,clean_voltage,noisy_voltage}.csv, sweep_summary.csv
    validate      report.json
    noise-report  noise_report.json, residual_histogram.csv, qq_points.csv
    oracle        oracle_report.json, oracle_bins.csv

Shared options (--config, --defaults, --seed, --out, --threads, --verbose) may
be given before or after the command name.

Exit codes: 0 success, 2 parse or configuration error, 3 numerical or domain error.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np
import pandas as pd

from omc_channel_sim.channel.params import ChannelDiagnostics, GeometryKind
from omc_channel_sim.config.runtime import THREADS_ENV_VAR
from omc_channel_sim.config.scenario import MAX_SEED, ScenarioConfig, ScenarioPreset
from omc_channel_sim.exceptions import OmcSimError
from omc_channel_sim.metrics.report import NoiseReport
from omc_channel_sim.metrics.statistics import qq_against_normal, qq_slope, residual_histogram
from omc_channel_sim.oracle.comparison import compare_bounded, compare_unbounded
from omc_channel_sim.oracle.particles import simulate_bounded, simulate_unbounded
from omc_channel_sim.receiver.mox_sensor import baseline_voltage
from omc_channel_sim.sequence.superposition import simulate_chain
from omc_channel_sim.sequence.sweep import DEFAULT_SYMBOL_PERIODS, PULSES_PER_SEQUENCE, run_symbol_period_sweep
from omc_channel_sim.trace_io.csv_traces import CONCENTRATION_COLUMN, load_csv, save_csv
from omc_channel_sim.trace_io.validation import compare_with_model, validate

logger = logging.getLogger("omc_channel_sim")

EXIT_OK = 0


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64 - 1], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _periods(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or any(not value > 0 for value in values):
        raise argparse.ArgumentTypeError("symbol periods must be positive")
    return values


def _add_common_options(parser: argparse.ArgumentParser, with_defaults: bool):
    """
    Registers the options shared by every command.

    They are accepted before and after the command name. Only the top-level
    parser carries defaults; an option left out after the command keeps the
    value given before it.
    """

    def default(value):
        return value if with_defaults else argparse.SUPPRESS

    default_preset = ScenarioPreset.table1_bounded.value
    parser.add_argument("--config", metavar="PATH", default=default(None), help="Scenario JSON document.")
    parser.add_argument(
        "--defaults",
        choices=[preset.value for preset in ScenarioPreset],
        default=default(default_preset),
        help=f"Preset used when no --config is given (default: {default_preset}).",
    )
    parser.add_argument("--seed", type=_seed, metavar="U64", default=default(None), help="Override the scenario seed.")
    parser.add_argument("--out", metavar="DIR", default=default("."), help="Output directory (default: .).")
    parser.add_argument(
        "--threads",
        type=_positive_int,
        metavar="N",
        default=default(None),
        help=f"Worker threads, overrides {THREADS_ENV_VAR}.",
    )
    parser.add_argument("--verbose", action="store_true", default=default(False), help="Log debug messages.")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, with_defaults=False)

    parser = argparse.ArgumentParser(
        prog="omc-sim",
        description="Odor molecular communication channel simulator and validation toolkit.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_common_options(parser, with_defaults=True)
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    commands.add_parser(
        "simulate",
        parents=[common],
        help="Single scenario: concentration, clean and noisy voltage CSVs.",
    )

    sweep = commands.add_parser("sweep", parents=[common], help="Multi-pulse sequences over symbol periods.")
    sweep.add_argument(
        "--tsym",
        type=_periods,
        default=list(DEFAULT_SYMBOL_PERIODS),
        metavar="T1,T2,...",
        help="Symbol periods in s (default: 300,150,75,30,10).",
    )
    sweep.add_argument(
        "--pulses", type=_positive_int, default=PULSES_PER_SEQUENCE, help="Pulses per sequence (default: %(default)s)."
    )

    validate_parser = commands.add_parser(
        "validate", parents=[common], help="Compare a recorded voltage CSV with the model."
    )
    validate_parser.add_argument("data", metavar="data.csv", help="Recorded trace with header time_s,voltage_v.")

    noise = commands.add_parser("noise-report", parents=[common], help="Residual histogram and Q-Q data.")
    noise.add_argument("data", metavar="data.csv", help="Recorded trace with header time_s,voltage_v.")

    oracle = commands.add_parser("oracle", parents=[common], help="Monte Carlo check of the channel model.")
    oracle.add_argument("--particles", type=_positive_int, metavar="N", help="Override the particle count.")
    return parser


def load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.config:
        scenario = ScenarioConfig.load_from_file(args.config)
    else:
        scenario = ScenarioConfig.load_from_dict({"defaults": args.defaults})
    if args.seed is not None:
        scenario = scenario.with_updates(seed=args.seed)
    return scenario


def _output_path(args: argparse.Namespace, name: str) -> str:
    return os.path.join(args.out, name)


def _write_json(path: str, data: dict):
    with open(path, "w", encoding="utf-8") as file:
        json.dump(data, file, indent=4)


def cmd_simulate(args: argparse.Namespace, scenario: ScenarioConfig) -> int:
    schedule = scenario.build_schedule()
    grid = scenario.build_grid(schedule)
    diagnostics = ChannelDiagnostics()
    result = simulate_chain(
        scenario.channel,
        scenario.receiver,
        scenario.receiver_position,
        schedule,
        grid,
        seed=scenario.seed,
        diagnostics=diagnostics,
    )
    metadata = {"geometry": scenario.channel.geometry.value, "seed": str(scenario.seed)}
    save_csv(result.concentration, _output_path(args, "concentration.csv"), metadata, CONCENTRATION_COLUMN)
    save_csv(result.clean_voltage, _output_path(args, "clean_voltage.csv"), metadata)
    save_csv(
        result.noisy_voltage,
        _output_path(args, "noisy_voltage.csv"),
        {**metadata, "clip_events": str(result.noisy_voltage.clip_events)},
    )
    concentration = result.concentration
    peak = int(np.argmax(concentration.samples))
    _write_json(
        _output_path(args, "simulation.json"),
        {
            "geometry": scenario.channel.geometry.value,
            "arrival_time_s": scenario.channel.arrival_time(scenario.receiver_position.x),
            "peak_concentration_mg_per_l": float(concentration.samples[peak]),
            "peak_time_s": float(concentration.times[peak]),
            "baseline_voltage_v": baseline_voltage(scenario.receiver),
            "peak_voltage_v": float(result.clean_voltage.samples.max()),
            "clip_events": result.noisy_voltage.clip_events,
            "n_samples": len(concentration),
            "diagnostics": diagnostics.as_dict(),
        },
    )
    logger.info("simulate: wrote %d samples to %s", len(concentration), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, scenario: ScenarioConfig) -> int:
    schedule = scenario.build_schedule()
    points = run_symbol_period_sweep(
        scenario.channel,
        scenario.receiver,
        scenario.receiver_position,
        schedule.pulse,
        periods=args.tsym,
        count=args.pulses,
        dt=scenario.grid.dt,
        seed=scenario.seed,
        max_workers=args.threads,
        show_progress=args.verbose,
    )
    rows = []
    metadata = {"geometry": scenario.channel.geometry.value, "seed": str(scenario.seed)}
    for point in points:
        prefix = f"sweep_T{point.symbol_period:g}"
        entries = {**metadata, "T_sym": f"{point.symbol_period:g}"}
        save_csv(point.result.concentration, _output_path(args, f"{prefix}_concentration.csv"), entries, CONCENTRATION_COLUMN)
        save_csv(point.result.clean_voltage, _output_path(args, f"{prefix}_clean_voltage.csv"), entries)
        save_csv(point.result.noisy_voltage, _output_path(args, f"{prefix}_noisy_voltage.csv"), entries)
        for symbol, minimum in enumerate(point.minima):
            rows.append(
                {
                    "symbol_period_s": point.symbol_period,
                    "symbol": symbol,
                    "inter_pulse_minimum_v": minimum,
                    "baseline_v": point.baseline,
                    "drift_fraction": point.drift_fraction,
                }
            )
    pd.DataFrame(rows).to_csv(_output_path(args, "sweep_summary.csv"), index=False, float_format="%.9g", lineterminator="\n")
    logger.info("sweep: %d periods written to %s", len(points), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, scenario: ScenarioConfig) -> int:
    report = validate(load_csv(args.data), scenario)
    report.save(_output_path(args, "report.json"))
    return EXIT_OK


def cmd_noise_report(args: argparse.Namespace, scenario: ScenarioConfig) -> int:
    compared = compare_with_model(load_csv(args.data), scenario)
    residuals = compared.residuals.samples
    qq = qq_against_normal(residuals)
    counts, edges = residual_histogram(residuals, scenario.validation.histogram_bins)
    report = NoiseReport(
        n_samples=residuals.size,
        residual_mean=float(np.mean(residuals)),
        residual_std=qq.std,
        ks_p=qq.ks_p,
        qq_slope=qq_slope(qq),
        histogram_bins=counts.size,
        alignment_lag=compared.lag,
    )
    report.save(_output_path(args, "noise_report.json"))
    pd.DataFrame({"bin_left_v": edges[:-1], "bin_right_v": edges[1:], "count": counts}).to_csv(
        _output_path(args, "residual_histogram.csv"), index=False, float_format="%.9g", lineterminator="\n"
    )
    pd.DataFrame({"theoretical_quantile": qq.theoretical, "empirical_quantile": qq.empirical}).to_csv(
        _output_path(args, "qq_points.csv"), index=False, float_format="%.9g", lineterminator="\n"
    )
    logger.info("noise report: KS p = %.4g, Q-Q slope = %.4f", report.ks_p, report.qq_slope)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, scenario: ScenarioConfig) -> int:
    oracle_config = scenario.oracle
    if args.particles is not None:
        oracle_config = oracle_config.model_copy(update={"n_particles": args.particles})
    if scenario.channel.geometry is GeometryKind.unbounded:
        estimate = simulate_unbounded(
            scenario.channel, scenario.receiver_position, oracle_config, args.threads, args.verbose
        )
        comparison = compare_unbounded(scenario.channel, estimate, oracle_config)
    else:
        estimate = simulate_bounded(
            scenario.channel, scenario.receiver_position, oracle_config, args.threads, args.verbose
        )
        comparison = compare_bounded(scenario.channel, estimate, oracle_config)
    comparison.save(_output_path(args, "oracle_report.json"))
    comparison.bins_frame().to_csv(
        _output_path(args, "oracle_bins.csv"), index=False, float_format="%.9g", lineterminator="\n"
    )
    if comparison.insufficient_statistics:
        logger.warning("oracle: insufficient statistics with %d particles", oracle_config.n_particles)
    logger.info("oracle: pass fraction %.3f, accepted %s", comparison.pass_fraction, comparison.accepted)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "noise-report": cmd_noise_report,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        scenario = load_scenario(args)
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](args, scenario)
    except OmcSimError as error:
        logger.error("%s failed: %s", args.command, error)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
