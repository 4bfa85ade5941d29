"""collapsim command line: run experiments and list the registry"""

# src/collapsim/scripts/cli.py
import sys

import click
from loguru import logger
from pydantic import ValidationError

from collapsim.config import build_config
from collapsim.experiments import EXPERIMENTS
from collapsim.logging import set_run, setup_logging
from collapsim.output_manager import OutputManager
from collapsim.runner import run_experiment

CONFIG_ERROR = 2


@click.group()
def main():
    """Simulate GRW-type spontaneous collapse experiments"""


@main.command()
@click.argument("experiment", type=click.Choice(sorted(EXPERIMENTS)))
@click.option("--config", "config_path", help="YAML config file")
@click.option("--seed", type=int, help="Top-level RNG seed")
@click.option("--trials", type=int, help="Number of Monte-Carlo trials")
@click.option("--out", help="Output directory")
@click.option("--tau", type=float, help="Mean proper time between flashes")
@click.option("--alpha", type=float, help="Collapse localization parameter")
@click.option("--param", "params", multiple=True, help="Override as section.key=value")
@click.option("--log-level", default="INFO", help="Logging level")
@click.option("--log-file", help="Log file path")
def run(
    experiment, config_path, seed, trials, out, tau, alpha, params, log_level, log_file
):
    """Run one experiment and write its artifacts"""

    setup_logging(level=log_level, log_file=log_file, experiment=experiment)

    # == Load config ===
    overrides = list(params)
    for key, value in (
        ("seed", seed),
        ("trials", trials),
        ("output_path", out),
        ("physics.tau", tau),
        ("physics.alpha", alpha),
    ):
        if value is not None:
            overrides.append(f"{key}={value}")
    try:
        logger.info("Building config for {}", experiment)
        config = build_config(experiment, config_path, overrides)
        set_run(config.experiment, config.seed)
        logger.success("Config loaded successfully!")
        logger.info("Seed: {}, trials: {}", config.seed, config.trials)
        logger.info("Output path: {}", config.output_path)
    except ValidationError as e:
        for error in e.errors():
            field = ".".join(str(part) for part in error["loc"])
            logger.error("Invalid config field {}: {}", field, error["msg"])
        sys.exit(CONFIG_ERROR)
    except (OSError, ValueError) as e:
        logger.error("Failed to load config: {}", e)
        sys.exit(CONFIG_ERROR)

    # == Experiment execution ===
    summary, result = run_experiment(config)
    for name, metric in summary.metrics.items():
        mark = "pass" if metric.passed else "FAIL"
        logger.info("{:<24} {:>14.6g}  [{}] {}", name, metric.value, mark, metric.tolerance)

    # == Output storage ===
    try:
        output_manager = OutputManager()
        path = output_manager(config, summary, result)
        logger.info("Results saved to {}", path)
    except Exception as e:
        logger.error("Failed to save results: {}", e)
        raise

    # == Summary ===
    if summary.error:
        logger.error("Experiment failed: {type}: {message}", **summary.error)
        sys.exit(1)
    if not summary.passed:
        logger.warning("Experiment finished with failed tolerances")
        sys.exit(1)
    logger.success("Experiment completed successfully!")


@main.command("list")
def list_experiments():
    """List experiments and their tolerances"""
    for name, experiment in sorted(EXPERIMENTS.items()):
        click.echo(f"{name}: {experiment.description}")
        for metric, tolerance in experiment.tolerances.items():
            click.echo(f"    {metric}: {tolerance}")


if __name__ == "__main__":
    main()
