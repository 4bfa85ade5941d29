import sys
from pathlib import Path

from loguru import logger

LEVEL_ICONS = {
    "TRACE": "·",
    "DEBUG": "🔍",
    "INFO": "⚛️",
    "SUCCESS": "✅",
    "WARNING": "⚠️",
    "ERROR": "💥",
    "CRITICAL": "💥",
}

FILE_FORMAT = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {elapsed} | {level: <8} | {extra[run]} | "
    "{name}:{line} | {message}"
)


def run_tag(experiment: str | None = None, seed: int | None = None) -> str:
    """Label of the current run, e.g. `dilation/seed1`"""
    if experiment is None:
        return "collapsim"
    return experiment if seed is None else f"{experiment}/seed{seed}"


def set_run(experiment: str | None = None, seed: int | None = None) -> None:
    """Tag every following record with the experiment and seed"""
    logger.configure(extra={"run": run_tag(experiment, seed)})


def setup_logging(
    level: str = "INFO", log_file: str | None = None, experiment: str | None = None
):
    """Configure logging for collapsim runs"""
    logger.remove()
    set_run(experiment)

    def format_record(record):
        """Icon and run tag on the console"""
        icon = LEVEL_ICONS.get(record["level"].name, "⚛️")
        return f"{icon} <cyan>[{{extra[run]}}]</cyan> <level>{{message}}</level>\n{{exception}}"

    logger.add(sys.stderr, level=level, format=format_record, colorize=True)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(log_file, level=level, format=FILE_FORMAT)

    return logger
