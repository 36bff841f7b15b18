"""Configured sweeps over the library, written as CSV, plus a command line."""

from .config import ExperimentConfig, config_from_dict, load_config
from .runner import (
    COLUMNS,
    SCHEMA_VERSION,
    ResultRow,
    RuleResult,
    read_csv,
    run_experiment,
    run_to_csv,
    verdict,
    write_csv,
)

__all__ = [
    "COLUMNS",
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "ResultRow",
    "RuleResult",
    "config_from_dict",
    "load_config",
    "read_csv",
    "run_experiment",
    "run_to_csv",
    "verdict",
    "write_csv",
]
