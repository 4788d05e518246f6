"""Monte-Carlo experiment harness and command line interface."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .experiments import (
    PERFECT,
    TrialRecord,
    run_complexity_sweep,
    run_imperfect_csi,
    run_se_vs_snr,
    summarize,
)
from .output import emit_csv, emit_plot_script, read_csv

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PERFECT",
    "TrialRecord",
    "emit_csv",
    "emit_plot_script",
    "load_config",
    "parse_config",
    "read_csv",
    "run_complexity_sweep",
    "run_imperfect_csi",
    "run_se_vs_snr",
    "summarize",
]
