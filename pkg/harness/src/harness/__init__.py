"""Evaluation harness for the fairprep preprocessing pipeline."""

from .config import CLASSIFIERS, CliFailure, DatasetUnavailable, ExperimentConfig, HarnessError
from .fixtures import hiring_spec, materialize, weak_bias_spec
from .plots import plot_results
from .runner import run_cli, run_experiment

__all__ = [
    "CLASSIFIERS",
    "CliFailure",
    "DatasetUnavailable",
    "ExperimentConfig",
    "HarnessError",
    "hiring_spec",
    "materialize",
    "plot_results",
    "run_cli",
    "run_experiment",
    "weak_bias_spec",
]
