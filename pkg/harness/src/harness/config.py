"""Experiment configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


class HarnessError(RuntimeError):
    pass


class CliFailure(HarnessError):
    """The fairprep CLI exited nonzero."""


class DatasetUnavailable(HarnessError):
    """Input dataset or roles config is missing."""


#: Classifier names understood by the runner.
CLASSIFIERS = ("logreg", "rf", "mlp")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Path
    roles: Path
    k: int
    m: int
    alphas: tuple[float, ...] = (1.0,)
    classifiers: tuple[str, ...] = CLASSIFIERS
    folds: int = 5
    seed: int = 0
    bins: int = 8  # quantile buckets for numeric columns
    workdir: Path | None = None

    def __post_init__(self):
        if self.folds < 2:
            raise HarnessError("need at least 2 folds")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise HarnessError("alpha values must lie in [0, 1]")
        unknown = set(self.classifiers) - set(CLASSIFIERS)
        if unknown:
            raise HarnessError(f"unknown classifiers: {sorted(unknown)}")
