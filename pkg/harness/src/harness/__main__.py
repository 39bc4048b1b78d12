"""Run a full experiment from the command line.

Example:
    python -m harness --dataset data.csv --roles roles.json --k 2 --m 1 \
        --alphas 0 0.5 1 --outdir results/
"""

from __future__ import annotations

import argparse
from pathlib import Path

from .config import ExperimentConfig
from .plots import plot_results
from .runner import run_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="harness")
    parser.add_argument("--dataset", required=True, type=Path)
    parser.add_argument("--roles", required=True, type=Path)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--m", type=int, required=True)
    parser.add_argument("--alphas", type=float, nargs="*", default=[1.0])
    parser.add_argument("--classifiers", nargs="*", default=["logreg", "rf", "mlp"])
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", type=Path, default=Path("harness_results"))
    args = parser.parse_args(argv)

    config = ExperimentConfig(
        dataset=args.dataset,
        roles=args.roles,
        k=args.k,
        m=args.m,
        alphas=tuple(args.alphas),
        classifiers=tuple(args.classifiers),
        folds=args.folds,
        seed=args.seed,
        workdir=args.outdir,
    )
    results = run_experiment(config)
    written = plot_results(results, args.outdir)
    summary = (
        results.groupby(["run", "classifier"])[["auc", "rod_normalized"]]
        .mean()
        .round(4)
    )
    print(summary.to_string())
    print("plots:", ", ".join(str(p) for p in written))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
