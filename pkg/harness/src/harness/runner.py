"""Cross-validated evaluation of preprocessed vs reference training data.

For every fold the training split is preprocessed through the fairprep CLI
(one run per alpha), classifiers are trained on the processed split with all
attributes one-hot encoded, and predictions on the untouched test split are
scored by AUC plus the CLI's discrimination report over a predictions CSV.
Two reference runs accompany the preprocessed ones: "original" (unmodified
training split) and "dropped" (sensitive and inadmissible columns removed at
train and predict time). Test splits are digest-checked so no run can mutate
them.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import KFold
from sklearn.neural_network import MLPClassifier
from sklearn.preprocessing import OneHotEncoder

from .config import CliFailure, DatasetUnavailable, ExperimentConfig, HarnessError


def fairprep_command() -> list[str]:
    exe = shutil.which("fairprep")
    if exe:
        return [exe]
    return [sys.executable, "-m", "fairprep.cli"]


def run_cli(args: list[str]) -> dict:
    proc = subprocess.run(
        fairprep_command() + args, capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise CliFailure(f"fairprep {' '.join(args)} -> exit {proc.returncode}: {proc.stderr.strip()}")
    return json.loads(proc.stdout) if proc.stdout.strip() else {}


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _make_classifier(name: str, seed: int):
    if name == "logreg":
        return LogisticRegression(max_iter=1000)
    if name == "rf":
        return RandomForestClassifier(random_state=seed)
    if name == "mlp":
        return MLPClassifier(random_state=seed, max_iter=400)
    raise HarnessError(f"unknown classifier {name!r}")


def _load_roles(path: Path) -> list[dict]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    return doc["attributes"]


def quantile_bin(series: pd.Series, bins: int) -> pd.Series:
    """Quantile-bin a numeric column into labeled buckets."""
    ranks = series.rank(method="average", pct=True)
    codes = np.clip(np.ceil(ranks * bins).astype(int) - 1, 0, bins - 1)
    return pd.Series([f"b{c}" for c in codes], index=series.index)


def _prepare_table(config: ExperimentConfig) -> tuple[pd.DataFrame, list[dict], list[str]]:
    """Load the dataset, quantile-bin numeric columns, and pin all domains."""
    if not Path(config.dataset).exists() or not Path(config.roles).exists():
        raise DatasetUnavailable(f"missing dataset or roles config: {config.dataset}, {config.roles}")
    frame = pd.read_csv(config.dataset, dtype=str, keep_default_na=False)
    roles = _load_roles(Path(config.roles))
    by_name = {e["name"]: e for e in roles}
    missing = [c for c in frame.columns if c not in by_name]
    if missing:
        raise DatasetUnavailable(f"roles config misses columns: {missing}")

    binned: list[str] = []
    for col in frame.columns:
        values = frame[col]
        numeric = pd.to_numeric(values, errors="coerce")
        if numeric.notna().all() and values.nunique() > max(config.bins, 10):
            frame[col] = quantile_bin(numeric, config.bins)
            binned.append(col)

    pinned = []
    for col in frame.columns:
        entry = dict(by_name[col])
        entry["domain"] = sorted(frame[col].unique())
        pinned.append(entry)
    return frame, pinned, binned


def _encode(frame: pd.DataFrame, columns: list[str], domains: dict[str, list[str]]) -> np.ndarray:
    encoder = OneHotEncoder(
        categories=[domains[c] for c in columns], handle_unknown="ignore", sparse_output=False
    )
    return encoder.fit_transform(frame[columns])


def _rod_of_predictions(
    test_frame: pd.DataFrame,
    predictions: np.ndarray,
    label: str,
    label_domain: list[str],
    roles_path: Path,
    workdir: Path,
    tag: str,
) -> dict:
    preds_frame = test_frame.copy()
    preds_frame[label] = [label_domain[int(p)] for p in predictions]
    preds_path = workdir / f"preds_{tag}.csv"
    preds_frame.to_csv(preds_path, index=False)
    payload = run_cli(["metrics", "--input", str(preds_path), "--roles", str(roles_path)])
    return {"rod_raw": payload["raw_abs_log"], "rod_normalized": payload["rod_normalized"]}


def run_experiment(config: ExperimentConfig) -> pd.DataFrame:
    """Per (fold, run, classifier) row: AUC on the untouched test split and the
    discrimination score of the test predictions. Runs are "original",
    "dropped", and one "alpha=..." per configured alpha."""
    frame, pinned_roles, binned = _prepare_table(config)
    label = next(e["name"] for e in pinned_roles if e["role"] == "label")
    drop_cols = [e["name"] for e in pinned_roles if e["role"] in ("sensitive", "inadmissible")]
    domains = {e["name"]: e["domain"] for e in pinned_roles}
    label_domain = domains[label]
    if len(label_domain) != 2:
        raise HarnessError("the evaluation protocol needs a binary label")

    workdir = Path(config.workdir) if config.workdir else Path(tempfile.mkdtemp(prefix="harness_"))
    workdir.mkdir(parents=True, exist_ok=True)
    roles_path = workdir / "roles_pinned.json"
    roles_path.write_text(json.dumps({"attributes": pinned_roles}, indent=2), encoding="utf-8")
    manifest = {
        "dataset": str(config.dataset),
        "binned_columns": binned,
        "bins": config.bins,
        "folds": config.folds,
        "seed": config.seed,
        "alphas": list(config.alphas),
        "classifier_params": {},
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }

    records = []
    splitter = KFold(n_splits=config.folds, shuffle=True, random_state=config.seed)
    feature_cols = [c for c in frame.columns if c != label]
    dropped_cols = [c for c in feature_cols if c not in drop_cols]

    for fold, (train_idx, test_idx) in enumerate(splitter.split(frame)):
        train = frame.iloc[train_idx].reset_index(drop=True)
        test = frame.iloc[test_idx].reset_index(drop=True)
        train_path = workdir / f"fold{fold}_train.csv"
        test_path = workdir / f"fold{fold}_test.csv"
        train.to_csv(train_path, index=False)
        test.to_csv(test_path, index=False)
        test_digest = _digest(test_path)

        training_sets: dict[str, pd.DataFrame] = {"original": train}
        for alpha in config.alphas:
            out_path = workdir / f"fold{fold}_alpha{alpha}.csv"
            run_cli(
                [
                    "preprocess",
                    "--input", str(train_path),
                    "--roles", str(roles_path),
                    "--k", str(config.k),
                    "--m", str(config.m),
                    "--alpha", str(alpha),
                    "--seed", str(config.seed + fold),
                    "--out", str(out_path),
                ]
            )
            training_sets[f"alpha={alpha:g}"] = pd.read_csv(
                out_path, dtype=str, keep_default_na=False
            )

        y_test = test[label].map({v: i for i, v in enumerate(label_domain)}).to_numpy()
        for run, train_set in list(training_sets.items()) + [("dropped", train)]:
            cols = dropped_cols if run == "dropped" else feature_cols
            x_train = _encode(train_set, cols, domains)
            x_test = _encode(test, cols, domains)
            y_train = train_set[label].map({v: i for i, v in enumerate(label_domain)}).to_numpy()
            for name in config.classifiers:
                clf = _make_classifier(name, config.seed)
                manifest["classifier_params"].setdefault(name, clf.get_params())
                clf.fit(x_train, y_train)
                scores = clf.predict_proba(x_test)[:, 1]
                predictions = (scores >= 0.5).astype(int)
                if _digest(test_path) != test_digest:
                    raise HarnessError(f"test split mutated during fold {fold}")
                rod = _rod_of_predictions(
                    test, predictions, label, label_domain, roles_path, workdir,
                    tag=f"{fold}_{run}_{name}",
                )
                records.append(
                    {
                        "fold": fold,
                        "run": run,
                        "classifier": name,
                        "auc": float(roc_auc_score(y_test, scores)),
                        "rod_raw": rod["rod_raw"],
                        "rod_normalized": rod["rod_normalized"],
                        "test_digest": test_digest,
                    }
                )

    results = pd.DataFrame.from_records(records)
    results.to_csv(workdir / "results.csv", index=False)
    (workdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, default=str), encoding="utf-8"
    )
    return results
