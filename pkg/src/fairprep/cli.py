"""Command-line pipeline driver.

Subcommands: preprocess, info, cliques, metrics, synth. Output is JSON on
stdout (plus CSV/sidecar files where documented); every run embeds a manifest
with the resolved flags, input digests, tool version, and timings. Exit codes:
0 success, 2 validation error (single-line machine-parsable reason on stderr),
1 internal failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cliques import CliquePlan, build_plan, check_constraints_weighted
from .dataset import EncodedDataset, Role, load_csv, load_roles_config, roles_of_dataset, write_csv
from .errors import FairprepError
from .info import mi_matrix, mi_with_attr
from .metrics import distortion_kl, rod_of_dataset
from .sampling import (
    LabelClique,
    PreprocessConfig,
    build_label_clique,
    preprocess,
    preprocess_plus,
)
from .synth import generate, load_spec


def _digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(args: argparse.Namespace, inputs: list[str | Path], started: float) -> dict:
    flags = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    return {
        "command": args.command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "inputs": {str(p): _digest(p) for p in inputs},
        "version": __version__,
        "timings": {"elapsed_s": round(time.monotonic() - started, 6)},
    }


def _emit(args: argparse.Namespace, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out_json", None):
        Path(args.out_json).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load(args: argparse.Namespace) -> EncodedDataset:
    return load_csv(args.input, load_roles_config(args.roles))


def _plan_and_label(dataset: EncodedDataset, k: int, m: int, threads: int):
    non_label = dataset.non_label_indices
    mi = mi_matrix(dataset, non_label, threads=threads)
    plan = build_plan(non_label, mi, k, m)
    label = dataset.label_index
    mi_label = {a: v for a, v in zip(non_label, mi_with_attr(dataset, label, non_label))}
    fair = build_label_clique(dataset, mi_label, k, m)
    return mi, plan, fair, mi_label


def _names(dataset: EncodedDataset, attrs) -> list[str]:
    return [dataset.schema[a].name for a in attrs]


def _plan_json(dataset: EncodedDataset, plan: CliquePlan, weight: float) -> dict:
    return {
        "cliques": [_names(dataset, c) for c in plan.cliques],
        "parents": list(plan.parents),
        "separators": [_names(dataset, s) for s in plan.separators],
        "weight_bits": weight,
    }


# ---------------------------------------------------------------- subcommands

def cmd_preprocess(args: argparse.Namespace) -> int:
    started = time.monotonic()
    dataset = _load(args)
    config = PreprocessConfig(
        k=args.k, m=args.m, alpha=args.alpha, seed=args.seed, pseudocount=args.pseudocount
    )
    mi, plan, fair, mi_label = _plan_and_label(dataset, args.k, args.m, args.threads)

    unfair: LabelClique | None = None
    if config.alpha < 1.0:
        unfair = build_label_clique(
            dataset, mi_label, args.k, args.m, candidates=dataset.non_label_indices
        )
        processed = preprocess_plus(dataset, plan, fair, unfair, config)
    else:
        processed = preprocess(dataset, plan, fair, config)

    out = Path(args.out) if args.out else Path(args.input).with_suffix(".preprocessed.csv")
    write_csv(processed, out)
    sidecar = out.with_suffix(out.suffix + ".provenance.json")
    report = check_constraints_weighted(plan, dataset.non_label_indices, args.k, args.m, mi)
    provenance = {
        "plan": _plan_json(dataset, plan, report.total_weight),
        "label_separator": _names(dataset, fair.separator),
        "unfair_label_separator": _names(dataset, unfair.separator) if unfair else None,
        "alpha": config.alpha,
        "seed": config.seed,
        "pseudocount": config.pseudocount,
        "version": __version__,
        "manifest": _manifest(args, [args.input, args.roles], started),
    }
    sidecar.write_text(json.dumps(provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit(args, {"out": str(out), "sidecar": str(sidecar), "manifest": provenance["manifest"]})
    return 0


def cmd_info(args: argparse.Namespace) -> int:
    started = time.monotonic()
    dataset = _load(args)
    non_label = dataset.non_label_indices
    mi = mi_matrix(dataset, non_label, threads=args.threads)
    if args.csv:
        names = _names(dataset, non_label)
        lines = ["," + ",".join(names)]
        for i, name in enumerate(names):
            lines.append(name + "," + ",".join(f"{v:.12g}" for v in mi.weights[i]))
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    _emit(
        args,
        {
            "attrs": _names(dataset, non_label),
            "mi_bits": [[float(v) for v in row] for row in mi.weights],
            "manifest": _manifest(args, [args.input, args.roles], started),
        },
    )
    return 0


def cmd_cliques(args: argparse.Namespace) -> int:
    started = time.monotonic()
    dataset = _load(args)
    mi, plan, fair, _ = _plan_and_label(dataset, args.k, args.m, args.threads)
    report = check_constraints_weighted(plan, dataset.non_label_indices, args.k, args.m, mi)
    payload = _plan_json(dataset, plan, report.total_weight)
    payload["label_separator"] = _names(dataset, fair.separator)
    payload["constraints_ok"] = report.all_ok
    payload["manifest"] = _manifest(args, [args.input, args.roles], started)
    _emit(args, payload)
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    started = time.monotonic()
    dataset = _load(args)
    report = rod_of_dataset(dataset, epsilon=args.epsilon, min_support=args.min_support)

    sens = dataset.indices_with_role(Role.SENSITIVE)
    if len(sens) == 1:
        worst = [dataset.schema[sens[0]].decode(v) for v in report.worst_pair]
    else:
        shape = tuple(dataset.domain_size(a) for a in sens)
        worst = [
            [dataset.schema[a].decode(int(c)) for a, c in zip(sens, np.unravel_index(v, shape))]
            for v in report.worst_pair
        ]

    payload: dict = {
        "rod_normalized": report.rod_normalized,
        "raw_abs_log": report.raw_abs_log,
        "worst_pair": worst,
        "kl_bits_per_clique": None,
        "manifest": None,
    }
    inputs = [args.input, args.roles]
    if args.against:
        # pin domains from the original so both tables encode identically
        against = load_csv(args.against, roles_of_dataset(dataset))
        _, plan, _, _ = _plan_and_label(dataset, args.k, args.m, args.threads)
        payload["kl_bits_per_clique"] = [
            {
                "attrs": _names(dataset, clique),
                "bits": distortion_kl(dataset, against, [clique], epsilon=args.epsilon),
            }
            for clique in plan.cliques
        ]
        inputs.append(args.against)
    payload["manifest"] = _manifest(args, inputs, started)
    _emit(args, payload)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    started = time.monotonic()
    spec = load_spec(args.spec)
    dataset = generate(spec, args.rows, args.seed)
    write_csv(dataset, args.out)
    if args.roles_out:
        doc = {
            "attributes": [
                {"name": a.name, "role": a.role.value, "domain": list(a.domain)}
                for a in dataset.schema
            ]
        }
        Path(args.roles_out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    _emit(
        args,
        {"out": str(args.out), "rows": dataset.n_rows, "manifest": _manifest(args, [args.spec], started)},
    )
    return 0


# ---------------------------------------------------------------- entry point

def _add_common(p: argparse.ArgumentParser, io: bool = True) -> None:
    if io:
        p.add_argument("--input", required=True, help="input CSV path")
        p.add_argument("--roles", required=True, help="roles config JSON path")
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("CAUSALPRE_THREADS", "1")),
        help="worker cap for pair-parallel MI (env CAUSALPRE_THREADS)",
    )
    p.add_argument("--out-json", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairprep")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="regenerate a fair dataset")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pseudocount", type=float, default=0.0)
    p.add_argument("--out", help="output CSV path (default: <input>.preprocessed.csv)")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("info", help="pairwise MI matrix over non-label attributes")
    _add_common(p)
    p.add_argument("--csv", help="also dump the matrix as CSV here")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("cliques", help="emit the clique plan as JSON")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_cliques)

    p = sub.add_parser("metrics", help="discrimination and distortion report")
    _add_common(p)
    p.add_argument("--against", help="processed CSV to compare against for KL")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--min-support", type=int, default=1)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="generate synthetic data from a DAG spec")
    _add_common(p, io=False)
    p.add_argument("--spec", required=True, help="DAG spec JSON path")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--roles-out", help="also write the matching roles config here")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FairprepError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
