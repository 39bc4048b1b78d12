"""Synthetic fixture specs, materialized through the fairprep CLI."""

from __future__ import annotations

import json
from pathlib import Path

from .runner import run_cli


def hiring_spec(bias: float = 0.5) -> dict:
    """Biased manual-labor hiring process: the hiring probability differs by
    `bias` between genders at every strength level."""
    base_high = 0.5 * (1 - bias)
    base_low = 0.35 * (1 - bias)
    return {
        "nodes": [
            {"name": "gender", "domain": ["female", "male"], "role": "sensitive"},
            {"name": "strength", "domain": ["high", "low"], "role": "admissible"},
            {"name": "hired", "domain": ["no", "yes"], "role": "label"},
        ],
        "edges": [["gender", "strength"], ["gender", "hired"], ["strength", "hired"]],
        "cpts": {
            "gender": [[0.5, 0.5]],
            "strength": [[0.45, 0.55], [0.55, 0.45]],
            "hired": [
                [1 - base_high, base_high],
                [1 - base_low, base_low],
                [1 - base_high - bias, base_high + bias],
                [1 - base_low - bias, base_low + bias],
            ],
        },
    }


def weak_bias_spec() -> dict:
    """Label with a moderate sensitive effect and a weaker admissible effect;
    the alpha sweep trades the former for the latter."""
    rows = []
    for s in range(2):
        for a in range(2):
            p = 0.30 + 0.25 * s + 0.15 * a
            rows.append([1 - p, p])
    return {
        "nodes": [
            {"name": "s", "domain": ["s0", "s1"], "role": "sensitive"},
            {"name": "a", "domain": ["a0", "a1"], "role": "admissible"},
            {"name": "y", "domain": ["n", "y"], "role": "label"},
        ],
        "edges": [["s", "y"], ["a", "y"]],
        "cpts": {"s": [[0.5, 0.5]], "a": [[0.5, 0.5]], "y": rows},
    }


def materialize(spec: dict, workdir: Path, rows: int, seed: int) -> tuple[Path, Path]:
    """Generate a CSV plus pinned roles config from a spec document."""
    workdir.mkdir(parents=True, exist_ok=True)
    spec_path = workdir / "spec.json"
    spec_path.write_text(json.dumps(spec, indent=2), encoding="utf-8")
    csv_path = workdir / "data.csv"
    roles_path = workdir / "roles.json"
    run_cli(
        ["synth", "--spec", str(spec_path), "--rows", str(rows), "--seed", str(seed),
         "--out", str(csv_path), "--roles-out", str(roles_path)]
    )
    return csv_path, roles_path
