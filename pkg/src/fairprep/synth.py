"""Synthetic categorical data from explicit DAG specs.

A DagSpec lists nodes (name, domain, role), directed edges, and one
conditional probability table per node. CPT rows are indexed row-major over
the node's parents in edge order, so a spec document pins the generating
process bit-for-bit. Generation is ancestral: nodes are sampled in topological
order, each row drawing from the CPT row selected by its sampled parents,
with one seeded substream per node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import AttributeSchema, EncodedDataset, Role
from .errors import ConfigError, CyclicSpecError, IoFailureError, MalformedCptError


@dataclass(frozen=True)
class DagNode:
    name: str
    domain: tuple[str, ...]
    role: Role


@dataclass(frozen=True)
class DagSpec:
    nodes: tuple[DagNode, ...]
    edges: tuple[tuple[str, str], ...]
    cpts: dict  # name -> ndarray of shape (prod parent domains, |domain|)

    def __post_init__(self):
        names = [n.name for n in self.nodes]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate node names in DAG spec")
        by_name = {n.name: n for n in self.nodes}
        for parent, child in self.edges:
            if parent not in by_name or child not in by_name:
                raise ConfigError(f"edge ({parent!r}, {child!r}) references unknown node")
        self.topological_order()  # raises on cycles
        for node in self.nodes:
            cpt = self.cpts.get(node.name)
            if cpt is None:
                raise MalformedCptError(f"node {node.name!r} has no CPT")
            rows = 1
            for p in self.parents(node.name):
                rows *= len(by_name[p].domain)
            if cpt.shape != (rows, len(node.domain)):
                raise MalformedCptError(
                    f"node {node.name!r}: CPT shape {cpt.shape} != ({rows}, {len(node.domain)})"
                )
            if not np.allclose(cpt.sum(axis=1), 1.0, atol=1e-9):
                raise MalformedCptError(f"node {node.name!r}: CPT rows must sum to 1")
            if (cpt < 0).any():
                raise MalformedCptError(f"node {node.name!r}: CPT holds negative mass")

    def parents(self, name: str) -> list[str]:
        return [p for p, c in self.edges if c == name]

    def topological_order(self) -> list[str]:
        names = [n.name for n in self.nodes]
        incoming = {n: set(self.parents(n)) for n in names}
        order: list[str] = []
        ready = [n for n in names if not incoming[n]]
        while ready:
            node = ready.pop(0)
            order.append(node)
            for other in names:
                if node in incoming[other]:
                    incoming[other].discard(node)
                    if not incoming[other] and other not in order and other not in ready:
                        ready.append(other)
        if len(order) != len(names):
            raise CyclicSpecError("DAG spec contains a directed cycle")
        return order


def generate(spec: DagSpec, n: int, seed: int) -> EncodedDataset:
    """Ancestral sampling: n rows drawn node-by-node in topological order."""
    if n < 1:
        raise ConfigError("row count must be at least 1")
    by_name = {node.name: node for node in spec.nodes}
    node_index = {node.name: i for i, node in enumerate(spec.nodes)}
    sampled: dict[str, np.ndarray] = {}

    for name in spec.topological_order():
        node = by_name[name]
        cpt = spec.cpts[name]
        parents = spec.parents(name)
        if parents:
            parent_shape = tuple(len(by_name[p].domain) for p in parents)
            row_idx = np.ravel_multi_index(tuple(sampled[p] for p in parents), parent_shape)
        else:
            row_idx = np.zeros(n, dtype=np.int64)
        cdf = np.cumsum(cpt, axis=1)
        rng = np.random.default_rng([seed, node_index[name]])
        u = rng.random(n)
        codes = (u[:, None] >= cdf[row_idx]).sum(axis=1)
        sampled[name] = np.minimum(codes, len(node.domain) - 1).astype(np.int64)

    schema = tuple(AttributeSchema(node.name, node.role, node.domain) for node in spec.nodes)
    columns = tuple(sampled[node.name] for node in spec.nodes)
    return EncodedDataset(schema=schema, columns=columns, n_rows=n)


def hiring_example(n: int, bias_strength: float, seed: int) -> EncodedDataset:
    """Biased manual-labor hiring table: gender, strength, hired.

    Hiring probability differs by exactly bias_strength between genders at
    every strength level, while strength itself genuinely varies within each
    gender (both levels occur with probability at least 0.2).
    """
    if not 0.0 <= bias_strength <= 1.0:
        raise ConfigError("bias_strength must lie in [0, 1]")
    base_high = 0.5 * (1.0 - bias_strength)
    base_low = 0.35 * (1.0 - bias_strength)
    spec = DagSpec(
        nodes=(
            DagNode("gender", ("female", "male"), Role.SENSITIVE),
            DagNode("strength", ("high", "low"), Role.ADMISSIBLE),
            DagNode("hired", ("no", "yes"), Role.LABEL),
        ),
        edges=(("gender", "strength"), ("gender", "hired"), ("strength", "hired")),
        cpts={
            "gender": np.array([[0.5, 0.5]]),
            # female: 45% high strength, male: 55% high strength
            "strength": np.array([[0.45, 0.55], [0.55, 0.45]]),
            # rows over (gender, strength) in edge order: (f,hi) (f,lo) (m,hi) (m,lo)
            "hired": np.array(
                [
                    [1.0 - base_high, base_high],
                    [1.0 - base_low, base_low],
                    [1.0 - base_high - bias_strength, base_high + bias_strength],
                    [1.0 - base_low - bias_strength, base_low + bias_strength],
                ]
            ),
        },
    )
    return generate(spec, n, seed)


# ---------------------------------------------------------------- JSON spec documents

def spec_to_json(spec: DagSpec) -> dict:
    return {
        "nodes": [
            {"name": n.name, "domain": list(n.domain), "role": n.role.value} for n in spec.nodes
        ],
        "edges": [list(e) for e in spec.edges],
        "cpts": {name: cpt.tolist() for name, cpt in spec.cpts.items()},
    }


def spec_from_json(doc: dict) -> DagSpec:
    try:
        nodes = tuple(
            DagNode(e["name"], tuple(str(v) for v in e["domain"]), Role(e["role"]))
            for e in doc["nodes"]
        )
        edges = tuple((str(p), str(c)) for p, c in doc["edges"])
        cpts = {name: np.asarray(rows, dtype=np.float64) for name, rows in doc["cpts"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed DAG spec document: {exc}") from exc
    return DagSpec(nodes=nodes, edges=edges, cpts=cpts)


def load_spec(path: str | Path) -> DagSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailureError(f"cannot read DAG spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"DAG spec {path} is not valid JSON: {exc}") from exc
    return spec_from_json(doc)
