from __future__ import annotations

import numpy as np
import pytest

from fairprep.dataset import AttributeSchema, EncodedDataset, Role


def make_dataset(columns: dict[str, list], roles: dict[str, Role]) -> EncodedDataset:
    """In-memory dataset from integer code columns; domains sized to the max code."""
    schema = []
    arrays = []
    n = None
    for name, values in columns.items():
        arr = np.asarray(values, dtype=np.int64)
        n = len(arr) if n is None else n
        size = int(arr.max()) + 1 if len(arr) else 1
        schema.append(AttributeSchema(name, roles[name], tuple(f"v{i}" for i in range(size))))
        arrays.append(arr)
    return EncodedDataset(schema=tuple(schema), columns=tuple(arrays), n_rows=n)


@pytest.fixture(scope="session")
def hiring50k():
    from fairprep.synth import hiring_example

    return hiring_example(50_000, 0.5, seed=7)


def six_attr_spec():
    """Six-attribute generating process with a strong sensitive->label edge.

    Roles: s sensitive, x1/x2 admissible, w additional, z inadmissible, y label.
    The label depends on (s, x2), so conditioning on fair attributes alone
    leaves substantial sensitive information in the raw data.
    """
    from fairprep.synth import DagNode, DagSpec

    nodes = (
        DagNode("s", ("s0", "s1", "s2"), Role.SENSITIVE),
        DagNode("x1", ("a", "b"), Role.ADMISSIBLE),
        DagNode("x2", ("p", "q", "r"), Role.ADMISSIBLE),
        DagNode("w", ("w0", "w1"), Role.ADDITIONAL),
        DagNode("z", ("z0", "z1"), Role.INADMISSIBLE),
        DagNode("y", ("n", "y"), Role.LABEL),
    )
    edges = (("s", "x1"), ("x1", "x2"), ("x2", "w"), ("s", "z"), ("s", "y"), ("x2", "y"))
    p_y = []  # rows over (s, x2): strong s effect, moderate x2 effect
    for s in range(3):
        for x2 in range(3):
            p = 0.15 + 0.3 * s + 0.12 * x2
            p_y.append([1 - p, p])
    cpts = {
        "s": np.array([[0.4, 0.35, 0.25]]),
        "x1": np.array([[0.7, 0.3], [0.45, 0.55], [0.25, 0.75]]),
        "x2": np.array([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]]),
        "w": np.array([[0.8, 0.2], [0.5, 0.5], [0.3, 0.7]]),
        "z": np.array([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]]),
        "y": np.array(p_y),
    }
    return DagSpec(nodes, edges, cpts)


@pytest.fixture(scope="session")
def synth6_50k():
    from fairprep.synth import generate

    return generate(six_attr_spec(), 50_000, seed=20_24)


@pytest.fixture()
def tiny_hiring(tmp_path):
    csv = tmp_path / "hiring.csv"
    csv.write_text(
        "gender,strength,hired\n"
        "male,high,yes\n"
        "female,high,no\n"
        "female,low,no\n",
        encoding="utf-8",
    )
    roles = tmp_path / "roles.json"
    roles.write_text(
        '{"attributes": ['
        '{"name": "gender", "role": "sensitive"},'
        '{"name": "strength", "role": "admissible"},'
        '{"name": "hired", "role": "label"}]}',
        encoding="utf-8",
    )
    return csv, roles
