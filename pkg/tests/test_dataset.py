from __future__ import annotations

import numpy as np
import pytest

from fairprep.dataset import (
    MISSING_TOKEN,
    Role,
    load_csv,
    load_roles_config,
    roles_of_dataset,
    write_csv,
)
from fairprep.errors import (
    EmptyDatasetError,
    MissingRoleError,
    MultipleLabelsError,
    NoLabelError,
    UnknownCategoryError,
)
from fairprep.synth import hiring_example


def test_three_row_ingestion(tiny_hiring):
    csv, roles = tiny_hiring
    ds = load_csv(csv, load_roles_config(roles))
    assert ds.n_rows == 3
    assert ds.n_attrs == 3
    assert [a.name for a in ds.schema] == ["gender", "strength", "hired"]
    assert all(a.size == 2 for a in ds.schema)
    # inferred domains are sorted
    assert ds.schema[0].domain == ("female", "male")
    assert ds.schema[2].domain == ("no", "yes")
    assert ds.column(0).tolist() == [1, 0, 0]


def test_roles_config_errors(tmp_path, tiny_hiring):
    csv, _ = tiny_hiring
    no_label = tmp_path / "nolabel.json"
    no_label.write_text(
        '{"attributes": [{"name": "gender", "role": "sensitive"},'
        '{"name": "strength", "role": "admissible"},'
        '{"name": "hired", "role": "admissible"}]}'
    )
    with pytest.raises(NoLabelError):
        load_roles_config(no_label)

    two_labels = tmp_path / "twolabels.json"
    two_labels.write_text(
        '{"attributes": [{"name": "gender", "role": "label"},'
        '{"name": "strength", "role": "admissible"},'
        '{"name": "hired", "role": "label"}]}'
    )
    with pytest.raises(MultipleLabelsError):
        load_roles_config(two_labels)

    partial = tmp_path / "partial.json"
    partial.write_text(
        '{"attributes": [{"name": "gender", "role": "sensitive"},'
        '{"name": "hired", "role": "label"}]}'
    )
    with pytest.raises(MissingRoleError):
        load_csv(csv, load_roles_config(partial))


def test_pinned_domain_rejects_unknown_value(tmp_path, tiny_hiring):
    csv, _ = tiny_hiring
    pinned = tmp_path / "pinned.json"
    pinned.write_text(
        '{"attributes": [{"name": "gender", "role": "sensitive", "domain": ["female"]},'
        '{"name": "strength", "role": "admissible"},'
        '{"name": "hired", "role": "label"}]}'
    )
    with pytest.raises(UnknownCategoryError) as err:
        load_csv(csv, load_roles_config(pinned))
    msg = str(err.value)
    assert "row 2" in msg and "gender" in msg and "male" in msg


def test_empty_cases(tmp_path):
    roles = tmp_path / "roles.json"
    roles.write_text('{"attributes": [{"name": "a", "role": "label"}]}')
    header_only = tmp_path / "empty.csv"
    header_only.write_text("a\n")
    with pytest.raises(EmptyDatasetError):
        load_csv(header_only, load_roles_config(roles))
    no_bytes = tmp_path / "none.csv"
    no_bytes.write_text("")
    with pytest.raises(EmptyDatasetError):
        load_csv(no_bytes, load_roles_config(roles))


def test_missing_cells_become_na_category(tmp_path):
    csv = tmp_path / "gaps.csv"
    csv.write_text("a,y\n1,yes\n,no\n1,yes\n")
    roles = tmp_path / "roles.json"
    roles.write_text(
        '{"attributes": [{"name": "a", "role": "admissible"}, {"name": "y", "role": "label"}]}'
    )
    ds = load_csv(csv, load_roles_config(roles))
    assert MISSING_TOKEN in ds.schema[0].domain
    assert ds.n_rows == 3


def test_round_trip_identity(tmp_path, tiny_hiring):
    csv, roles = tiny_hiring
    config = load_roles_config(roles)
    ds = load_csv(csv, config)
    out = tmp_path / "out.csv"
    write_csv(ds, out)
    back = load_csv(out, roles_of_dataset(ds))
    assert back.schema == ds.schema
    assert all((a == b).all() for a, b in zip(back.columns, ds.columns))
    # with inferred (sorted) domains the round trip is also exact here
    back2 = load_csv(out, config)
    assert back2.schema == ds.schema


def test_round_trip_50k_synthetic(tmp_path, hiring50k):
    out = tmp_path / "synth.csv"
    write_csv(hiring50k, out)
    back = load_csv(out, roles_of_dataset(hiring50k))
    assert back.n_rows == hiring50k.n_rows
    assert all((a == b).all() for a, b in zip(back.columns, hiring50k.columns))


def test_zero_column_round_trip_fails_on_reload(tmp_path):
    from fairprep.dataset import EncodedDataset

    empty = EncodedDataset(schema=(), columns=(), n_rows=2)
    out = tmp_path / "zero.csv"
    write_csv(empty, out)
    with pytest.raises(EmptyDatasetError):
        load_csv(out, {})


def test_load_is_deterministic(tmp_path, tiny_hiring):
    csv, roles = tiny_hiring
    config = load_roles_config(roles)
    a = load_csv(csv, config)
    b = load_csv(csv, config)
    assert a.schema == b.schema
    assert all((x == y).all() for x, y in zip(a.columns, b.columns))


def test_encode_decode_bijection(hiring50k):
    for attr in hiring50k.schema:
        for code, value in enumerate(attr.domain):
            assert attr.encode(value) == code
            assert attr.decode(code) == value


def test_benchmark_scale_ingestion(tmp_path):
    # 13 attributes x 32,561 tuples: a realistic benchmark-sized table
    rng = np.random.default_rng(0)
    n, d = 32_561, 13
    names = [f"c{i}" for i in range(d - 1)] + ["y"]
    cols = [rng.integers(0, 5, size=n) for _ in range(d - 1)] + [rng.integers(0, 2, size=n)]
    path = tmp_path / "big.csv"
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for r in range(n):
            fh.write(",".join(str(int(c[r])) for c in cols) + "\n")
    roles = {name: (Role.ADMISSIBLE, None) for name in names[:-1]}
    roles["y"] = (Role.LABEL, None)
    ds = load_csv(path, roles)
    assert ds.n_rows == 32_561
    assert ds.n_attrs == 13
