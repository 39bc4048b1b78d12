"""Large parameter settings on benchmark-shaped synthetic tables: 13
attributes with (k,m)=(5,7) (a single 12-attribute clique) and 28 attributes
with (k,m)=(6,15) (two 21-attribute cliques exercising sparse tables)."""

from __future__ import annotations

import time

import numpy as np
import pytest

from fairprep.cliques import build_plan, check_constraints
from fairprep.dataset import AttributeSchema, EncodedDataset, Role
from fairprep.info import mi_matrix, mi_with_attr
from fairprep.metrics import distortion_kl
from fairprep.sampling import PreprocessConfig, build_label_clique, preprocess


def correlated_table(seed: int, n: int, n_attrs: int, roles: list[Role], max_dom: int):
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 6, n)
    cols, schema = [], []
    for i in range(n_attrs - 1):
        dom = int(rng.integers(3, max_dom + 1))
        col = (base + rng.integers(0, dom, n)) % dom
        schema.append(AttributeSchema(f"c{i}", roles[i], tuple(f"v{j}" for j in range(dom))))
        cols.append(col.astype(np.int64))
    y = ((base + rng.integers(0, 3, n)) % 6 >= 3).astype(np.int64)
    schema.append(AttributeSchema("y", Role.LABEL, ("0", "1")))
    cols.append(y)
    return EncodedDataset(schema=tuple(schema), columns=tuple(cols), n_rows=n)


def run_pipeline(ds, k, m, seed=1):
    non_label = ds.non_label_indices
    mi = mi_matrix(ds, non_label, threads=2)
    plan = build_plan(non_label, mi, k, m)
    report = check_constraints(plan, non_label, k, m)
    assert report.all_ok, report.violations
    mi_label = dict(zip(non_label, mi_with_attr(ds, ds.label_index, non_label)))
    fair = build_label_clique(ds, mi_label, k, m)
    out = preprocess(ds, plan, fair, PreprocessConfig(k=k, m=m, seed=seed))
    return plan, fair, out


def test_wide_single_clique_k5_m7_completes():
    roles = [Role.SENSITIVE] + [Role.ADMISSIBLE] * 8 + [Role.ADDITIONAL] * 3
    ds = correlated_table(0, 32_561, 13, roles, max_dom=13)
    started = time.monotonic()
    plan, fair, out = run_pipeline(ds, 5, 7)
    assert time.monotonic() - started < 60
    assert [len(c) for c in plan.cliques] == [12]
    assert len(fair.separator) == 11  # budget k+m-1
    assert out.n_rows == 32_561
    for a in (0, 3, 7):
        p = np.bincount(ds.column(a), minlength=ds.domain_size(a)) / ds.n_rows
        q = np.bincount(out.column(a), minlength=ds.domain_size(a)) / ds.n_rows
        assert 0.5 * float(np.abs(p - q).sum()) <= 0.02


def test_wide_two_clique_k6_m15_completes():
    roles = [Role.SENSITIVE, Role.INADMISSIBLE] + [Role.ADMISSIBLE] * 15 + [Role.ADDITIONAL] * 10
    ds = correlated_table(1, 20_000, 28, roles, max_dom=12)
    started = time.monotonic()
    plan, fair, out = run_pipeline(ds, 6, 15, seed=2)
    assert time.monotonic() - started < 120
    assert [len(c) for c in plan.cliques] == [21, 21]
    assert len(plan.separators[1]) == 15
    assert len(fair.separator) == 20
    assert out.n_rows == 20_000
    # single-attribute marginals survive the sparse path
    small = [(a,) for a in (0, 5, 20)]
    assert distortion_kl(ds, out, small) <= 0.02
