"""Low-dimensional marginal tables over a clique plan.

The model holds one count table per clique plus, for every clique with a
non-empty separator, an unconditional fallback table over the clique's new
attributes. Conditionals are normalized slices at a separator context; a
context with zero mass (possible when the pseudocount is 0 and the context
never occurs, e.g. a label separator spanning several cliques) falls back to
the unconditional table and is flagged. Together the factors realize

    P[C_1] * prod_i P[C_i \\ F_i | F_i]

which is the approximation the sampler draws from.

Tables are dense arrays up to DENSE_CELL_LIMIT cells per clique and sparse
count maps keyed by cell coordinates beyond that (large separators imply huge
but sparsely occupied clique domains, far past any flat-index range). Sparse
tables require pseudocount 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cliques import CliquePlan
from .dataset import EncodedDataset
from .errors import (
    AttrMismatchError,
    IncompleteRecordError,
    ModelError,
    UnassignedSeparatorError,
)
from .info import ProbTable

DENSE_CELL_LIMIT = 10**7


@dataclass(frozen=True)
class FactorTable:
    """Counts over one clique: dense ndarray or {cell coords: count} map."""

    attrs: tuple[int, ...]
    shape: tuple[int, ...]
    n: int
    counts: np.ndarray | dict

    @property
    def cells(self) -> int:
        return int(np.prod(self.shape, dtype=object))

    @property
    def dense(self) -> bool:
        return isinstance(self.counts, np.ndarray)


@dataclass(frozen=True)
class ConditionalSlice:
    """Distribution over a clique's new attributes at one separator context.

    Dense slices carry `probs` shaped by the new attributes' domains; sparse
    slices carry a (cells x attrs) coordinate matrix with parallel cell
    probabilities. `backoff` marks contexts that fell back to the
    unconditional table.
    """

    attrs: tuple[int, ...]
    shape: tuple[int, ...]
    probs: np.ndarray | None
    coords: np.ndarray | None
    cell_probs: np.ndarray | None
    backoff: bool

    def prob_of_values(self, values: tuple[int, ...]) -> float:
        if self.probs is not None:
            return float(self.probs[values])
        hits = np.nonzero((self.coords == np.asarray(values)).all(axis=1))[0]
        return float(self.cell_probs[hits[0]]) if len(hits) else 0.0


@dataclass
class MarginalModel:
    """Fitted factor tables over a (possibly label-extended) clique plan."""

    plan: CliquePlan
    factors: tuple[FactorTable, ...]
    backoffs: dict[int, FactorTable]
    pseudocount: float
    _cond_cache: dict = field(default_factory=dict, repr=False)
    _group_cache: dict = field(default_factory=dict, repr=False)

    def table(self, i: int) -> ProbTable:
        """Smoothed probability table of clique i (dense cliques only)."""
        factor = self.factors[i]
        if not factor.dense:
            raise ModelError(f"clique {i} is stored sparsely; no dense table available")
        probs = (factor.counts + self.pseudocount) / (factor.n + self.pseudocount * factor.cells)
        return ProbTable(factor.attrs, probs)

    def new_attrs(self, i: int) -> tuple[int, ...]:
        sep = set(self.plan.separators[i])
        return tuple(a for a in self.plan.cliques[i] if a not in sep)


def _count_table(dataset: EncodedDataset, attrs: tuple[int, ...]) -> FactorTable:
    shape = tuple(dataset.domain_size(a) for a in attrs)
    cells = int(np.prod(shape, dtype=object))
    codes = tuple(dataset.column(a) for a in attrs)
    if cells <= DENSE_CELL_LIMIT:
        flat = np.ravel_multi_index(codes, shape)
        counts = np.bincount(flat, minlength=cells).reshape(shape)
        return FactorTable(attrs, shape, dataset.n_rows, counts)
    sparse: dict[tuple[int, ...], int] = {}
    for row in zip(*(c.tolist() for c in codes)):
        sparse[row] = sparse.get(row, 0) + 1
    return FactorTable(attrs, shape, dataset.n_rows, sparse)


def fit_marginals(dataset: EncodedDataset, plan: CliquePlan, pseudocount: float = 0.0) -> MarginalModel:
    """Fit per-clique count tables (plus backoff tables) from the data."""
    if pseudocount < 0:
        raise ModelError("pseudocount must be non-negative")
    for clique in plan.cliques:
        for a in clique:
            if not 0 <= a < dataset.n_attrs:
                raise AttrMismatchError(f"plan references attribute {a} outside the dataset")

    factors = []
    backoffs: dict[int, FactorTable] = {}
    for i, clique in enumerate(plan.cliques):
        factor = _count_table(dataset, tuple(clique))
        if not factor.dense and pseudocount > 0:
            raise ModelError("pseudocount smoothing requires dense tables; clique domain too large")
        factors.append(factor)
        sep = plan.separators[i]
        new = tuple(a for a in clique if a not in set(sep))
        if sep and new:
            backoffs[i] = _count_table(dataset, new)
    return MarginalModel(plan, tuple(factors), backoffs, pseudocount)


def _sparse_slice(attrs, shape, bucket: dict, backoff: bool) -> ConditionalSlice:
    items = sorted(bucket.items())
    coords = np.asarray([c for c, _ in items], dtype=np.int64).reshape(len(items), len(shape))
    weights = np.asarray([v for _, v in items], dtype=np.float64)
    return ConditionalSlice(attrs, shape, None, coords, weights / weights.sum(), backoff)


def _unconditional_slice(factor: FactorTable, attrs, lam: float, backoff: bool) -> ConditionalSlice:
    if factor.dense:
        probs = (factor.counts + lam) / (factor.n + lam * factor.cells)
        return ConditionalSlice(attrs, factor.shape, probs, None, None, backoff)
    return _sparse_slice(attrs, factor.shape, factor.counts, backoff)


def _dense_conditional(model: MarginalModel, i: int, context: tuple[int, ...]) -> ConditionalSlice:
    factor = model.factors[i]
    clique = model.plan.cliques[i]
    sep = model.plan.separators[i]
    new = model.new_attrs(i)
    index: list = [slice(None)] * len(clique)
    for a, value in zip(sep, context):
        index[clique.index(a)] = value
    sub = factor.counts[tuple(index)].astype(np.float64)
    lam = model.pseudocount
    total = sub.sum() + lam * sub.size
    if total <= 0:
        return _unconditional_slice(model.backoffs[i], new, lam, backoff=True)
    return ConditionalSlice(new, sub.shape, (sub + lam) / total, None, None, False)


def _sparse_groups(model: MarginalModel, i: int) -> dict:
    """One-pass grouping of a sparse factor's cells by separator context."""
    cached = model._group_cache.get(i)
    if cached is not None:
        return cached
    factor = model.factors[i]
    clique = model.plan.cliques[i]
    sep = model.plan.separators[i]
    new = model.new_attrs(i)
    sep_pos = [clique.index(a) for a in sep]
    new_pos = [clique.index(a) for a in new]
    groups: dict[tuple[int, ...], dict[tuple[int, ...], float]] = {}
    for coords, count in factor.counts.items():
        ctx = tuple(coords[p] for p in sep_pos)
        sub = tuple(coords[p] for p in new_pos)
        bucket = groups.setdefault(ctx, {})
        bucket[sub] = bucket.get(sub, 0.0) + count
    model._group_cache[i] = groups
    return groups


def _sparse_conditional(model: MarginalModel, i: int, context: tuple[int, ...]) -> ConditionalSlice:
    factor = model.factors[i]
    clique = model.plan.cliques[i]
    new = model.new_attrs(i)
    new_pos = [clique.index(a) for a in new]
    new_shape = tuple(factor.shape[p] for p in new_pos)
    bucket = _sparse_groups(model, i).get(context)
    if not bucket:
        return _unconditional_slice(model.backoffs[i], new, model.pseudocount, backoff=True)
    return _sparse_slice(new, new_shape, bucket, backoff=False)


def conditional(model: MarginalModel, clique_index: int, separator_values) -> ConditionalSlice:
    """Distribution over Dom(C_i \\ F_i) given an assignment of F_i.

    separator_values maps attribute index -> code and must assign every
    separator attribute. Results are cached per context; fills are idempotent
    so concurrent lookups are safe.
    """
    plan = model.plan
    sep = plan.separators[clique_index]
    try:
        context = tuple(int(separator_values[a]) for a in sep)
    except KeyError as exc:
        raise UnassignedSeparatorError(f"separator attribute {exc} is unassigned") from exc

    key = (clique_index, context)
    cached = model._cond_cache.get(key)
    if cached is not None:
        return cached
    if not sep:
        out = _unconditional_slice(
            model.factors[clique_index], plan.cliques[clique_index], model.pseudocount, backoff=False
        )
    elif model.factors[clique_index].dense:
        out = _dense_conditional(model, clique_index, context)
    else:
        out = _sparse_conditional(model, clique_index, context)
    model._cond_cache[key] = out
    return out


def log_density(model: MarginalModel, record) -> float:
    """log2 probability of a full record under the factorized model.

    Returns -inf when any factor assigns zero probability. The record must
    assign every attribute the plan covers.
    """
    try:
        assigned = {a: int(record[a]) for c in model.plan.cliques for a in c}
    except (KeyError, IndexError) as exc:
        raise IncompleteRecordError(f"record misses attribute {exc}") from exc

    total = 0.0
    for i in range(model.plan.r):
        new = model.new_attrs(i)
        if not new:
            continue
        piece = conditional(model, i, assigned)
        p = piece.prob_of_values(tuple(assigned[a] for a in piece.attrs))
        if p <= 0.0:
            return -math.inf
        total += math.log2(p)
    return total


# ---------------------------------------------------------------- serialization

def model_to_json(model: MarginalModel) -> dict:
    """JSON-compatible dump: clique structure plus sparse cell counts."""
    cliques = []
    for i, factor in enumerate(model.factors):
        if factor.dense:
            nz = np.argwhere(factor.counts)
            cells = [[[int(v) for v in coords], int(factor.counts[tuple(coords)])] for coords in nz]
        else:
            cells = [[list(c), int(v)] for c, v in sorted(factor.counts.items())]
        cliques.append(
            {
                "attrs": list(factor.attrs),
                "shape": list(factor.shape),
                "parent": model.plan.parents[i],
                "separator": list(model.plan.separators[i]),
                "n": factor.n,
                "cells": cells,
            }
        )
    return {
        "pseudocount": model.pseudocount,
        "k": model.plan.k,
        "m": model.plan.m,
        "cliques": cliques,
    }


def model_from_json(doc: dict) -> MarginalModel:
    """Rebuild a model from model_to_json output."""
    cliques = []
    parents = []
    separators = []
    factors = []
    for entry in doc["cliques"]:
        attrs = tuple(int(a) for a in entry["attrs"])
        shape = tuple(int(s) for s in entry["shape"])
        cliques.append(attrs)
        parents.append(entry["parent"])
        separators.append(tuple(int(a) for a in entry["separator"]))
        cells = int(np.prod(shape, dtype=object))
        if cells <= DENSE_CELL_LIMIT:
            counts = np.zeros(shape, dtype=np.int64)
            for coords, v in entry["cells"]:
                counts[tuple(int(c) for c in coords)] = int(v)
            factors.append(FactorTable(attrs, shape, int(entry["n"]), counts))
        else:
            factors.append(
                FactorTable(
                    attrs,
                    shape,
                    int(entry["n"]),
                    {tuple(int(c) for c in coords): int(v) for coords, v in entry["cells"]},
                )
            )
    plan = CliquePlan(
        tuple(cliques), tuple(parents), tuple(separators), int(doc["k"]), int(doc["m"])
    )
    backoffs = {}
    for i, attrs in enumerate(plan.cliques):
        sep = plan.separators[i]
        new = tuple(a for a in attrs if a not in set(sep))
        if sep and new:
            backoffs[i] = _marginalize(factors[i], attrs, new)
    return MarginalModel(plan, tuple(factors), backoffs, float(doc["pseudocount"]))


def _marginalize(factor: FactorTable, attrs: tuple[int, ...], keep: tuple[int, ...]) -> FactorTable:
    # attrs and keep are both sorted, so kept axes stay in order after summing.
    keep_pos = [attrs.index(a) for a in keep]
    keep_shape = tuple(factor.shape[p] for p in keep_pos)
    if factor.dense:
        drop = tuple(p for p in range(len(attrs)) if p not in keep_pos)
        counts = factor.counts.sum(axis=drop) if drop else factor.counts
        return FactorTable(keep, keep_shape, factor.n, counts)
    out: dict[tuple[int, ...], int] = {}
    for coords, count in factor.counts.items():
        sub = tuple(coords[p] for p in keep_pos)
        out[sub] = out.get(sub, 0) + count
    return FactorTable(keep, keep_shape, factor.n, out)
