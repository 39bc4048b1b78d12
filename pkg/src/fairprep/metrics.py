"""Discrimination and distortion measurements.

The discrimination score compares hiring-style odds between every ordered pair
of sensitive values inside each observed admissible context: the worst pair's
mean absolute log2 conditional odds ratio, mapped to [0, 1) by x/(1+x). Cell
probabilities come from epsilon-smoothed counts so empty cells stay finite.

Distortion is the mean KL divergence between original and processed marginals
over a list of attribute subsets (typically the clique plan), with the same
smoothing applied to both sides so identical inputs score exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import EncodedDataset
from .errors import (
    ContextExplosionError,
    MetricError,
    NonBinaryOutcomeError,
    NoSensitiveVariationError,
    SchemaMismatchError,
)
from .info import ProbTable, empirical_joint, kl_divergence


@dataclass(frozen=True)
class RODReport:
    rod_normalized: float
    raw_abs_log: float
    worst_pair: tuple[int, int]
    per_context: tuple[tuple[tuple[int, ...], float, int], ...]  # (context, |log2 OR|, support)


def rod(outcomes, sensitive, contexts, epsilon: float = 1e-6, min_support: int = 1) -> RODReport:
    """Worst-pair mean absolute log2 conditional odds ratio, normalized.

    outcomes must be a binary column; contexts is a list of admissible-context
    columns (empty list = one global context). Only contexts observed with at
    least min_support rows participate.
    """
    outcomes = np.asarray(outcomes)
    sensitive = np.asarray(sensitive)
    if epsilon <= 0:
        raise MetricError("epsilon smoothing must be positive")
    values = np.unique(outcomes)
    if values.min() < 0 or values.max() > 1:
        raise NonBinaryOutcomeError("outcome column must be binary 0/1")
    s_values = np.unique(sensitive)
    if len(s_values) < 2:
        raise NoSensitiveVariationError("sensitive column has fewer than two observed values")

    n = len(outcomes)
    if contexts:
        stacked = np.stack([np.asarray(c) for c in contexts], axis=1)
        ctx_keys, ctx_ids = np.unique(stacked, axis=0, return_inverse=True)
        ctx_keys = [tuple(int(v) for v in row) for row in ctx_keys]
    else:
        ctx_keys = [()]
        ctx_ids = np.zeros(n, dtype=np.int64)

    n_ctx = len(ctx_keys)
    n_s = int(s_values.max()) + 1
    pos = np.zeros((n_ctx, n_s))
    tot = np.zeros((n_ctx, n_s))
    np.add.at(pos, (ctx_ids, sensitive), outcomes)
    np.add.at(tot, (ctx_ids, sensitive), 1)

    support = tot.sum(axis=1).astype(int)
    keep = support >= min_support
    if not keep.any():
        raise MetricError(f"no context reaches the minimum support of {min_support}")

    p1 = (pos + epsilon) / (tot + 2 * epsilon)
    p0 = (tot - pos + epsilon) / (tot + 2 * epsilon)

    best: tuple[float, tuple[int, int]] | None = None
    per_context_best: list[tuple[tuple[int, ...], float, int]] = []
    for s0 in s_values:
        for s1 in s_values:
            if s0 == s1:
                continue
            ratio = (p1[keep, s0] * p0[keep, s1]) / (p0[keep, s0] * p1[keep, s1])
            logs = np.abs(np.log2(ratio))
            score = float(logs.mean())
            pair = (int(s0), int(s1))
            if best is None or score > best[0] or (score == best[0] and pair < best[1]):
                best = (score, pair)
                per_context_best = [
                    (ctx_keys[ci], float(lg), int(support[ci]))
                    for ci, lg in zip(np.flatnonzero(keep), logs)
                ]

    raw = best[0]
    return RODReport(
        rod_normalized=raw / (1.0 + raw),
        raw_abs_log=raw,
        worst_pair=best[1],
        per_context=tuple(per_context_best),
    )


def rod_of_dataset(
    dataset: EncodedDataset,
    outcomes=None,
    epsilon: float = 1e-6,
    min_support: int = 1,
) -> RODReport:
    """Dataset-level plug-in score: the label column (or supplied predictions)
    against the joint sensitive attributes, within admissible contexts."""
    from .dataset import Role

    label = dataset.label_index
    sens = dataset.indices_with_role(Role.SENSITIVE)
    if not sens:
        raise NoSensitiveVariationError("dataset has no sensitive attributes")
    adm = dataset.indices_with_role(Role.ADMISSIBLE)
    outcome_col = dataset.column(label) if outcomes is None else np.asarray(outcomes)
    if dataset.domain_size(label) != 2 and outcomes is None:
        raise NonBinaryOutcomeError("label attribute must be binary for this score")
    if len(sens) == 1:
        s_col = dataset.column(sens[0])
    else:
        shape = tuple(dataset.domain_size(a) for a in sens)
        s_col = np.ravel_multi_index(tuple(dataset.column(a) for a in sens), shape)
    return rod(outcome_col, s_col, [dataset.column(a) for a in adm], epsilon, min_support)


def distortion_kl(
    original: EncodedDataset,
    processed: EncodedDataset,
    attr_subsets,
    epsilon: float = 1e-6,
) -> float:
    """Mean KL divergence (bits) between original and processed marginals over
    the given attribute subsets, smoothing both sides identically."""
    if [a.name for a in original.schema] != [a.name for a in processed.schema] or [
        a.domain for a in original.schema
    ] != [a.domain for a in processed.schema]:
        raise SchemaMismatchError("datasets disagree in schema")
    attr_subsets = [tuple(s) for s in attr_subsets]
    if not attr_subsets or any(not s for s in attr_subsets):
        raise MetricError("attribute subsets must be non-empty")

    total = 0.0
    for subset in attr_subsets:
        p = empirical_joint(original, subset).probs + epsilon
        q = empirical_joint(processed, subset).probs + epsilon
        p /= p.sum()
        q /= q.sum()
        total += kl_divergence(ProbTable(subset, p), ProbTable(subset, q))
    return total / len(attr_subsets)


def conditional_mi_diagnostic(dataset: EncodedDataset, label: int, sensitive_set, given) -> float:
    """Plug-in conditional mutual information I(label; sensitive | given), bits.

    Estimates sum_f P(f) * I(label; sensitive | given = f) over the observed
    contexts of the conditioning set.
    """
    sensitive_set = tuple(sensitive_set)
    given = tuple(given)
    if not sensitive_set:
        raise MetricError("sensitive set must be non-empty")
    ctx_cells = 1
    for a in given:
        ctx_cells *= dataset.domain_size(a)
    if ctx_cells > 10**5:
        raise ContextExplosionError(f"conditioning domain has {ctx_cells} cells (cap 1e5)")

    if given:
        g_shape = tuple(dataset.domain_size(a) for a in given)
        ctx = np.ravel_multi_index(tuple(dataset.column(a) for a in given), g_shape)
    else:
        ctx = np.zeros(dataset.n_rows, dtype=np.int64)
    s_shape = tuple(dataset.domain_size(a) for a in sensitive_set)
    s_col = np.ravel_multi_index(tuple(dataset.column(a) for a in sensitive_set), s_shape)
    y_col = dataset.column(label)

    n_ctx = int(ctx.max()) + 1
    n_s = int(np.prod(s_shape))
    n_y = dataset.domain_size(label)
    counts = np.zeros((n_ctx, n_s, n_y))
    np.add.at(counts, (ctx, s_col, y_col), 1)

    n = dataset.n_rows
    total = 0.0
    ctx_totals = counts.sum(axis=(1, 2))
    for c in np.flatnonzero(ctx_totals):
        sub = counts[c] / ctx_totals[c]
        ps = sub.sum(axis=1, keepdims=True)
        py = sub.sum(axis=0, keepdims=True)
        mask = sub > 0
        mi_c = float((sub[mask] * np.log2(sub[mask] / (ps @ py)[mask])).sum())
        total += (ctx_totals[c] / n) * max(mi_c, 0.0)
    return total
