"""Dataset regeneration from the factorized fair distribution.

The pipeline appends a label clique to the attribute plan: the label plus the
k+m-1 fair attributes (admissible or additional roles) most strongly
MI-associated with it. Regeneration then walks the plan in order, drawing the
root clique's columns i.i.d. from its joint table and each later clique's new
columns per row from the conditional at that row's separator values; the
label comes last, from its conditional on the fair separator only. The result
is a fresh sample of the same shape and schema, so any influence of sensitive
or inadmissible attributes on the label survives only through the fair
separator.

The softer variant draws each row's label from the fair conditional with
probability alpha and from an unrestricted-separator conditional otherwise.
Coins come from a dedicated seeded substream, so alpha=1 output is
byte-identical to the strict path under the same seed.

Sampling is inverse-CDF over a fixed cell ordering with one seeded substream
per plan stage, making output a pure function of (dataset, config).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cliques import CliquePlan
from .dataset import FAIR_ROLES, EncodedDataset, Role
from .errors import NoFairAttributesError, PlanDatasetMismatchError, SamplerError
from .marginals import MarginalModel, conditional, fit_marginals

#: Substream tag for the per-row mixture coins; plan stages use their index.
COIN_STREAM_TAG = 0x436F696E


@dataclass(frozen=True)
class LabelClique:
    """The label's separator: fair attributes it will be conditioned on."""

    separator: tuple[int, ...]
    label: int


@dataclass(frozen=True)
class PreprocessConfig:
    k: int
    m: int
    alpha: float = 1.0
    seed: int = 0
    pseudocount: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise SamplerError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.k < 1 or self.m < 1:
            raise SamplerError(f"need k >= 1 and m >= 1, got k={self.k} m={self.m}")


def build_label_clique(
    dataset: EncodedDataset, mi_to_label, k: int, m: int, candidates=None
) -> LabelClique:
    """Pick the label's separator: the top k+m-1 candidates by MI with the
    label (ties to the lower attribute index).

    Candidates default to the admissible and additional attributes; passing an
    explicit pool (e.g. all non-label attributes) builds the unrestricted
    variant used by the mixture path.
    """
    label = dataset.label_index
    if candidates is None:
        candidates = dataset.indices_with_role(*FAIR_ROLES)
    candidates = tuple(candidates)
    if not candidates:
        raise NoFairAttributesError("no admissible or additional attributes to condition the label on")
    if label in candidates:
        raise SamplerError("the label cannot appear in its own separator")
    budget = min(k + m - 1, len(candidates))
    ranked = sorted(candidates, key=lambda a: (-float(mi_to_label[a]), a))
    return LabelClique(separator=tuple(sorted(ranked[:budget])), label=label)


def extend_plan_with_label(plan: CliquePlan, label_clique: LabelClique) -> CliquePlan:
    """Append the label clique; its parent is the plan clique sharing the most
    separator attributes (ties to the lowest index)."""
    shared = [len(set(c) & set(label_clique.separator)) for c in plan.cliques]
    parent = max(range(plan.r), key=lambda i: (shared[i], -i)) if plan.r else None
    clique = tuple(sorted(label_clique.separator + (label_clique.label,)))
    return CliquePlan(
        plan.cliques + (clique,),
        plan.parents + (parent,),
        plan.separators + (label_clique.separator,),
        plan.k,
        plan.m,
    )


def _validate_plan(dataset: EncodedDataset, plan: CliquePlan, label_clique: LabelClique) -> None:
    non_label = set(dataset.non_label_indices)
    if set(plan.covered()) != non_label:
        raise PlanDatasetMismatchError("plan does not cover exactly the non-label attributes")
    if label_clique.label != dataset.label_index:
        raise PlanDatasetMismatchError("label clique names a different label attribute")
    if not set(label_clique.separator) <= non_label:
        raise PlanDatasetMismatchError("label separator reaches outside the non-label attributes")


def _draw_categorical(slice_, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw of len(u) cells; returns (rows, attr) coordinate matrix.

    Rounding can leave the total cdf a hair under 1, so indices clamp to the
    last positive-mass cell rather than to a possibly-empty trailing cell.
    """
    if slice_.probs is not None:
        flat = slice_.probs.ravel()
        cdf = np.cumsum(flat)
        last_pos = int(np.flatnonzero(flat > 0)[-1])
        idx = np.minimum(np.searchsorted(cdf, u, side="right"), last_pos)
        return np.stack(np.unravel_index(idx, slice_.shape), axis=1)
    cdf = np.cumsum(slice_.cell_probs)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    return slice_.coords[idx]


def _sample_stage(
    model: MarginalModel,
    stage: int,
    columns: dict[int, np.ndarray],
    u: np.ndarray,
    override_model: MarginalModel | None = None,
    override_rows: np.ndarray | None = None,
) -> None:
    """Fill the stage's new columns in place.

    With an override model, rows flagged in override_rows draw from the
    override model's same-position stage instead (the label-mixture path; both
    stages must share their new attributes).
    """
    n = len(u)
    override = np.zeros(n, dtype=bool) if override_rows is None else override_rows
    new = model.new_attrs(stage)
    if not new:
        return
    for a in new:
        columns[a] = np.empty(n, dtype=np.int64)

    for mdl, rows in ((model, ~override), (override_model, override)):
        if mdl is None or not rows.any():
            continue
        sep = mdl.plan.separators[stage]
        if not sep:
            slice_ = conditional(mdl, stage, {})
            drawn = _draw_categorical(slice_, u[rows])
            for pos, a in enumerate(slice_.attrs):
                columns[a][rows] = drawn[:, pos]
            continue
        # Group rows by separator context without flat encoding (separator
        # domains can exceed any integer range), then fill group by group.
        row_indices = np.flatnonzero(rows)
        contexts = np.stack([columns[a][row_indices] for a in sep], axis=1)
        uniq, inverse = np.unique(contexts, axis=0, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        bounds = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
        for ui in range(len(uniq)):
            group = row_indices[order[bounds[ui]:bounds[ui + 1]]]
            values = dict(zip(sep, uniq[ui].tolist()))
            slice_ = conditional(mdl, stage, values)
            drawn = _draw_categorical(slice_, u[group])
            for pos, a in enumerate(slice_.attrs):
                columns[a][group] = drawn[:, pos]


def _regenerate(
    dataset: EncodedDataset,
    fair_model: MarginalModel,
    unfair_model: MarginalModel | None,
    alpha: float,
    seed: int,
) -> EncodedDataset:
    n = dataset.n_rows
    plan = fair_model.plan
    columns: dict[int, np.ndarray] = {}
    label_stage = plan.r - 1

    for stage in range(plan.r):
        if not fair_model.new_attrs(stage):
            continue
        u = np.random.default_rng([seed, stage]).random(n)
        if stage == label_stage and unfair_model is not None:
            coins = np.random.default_rng([seed, COIN_STREAM_TAG]).random(n)
            _sample_stage(fair_model, stage, columns, u, unfair_model, coins >= alpha)
        else:
            _sample_stage(fair_model, stage, columns, u)

    missing = [a for a in range(dataset.n_attrs) if a not in columns]
    if missing:
        raise PlanDatasetMismatchError(f"sampling left attributes unassigned: {missing}")
    return EncodedDataset(
        schema=dataset.schema,
        columns=tuple(columns[a] for a in range(dataset.n_attrs)),
        n_rows=n,
    )


def preprocess(
    dataset: EncodedDataset,
    plan: CliquePlan,
    label_clique: LabelClique,
    config: PreprocessConfig,
) -> EncodedDataset:
    """Regenerate the dataset from the factorized fair distribution."""
    _validate_plan(dataset, plan, label_clique)
    ext = extend_plan_with_label(plan, label_clique)
    model = fit_marginals(dataset, ext, config.pseudocount)
    return _regenerate(dataset, model, None, 1.0, config.seed)


def preprocess_plus(
    dataset: EncodedDataset,
    plan: CliquePlan,
    fair_label_clique: LabelClique,
    unfair_label_clique: LabelClique,
    config: PreprocessConfig,
) -> EncodedDataset:
    """Mixture variant: each row's label comes from the fair conditional with
    probability alpha and from the unrestricted conditional otherwise."""
    _validate_plan(dataset, plan, fair_label_clique)
    if unfair_label_clique.label != fair_label_clique.label:
        raise PlanDatasetMismatchError("fair and unrestricted label cliques disagree on the label")
    fair_model = fit_marginals(dataset, extend_plan_with_label(plan, fair_label_clique), config.pseudocount)
    unfair_model = fit_marginals(
        dataset, extend_plan_with_label(plan, unfair_label_clique), config.pseudocount
    )
    return _regenerate(dataset, fair_model, unfair_model, config.alpha, config.seed)
