"""Empirical information measures over encoded categorical data.

All quantities are plug-in (maximum-likelihood) estimates in bits (log base 2).
Joint tables are dense numpy arrays shaped by the attributes' domain sizes.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import EncodedDataset
from .errors import (
    EmptyAttrSetError,
    EmptyDatasetError,
    IndexOutOfRangeError,
    SameAttributeError,
    ShapeMismatchError,
    TooManyAttributesError,
)

#: Alternating-sum multivariate MI is exponential in the attribute count.
MULTI_MI_CAP = 6


@dataclass(frozen=True)
class ProbTable:
    """Joint probability table over an ordered attribute subset."""

    attrs: tuple[int, ...]
    probs: np.ndarray  # shape = domain sizes of attrs, sums to 1

    def __post_init__(self):
        total = float(self.probs.sum())
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ShapeMismatchError(f"probability table sums to {total}, expected 1")
        if (self.probs < 0).any():
            raise ShapeMismatchError("probability table holds negative mass")


@dataclass(frozen=True)
class MIMatrix:
    """Symmetric pairwise mutual-information weights over non-label attributes."""

    attrs: tuple[int, ...]
    weights: np.ndarray  # bits, weights[i][j] indexed by position in attrs

    def __post_init__(self):
        n = len(self.attrs)
        if self.weights.shape != (n, n):
            raise ShapeMismatchError("MI weight matrix shape does not match attrs")

    def position(self, attr: int) -> int:
        return self.attrs.index(attr)

    def weight(self, a: int, b: int) -> float:
        """Pairwise MI between attribute indices a and b (0 on the diagonal)."""
        if a == b:
            return 0.0
        return float(self.weights[self.position(a), self.position(b)])

    def scaled(self, factor: float) -> "MIMatrix":
        return MIMatrix(self.attrs, self.weights * factor)


def _check_attrs(dataset: EncodedDataset, attrs) -> tuple[int, ...]:
    attrs = tuple(attrs)
    if not attrs:
        raise EmptyAttrSetError("attribute set is empty")
    if len(set(attrs)) != len(attrs):
        raise SameAttributeError(f"attribute set has duplicates: {attrs}")
    for a in attrs:
        if not 0 <= a < dataset.n_attrs:
            raise IndexOutOfRangeError(f"attribute index {a} out of range")
    if dataset.n_rows == 0:
        raise EmptyDatasetError("dataset has no rows")
    return attrs


def joint_counts(dataset: EncodedDataset, attrs) -> np.ndarray:
    """Dense contingency table of row counts over the given attributes."""
    attrs = _check_attrs(dataset, attrs)
    shape = tuple(dataset.domain_size(a) for a in attrs)
    flat = np.ravel_multi_index(tuple(dataset.column(a) for a in attrs), shape)
    counts = np.bincount(flat, minlength=int(np.prod(shape)))
    return counts.reshape(shape).astype(np.float64)


def empirical_joint(dataset: EncodedDataset, attrs) -> ProbTable:
    """Plug-in joint distribution: cell probability = count / n_rows."""
    attrs = _check_attrs(dataset, attrs)
    return ProbTable(attrs, joint_counts(dataset, attrs) / dataset.n_rows)


def _entropy_of(probs: np.ndarray) -> float:
    p = probs[probs > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(dataset: EncodedDataset, attrs) -> float:
    """Joint Shannon entropy in bits; 0 for a constant column."""
    return _entropy_of(empirical_joint(dataset, attrs).probs)


def pairwise_mi(dataset: EncodedDataset, i: int, j: int) -> float:
    """Mutual information I(i;j) = H(i) + H(j) - H(i,j), clamped at 0."""
    if i == j:
        raise SameAttributeError("pairwise MI needs two distinct attributes")
    value = entropy(dataset, (i,)) + entropy(dataset, (j,)) - entropy(dataset, (i, j))
    return max(value, 0.0)


def mi_matrix(dataset: EncodedDataset, attrs, threads: int = 1) -> MIMatrix:
    """All pairwise MI weights among the given attributes (symmetric, bits)."""
    attrs = _check_attrs(dataset, attrs)
    n = len(attrs)
    weights = np.zeros((n, n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]

    def fill(pair):
        a, b = pair
        weights[a, b] = weights[b, a] = pairwise_mi(dataset, attrs[a], attrs[b])

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, pairs))
    else:
        for pair in pairs:
            fill(pair)
    return MIMatrix(attrs, weights)


def mi_with_attr(dataset: EncodedDataset, target: int, attrs) -> np.ndarray:
    """Pairwise MI of each attribute in attrs with a single target attribute."""
    return np.asarray([pairwise_mi(dataset, a, target) for a in attrs])


def multivariate_mi(dataset: EncodedDataset, attrs, cap: int = MULTI_MI_CAP) -> float:
    """Interaction information: alternating-sign sum of subset entropies.

    Reduces to pairwise MI for two attributes; may be negative for three or
    more (for example an XOR triple). Exponential in len(attrs), hence capped.
    """
    attrs = _check_attrs(dataset, attrs)
    if len(attrs) < 2:
        raise EmptyAttrSetError("multivariate MI needs at least two attributes")
    if len(attrs) > cap:
        raise TooManyAttributesError(f"multivariate MI capped at {cap} attributes")
    total = 0.0
    for size in range(1, len(attrs) + 1):
        sign = (-1.0) ** (size - 1)
        for subset in itertools.combinations(attrs, size):
            total += sign * entropy(dataset, subset)
    return total


def kl_divergence(p: ProbTable, q: ProbTable, smoothing: float | None = None) -> float:
    """D(P || Q) in bits; +inf when Q has a zero where P does not and no
    smoothing was requested. With smoothing eps, Q becomes (Q+eps)/norm first."""
    if p.attrs != q.attrs or p.probs.shape != q.probs.shape:
        raise ShapeMismatchError("KL divergence needs tables over the same attributes")
    pm = p.probs.ravel()
    qm = q.probs.ravel()
    if smoothing is not None:
        qm = qm + smoothing
        qm = qm / qm.sum()
    mask = pm > 0
    if (qm[mask] == 0).any():
        return math.inf
    return float((pm[mask] * np.log2(pm[mask] / qm[mask])).sum())


def mi_of_sets(dataset: EncodedDataset, target, others) -> float:
    """I(target; others) = H(target) + H(others) - H(target u others)."""
    target = tuple(target)
    others = tuple(others)
    return (
        entropy(dataset, target)
        + entropy(dataset, others)
        - entropy(dataset, target + others)
    )
