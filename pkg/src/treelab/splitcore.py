"""Split selection shared by the eager, lazy, and batched tree algorithms.

All three algorithms call the same :func:`best_condition`, so equal row
subsets always produce identical splits.  Candidates are binary tests:
``value <= threshold`` on numeric attributes (thresholds at midpoints of
consecutive distinct values) and ``value == code`` on categorical ones (one
candidate per code present).  The score is Shannon information gain in bits;
ties break to the lowest attribute index, then the lowest threshold or code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dataset import AttributeKind, Dataset


@dataclass(frozen=True)
class Condition:
    """Binary test on one attribute; rows where it holds are the valid side."""

    attribute: int
    op: Literal["le", "eq"]
    value: float

    def holds_for(self, row: np.ndarray) -> bool:
        cell = row[self.attribute]
        if self.op == "le":
            return bool(cell <= self.value)
        return bool(cell == self.value)

    def describe(self) -> str:
        return f"{self.attribute} {self.op} {self.value!r}"


@dataclass(frozen=True)
class SplitParams:
    """Stopping parameters: minimum rows per expandable node, maximum depth."""

    min_count: int = 5
    max_depth: int = 20

    def __post_init__(self):
        if self.min_count < 1:
            raise ValueError("min_count must be at least 1")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


def class_histogram(data: Dataset, rows) -> np.ndarray:
    """Per-class counts of the given rows, length ``data.class_count``."""
    rows = np.asarray(rows, dtype=np.int64)
    return np.bincount(data.labels[rows], minlength=data.class_count)


def _check_histogram(hist) -> np.ndarray:
    counts = np.asarray(hist, dtype=np.int64)
    if counts.ndim != 1:
        raise ValueError("histogram must be one-dimensional")
    if counts.size and counts.min() < 0:
        raise ValueError("histogram counts must be non-negative")
    if counts.sum() < 1:
        raise ValueError("histogram is empty")
    return counts


def _entropy_of_rows(counts: np.ndarray) -> np.ndarray:
    """Shannon entropy (bits) of each row of a ``(k, h)`` count matrix."""
    c = np.asarray(counts, dtype=np.float64)
    totals = c.sum(axis=1, keepdims=True)
    p = c / totals
    terms = np.zeros_like(p)
    mask = c > 0
    terms[mask] = p[mask] * np.log2(p[mask])
    return -terms.sum(axis=1)


def _gain_of_splits(
    parent: np.ndarray,
    invalid_counts: np.ndarray,
    valid_counts: np.ndarray,
    parent_entropy: float | None = None,
) -> np.ndarray:
    """Information gain of each (invalid, valid) histogram pair."""
    n = parent.sum()
    if parent_entropy is None:
        parent_entropy = _entropy_of_rows(parent[None, :])[0]
    n_invalid = invalid_counts.sum(axis=1)
    n_valid = valid_counts.sum(axis=1)
    # one stacked entropy evaluation; rows are reduced independently, so the
    # values match separate per-side calls bit for bit
    entropies = _entropy_of_rows(np.concatenate([invalid_counts, valid_counts]))
    k = invalid_counts.shape[0]
    children = (n_invalid / n) * entropies[:k] + (n_valid / n) * entropies[k:]
    return parent_entropy - children


def entropy(hist) -> float:
    """Shannon entropy of a class histogram, in bits."""
    counts = _check_histogram(hist)
    return float(_entropy_of_rows(counts[None, :])[0])


def information_gain(parent, invalid_side, valid_side) -> float:
    """Entropy of the parent minus the size-weighted entropy of the sides."""
    parent = _check_histogram(parent)
    invalid = _check_histogram(invalid_side)
    valid = _check_histogram(valid_side)
    if invalid.size != parent.size or valid.size != parent.size:
        raise ValueError("histograms must share the class axis")
    if not np.array_equal(invalid + valid, parent):
        raise ValueError("side histograms must sum to the parent")
    return float(_gain_of_splits(parent, invalid[None, :], valid[None, :])[0])


def majority_class(hist) -> int:
    """Most frequent class; ties break to the lowest class index."""
    counts = _check_histogram(hist)
    return int(np.argmax(counts))


def is_pure(hist) -> bool:
    """True when exactly one class has a nonzero count."""
    counts = _check_histogram(hist)
    return int(np.count_nonzero(counts)) == 1


def valid_mask(cond: Condition, column: np.ndarray) -> np.ndarray:
    """Boolean mask of where the condition holds, over one value column."""
    if cond.op == "le":
        return column <= cond.value
    return column == cond.value


def partition(cond: Condition, data: Dataset, rows) -> tuple[np.ndarray, np.ndarray]:
    """Stable split of ``rows`` into (invalid, valid) by one condition."""
    rows = np.asarray(rows, dtype=np.int64)
    mask = valid_mask(cond, data.values[rows, cond.attribute])
    return rows[~mask], rows[mask]


def _numeric_candidates(column: np.ndarray, labels: np.ndarray, class_count: int):
    """Valid-side histograms and thresholds of every boundary in one column."""
    order = np.argsort(column, kind="stable")
    sorted_values = column[order]
    sorted_labels = labels[order]
    boundaries = np.nonzero(sorted_values[:-1] != sorted_values[1:])[0]
    if boundaries.size == 0:
        return None
    one_hot = np.zeros((column.size, class_count), dtype=np.int64)
    one_hot[np.arange(column.size), sorted_labels] = 1
    cumulative = np.cumsum(one_hot, axis=0)
    valid_counts = cumulative[boundaries]
    lows = sorted_values[boundaries]
    highs = sorted_values[boundaries + 1]
    thresholds = (lows + highs) / 2.0
    # The midpoint of two adjacent doubles can round up onto the high value,
    # which would move the high group to the valid side; pin it back.
    thresholds = np.where(thresholds < highs, thresholds, lows)
    return valid_counts, thresholds


def _categorical_candidates(column: np.ndarray, labels: np.ndarray, class_count: int):
    """Valid-side histograms and codes of every category present in a column."""
    codes, inverse = np.unique(column, return_inverse=True)
    if codes.size < 2:
        return None
    valid_counts = np.zeros((codes.size, class_count), dtype=np.int64)
    np.add.at(valid_counts, (inverse, labels), 1)
    return valid_counts, codes


def best_condition(data: Dataset, rows) -> Condition | None:
    """The candidate condition with the highest information gain.

    Only candidates that leave both sides non-empty are considered.  Returns
    ``None`` when no candidate exists or the best gain is not positive, in
    which case the caller should make a leaf.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("best_condition needs at least one row")
    labels = data.labels[rows]
    parent = np.bincount(labels, minlength=data.class_count)
    parent_entropy = _entropy_of_rows(parent[None, :])[0]

    best: Condition | None = None
    best_gain = 0.0
    for attribute in range(data.n_attributes):
        column = data.values[rows, attribute]
        if data.attr_kinds[attribute] is AttributeKind.NUMERIC:
            found = _numeric_candidates(column, labels, data.class_count)
            op = "le"
        else:
            found = _categorical_candidates(column, labels, data.class_count)
            op = "eq"
        if found is None:
            continue
        valid_counts, values = found
        gains = _gain_of_splits(parent, parent - valid_counts, valid_counts,
                                parent_entropy)
        pick = int(np.argmax(gains))
        if gains[pick] > best_gain:
            best_gain = float(gains[pick])
            best = Condition(attribute=attribute, op=op, value=float(values[pick]))
    return best
