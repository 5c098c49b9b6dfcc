"""CSV-backed datasets, cross-validation folds, and bootstrap resampling.

Dataset layout: the last CSV column holds class labels, every other column
is an attribute.  A column is numeric when each of its cells parses as a
finite number, categorical otherwise; categorical values (and the labels)
are stored as dense integer codes assigned in first-appearance order, with
the decoding tables kept on the dataset.  Cells equal to ``?`` or empty mark
missing values; the only supported policy drops such rows before anything
else is inferred.

All structures here are immutable after construction and safe to share
across threads; the three operations are pure functions of their inputs,
including the seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .rng import SplitMix64

MISSING_CELLS = frozenset({"", "?"})


class AttributeKind(Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


class DatasetError(Exception):
    """Input data that cannot be turned into a usable dataset."""


class SchemaMismatchError(DatasetError):
    """A prediction file whose columns do not line up with the training data."""


@dataclass(frozen=True)
class Dataset:
    """A column-typed table of observations with integer-coded class labels.

    ``values`` is an ``(n_rows, n_attributes)`` float matrix; categorical
    cells hold their integer code (exact in float64).  ``categories[j]`` is
    the decoding table of attribute ``j``, or ``None`` for numeric columns.
    """

    name: str
    attr_names: tuple[str, ...]
    attr_kinds: tuple[AttributeKind, ...]
    values: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    categories: tuple[tuple[str, ...] | None, ...]
    label_name: str = "label"

    def __post_init__(self):
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        if values.ndim != 2:
            raise DatasetError("values must be a 2-D matrix")
        n, m = values.shape
        if n < 1 or m < 1:
            raise DatasetError("need at least one row and one attribute")
        if labels.shape != (n,):
            raise DatasetError("labels must have one entry per row")
        if len(self.attr_names) != m or len(self.attr_kinds) != m:
            raise DatasetError("attribute metadata does not match the value matrix")
        if len(self.categories) != m:
            raise DatasetError("need one decoding table slot per attribute")
        if len(self.class_names) < 2:
            raise DatasetError("need at least 2 distinct classes")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise DatasetError("label codes out of range")
        values.setflags(write=False)
        labels.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    def all_rows(self) -> np.ndarray:
        return np.arange(self.n_rows, dtype=np.int64)


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every row to one of ``k`` cross-validation folds."""

    k: int
    assignment: np.ndarray
    seed: int

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", assignment)
        assignment.setflags(write=False)

    def test_rows(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignment == fold)[0].astype(np.int64)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignment != fold)[0].astype(np.int64)


@dataclass(frozen=True)
class BootstrapSample:
    """Training-row indices drawn with replacement, one per training row."""

    row_indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.row_indices, dtype=np.int64)
        object.__setattr__(self, "row_indices", idx)
        idx.setflags(write=False)


def _parse_number(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="") as handle:
            rows = [[cell.strip() for cell in row] for row in csv.reader(handle)]
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if row]
    if not rows:
        raise DatasetError(f"{path}: file holds no rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DatasetError(f"{path}: row {i} has {len(row)} cells, expected {width}")
    return rows


def _split_header(rows: list[list[str]], has_header: bool):
    if has_header:
        return rows[0], rows[1:]
    return None, rows


def _drop_missing(rows: list[list[str]]) -> list[list[str]]:
    return [row for row in rows if all(cell not in MISSING_CELLS for cell in row)]


def _encode_category(cells: list[str]) -> tuple[list[int], tuple[str, ...]]:
    codes: dict[str, int] = {}
    encoded = []
    for cell in cells:
        if cell not in codes:
            codes[cell] = len(codes)
        encoded.append(codes[cell])
    return encoded, tuple(codes)


def load_csv(
    path,
    *,
    has_header: bool = True,
    missing_policy: str = "drop_row",
    name: str | None = None,
) -> Dataset:
    """Load a comma-separated dataset.

    The last column always holds the class labels and is treated as
    categorical.  Attribute columns are numeric when every cell parses as a
    finite number.  Rows containing ``?`` or empty cells are dropped under
    the ``drop_row`` policy (the only one supported).
    """
    if missing_policy != "drop_row":
        raise ValueError(f"unsupported missing policy: {missing_policy!r}")
    rows = _read_rows(path)
    header, data_rows = _split_header(rows, has_header)
    if len(rows[0]) < 2:
        raise DatasetError(f"{path}: need at least 2 columns (attributes + label)")
    kept = _drop_missing(data_rows)
    if not kept:
        raise DatasetError(f"{path}: no data rows left after dropping missing values")

    m = len(kept[0]) - 1
    attr_names = tuple(header[:m]) if header else tuple(f"a{j}" for j in range(m))
    label_name = header[m] if header else "label"

    columns = np.empty((len(kept), m), dtype=np.float64)
    kinds = []
    categories: list[tuple[str, ...] | None] = []
    for j in range(m):
        cells = [row[j] for row in kept]
        parsed = [_parse_number(cell) for cell in cells]
        if all(value is not None for value in parsed):
            kinds.append(AttributeKind.NUMERIC)
            categories.append(None)
            columns[:, j] = parsed
        else:
            kinds.append(AttributeKind.CATEGORICAL)
            encoded, table = _encode_category(cells)
            categories.append(table)
            columns[:, j] = encoded

    label_codes, class_names = _encode_category([row[m] for row in kept])
    if len(class_names) < 2:
        raise DatasetError(f"{path}: need at least 2 distinct classes")

    return Dataset(
        name=name if name is not None else Path(path).stem,
        attr_names=attr_names,
        attr_kinds=tuple(kinds),
        values=columns,
        labels=np.asarray(label_codes, dtype=np.int64),
        class_names=class_names,
        categories=tuple(categories),
        label_name=label_name,
    )


def load_prediction_rows(train: Dataset, path, *, has_header: bool = True) -> np.ndarray:
    """Parse a prediction CSV against a training dataset's schema.

    The file must carry the training attribute columns, optionally followed
    by a label column (it is ignored).  Categorical values unseen in
    training encode as -1, which no equality condition matches.  Rows with
    missing cells are dropped; a non-numeric cell in a numeric column is a
    schema mismatch.
    """
    rows = _read_rows(path)
    header, data_rows = _split_header(rows, has_header)
    m = train.n_attributes
    width = len(rows[0])
    if width not in (m, m + 1):
        raise SchemaMismatchError(
            f"{path}: expected {m} or {m + 1} columns, found {width}"
        )
    if header is not None:
        expected = train.attr_names + ((train.label_name,) if width == m + 1 else ())
        if tuple(header) != expected:
            raise SchemaMismatchError(
                f"{path}: header {tuple(header)!r} does not match training columns"
            )
    kept = [row[:m] for row in _drop_missing(data_rows)]

    matrix = np.empty((len(kept), m), dtype=np.float64)
    for j in range(m):
        cells = [row[j] for row in kept]
        if train.attr_kinds[j] is AttributeKind.NUMERIC:
            for i, cell in enumerate(cells):
                value = _parse_number(cell)
                if value is None:
                    raise SchemaMismatchError(
                        f"{path}: non-numeric cell {cell!r} in numeric column"
                        f" {train.attr_names[j]!r}"
                    )
                matrix[i, j] = value
        else:
            table = {category: code for code, category in enumerate(train.categories[j])}
            for i, cell in enumerate(cells):
                matrix[i, j] = table.get(cell, -1)
    return matrix


def as_test_matrix(data: Dataset, test) -> np.ndarray:
    """Normalize a test-set argument to an ``(n_s, m)`` value matrix.

    Accepts either row indices into ``data`` or an already-materialized
    value matrix (as produced by :func:`load_prediction_rows`).
    """
    arr = np.asarray(test)
    if arr.ndim == 1:
        return data.values[arr.astype(np.int64)]
    if arr.ndim == 2 and arr.shape[1] == data.n_attributes:
        return np.asarray(arr, dtype=np.float64)
    raise ValueError("test must be row indices or an (n_s, n_attributes) matrix")


def make_folds(n_rows: int, k: int, seed: int) -> FoldPlan:
    """Assign rows to ``k`` folds: deterministic shuffle, then round-robin.

    Fold sizes differ by at most one, and the same ``(n_rows, k, seed)``
    always yields the identical assignment.
    """
    if not 2 <= k <= n_rows:
        raise ValueError(f"fold count {k} out of range [2, {n_rows}]")
    order = list(range(n_rows))
    rng = SplitMix64(seed)
    for i in range(n_rows - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    assignment = np.empty(n_rows, dtype=np.int64)
    for position, row in enumerate(order):
        assignment[row] = position % k
    return FoldPlan(k=k, assignment=assignment, seed=seed)


def bootstrap(train_indices, seed: int) -> BootstrapSample:
    """Draw ``len(train_indices)`` of the given rows uniformly with replacement."""
    idx = np.asarray(train_indices, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("cannot bootstrap an empty training set")
    rng = SplitMix64(seed)
    n = idx.size
    picks = np.fromiter((idx[rng.below(n)] for _ in range(n)), dtype=np.int64, count=n)
    return BootstrapSample(row_indices=picks)
