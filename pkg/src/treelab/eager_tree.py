"""Eager bagged decision trees: build every tree fully, then route rows.

One tree per bootstrap sample.  A node stops expanding when the depth
exceeds the maximum, the subset is smaller than the minimum count, the
subset is pure, or no candidate condition has positive gain; otherwise it
splits on the best condition and recurses into the invalid side first.
Predictions average the per-tree class votes with weight ``1/b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, as_test_matrix, bootstrap
from .metrics import RunMetrics, cpu_timer, model_word_count
from .rng import mix_seed
from .splitcore import (
    SplitParams,
    Condition,
    best_condition,
    class_histogram,
    is_pure,
    majority_class,
    partition,
)
from .trace import TraceEvent


@dataclass
class TreeNode:
    """Leaf (``label`` set) or internal node (``condition`` and two children)."""

    label: int | None = None
    condition: Condition | None = None
    invalid_child: "TreeNode | None" = None
    valid_child: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.condition is None


@dataclass
class BaggedModel:
    """The trees built for one run, one per bootstrap."""

    trees: list[TreeNode] = field(default_factory=list)
    class_count: int = 2

    @property
    def bootstrap_count(self) -> int:
        return len(self.trees)


def count_nodes(node: TreeNode) -> int:
    if node.is_leaf:
        return 1
    return 1 + count_nodes(node.invalid_child) + count_nodes(node.valid_child)


def build_tree(
    data: Dataset,
    rows,
    depth: int,
    params: SplitParams,
    metrics: RunMetrics,
    *,
    on_visit=None,
    bootstrap_index: int = 0,
    path: tuple[int, ...] = (),
) -> TreeNode:
    """Recursively build one decision tree over the given row subset.

    Counts one explored node per call and charges the row subset to the
    stack accounting for the duration of the call, so the metrics peak is
    the largest root-to-leaf chain of live subset sizes.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot build a tree node from zero rows")
    metrics.nodes_explored += 1
    metrics.charge_frame(rows.size)
    try:
        hist = class_histogram(data, rows)
        cond = None
        stop = depth > params.max_depth or rows.size < params.min_count or is_pure(hist)
        if not stop:
            cond = best_condition(data, rows)
        if cond is None:
            label = majority_class(hist)
            if on_visit is not None:
                on_visit(
                    TraceEvent(
                        algorithm="DT",
                        bootstrap=bootstrap_index,
                        path=path,
                        depth=depth,
                        train_count=int(rows.size),
                        test_count=None,
                        kind="leaf",
                        label=label,
                    )
                )
            return TreeNode(label=label)
        if on_visit is not None:
            on_visit(
                TraceEvent(
                    algorithm="DT",
                    bootstrap=bootstrap_index,
                    path=path,
                    depth=depth,
                    train_count=int(rows.size),
                    test_count=None,
                    kind="split",
                    attribute=cond.attribute,
                    op=cond.op,
                    value=cond.value,
                )
            )
        invalid_rows, valid_rows = partition(cond, data, rows)
        node = TreeNode(condition=cond)
        node.invalid_child = build_tree(
            data, invalid_rows, depth + 1, params, metrics,
            on_visit=on_visit, bootstrap_index=bootstrap_index, path=path + (0,),
        )
        node.valid_child = build_tree(
            data, valid_rows, depth + 1, params, metrics,
            on_visit=on_visit, bootstrap_index=bootstrap_index, path=path + (1,),
        )
        return node
    finally:
        metrics.release_frame(rows.size)


def predict_row(tree: TreeNode, row: np.ndarray) -> int:
    """Follow valid/invalid branches until a leaf; return its class."""
    node = tree
    while not node.is_leaf:
        node = node.valid_child if node.condition.holds_for(row) else node.invalid_child
    return node.label


def route_row(tree: TreeNode, row: np.ndarray) -> tuple[int, tuple[int, ...]]:
    """Like :func:`predict_row`, but also return the branch path taken."""
    node = tree
    path: tuple[int, ...] = ()
    while not node.is_leaf:
        if node.condition.holds_for(row):
            node = node.valid_child
            path += (1,)
        else:
            node = node.invalid_child
            path += (0,)
    return node.label, path


def dump_tree(root: TreeNode) -> str:
    """Preorder plain-text serialization: `L <class>` / `I <attr> <op> <value>`."""
    lines: list[str] = []

    def emit(node: TreeNode) -> None:
        if node.is_leaf:
            lines.append(f"L {node.label}")
        else:
            lines.append(f"I {node.condition.attribute} {node.condition.op} "
                         f"{node.condition.value!r}")
            emit(node.invalid_child)
            emit(node.valid_child)

    emit(root)
    return "\n".join(lines) + "\n"


def build_bagged_model(
    data: Dataset,
    train_rows,
    b: int,
    params: SplitParams,
    base_seed: int,
    metrics: RunMetrics,
    *,
    on_visit=None,
) -> BaggedModel:
    """Build ``b`` trees, one per bootstrap seeded with ``mix_seed(base_seed, i)``."""
    model = BaggedModel(class_count=data.class_count)
    for i in range(b):
        sample = bootstrap(train_rows, mix_seed(base_seed, i))
        root = build_tree(
            data, sample.row_indices, 0, params, metrics,
            on_visit=on_visit, bootstrap_index=i,
        )
        model.trees.append(root)
    return model


def fit_predict_eager(
    data: Dataset,
    train_rows,
    test,
    b: int,
    params: SplitParams,
    base_seed: int,
    *,
    on_visit=None,
) -> tuple[np.ndarray, RunMetrics]:
    """Train ``b`` bagged trees and predict class probabilities for the test set.

    ``test`` is either row indices into ``data`` or a value matrix.  Returns
    the ``(n_s, class_count)`` probability matrix and the run metrics.
    """
    if b < 1:
        raise ValueError("need at least one bootstrap")
    test_matrix = as_test_matrix(data, test)
    n_test = test_matrix.shape[0]
    if n_test == 0:
        raise ValueError("test set must not be empty")
    predictions = np.zeros((n_test, data.class_count), dtype=np.float64)
    metrics = RunMetrics(algorithm="DT")
    share = 1.0 / b
    with cpu_timer() as clock:
        model = BaggedModel(class_count=data.class_count)
        for i in range(b):
            sample = bootstrap(train_rows, mix_seed(base_seed, i))
            root = build_tree(
                data, sample.row_indices, 0, params, metrics,
                on_visit=on_visit, bootstrap_index=i,
            )
            model.trees.append(root)
            for j in range(n_test):
                predictions[j, predict_row(root, test_matrix[j])] += share
    metrics.cpu_seconds += clock.seconds
    metrics.model_words = model_word_count(model)
    return predictions, metrics
