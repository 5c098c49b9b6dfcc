"""k-fold cross-validation benchmark engine shared by the CLI and tests."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .batched_lazy import fit_predict_batched
from .dataset import Dataset, make_folds
from .eager_tree import fit_predict_eager
from .lazy_paths import fit_predict_lazy
from .metrics import RunMetrics
from .rng import mix_seed
from .splitcore import SplitParams

ALGORITHMS = {
    "dt": ("DT", fit_predict_eager),
    "lazy": ("L-DT", fit_predict_lazy),
    "batched": ("BL-DT", fit_predict_batched),
}


@dataclass(frozen=True)
class FoldOutcome:
    fold: int
    metrics: RunMetrics
    correct: int
    total: int


@dataclass(frozen=True)
class CvResult:
    algorithm: str
    k: int
    metrics: RunMetrics
    accuracy: float
    fold_peaks: tuple[int, ...]


def run_fold(
    data: Dataset,
    plan,
    fold: int,
    algorithm: str,
    b: int,
    params: SplitParams,
    seed: int,
) -> FoldOutcome:
    """Fit on the training side of one fold and score its test rows.

    The per-fold base seed is ``mix_seed(seed, fold)``, so every algorithm
    sees the same bootstraps for the same fold.
    """
    _, fit = ALGORITHMS[algorithm]
    test_rows = plan.test_rows(fold)
    train_rows = plan.train_rows(fold)
    matrix, metrics = fit(data, train_rows, test_rows, b, params, mix_seed(seed, fold))
    predicted = np.argmax(matrix, axis=1)
    correct = int((predicted == data.labels[test_rows]).sum())
    return FoldOutcome(fold=fold, metrics=metrics, correct=correct, total=int(test_rows.size))


def _fold_task(args) -> FoldOutcome:
    return run_fold(*args)


def run_cv(
    data: Dataset,
    algorithm: str,
    k: int,
    b: int,
    params: SplitParams,
    seed: int,
    jobs: int = 1,
) -> CvResult:
    """Run a full k-fold cross validation for one algorithm.

    Fold results merge in fold order whatever the execution order, so the
    outcome does not depend on ``jobs``.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    tag, _ = ALGORITHMS[algorithm]
    plan = make_folds(data.n_rows, k, seed)
    tasks = [(data, plan, fold, algorithm, b, params, seed) for fold in range(k)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_fold_task, tasks))
    else:
        outcomes = [run_fold(*task) for task in tasks]
    merged = RunMetrics(algorithm=tag)
    for outcome in outcomes:
        merged = merged.merge(outcome.metrics)
    correct = sum(outcome.correct for outcome in outcomes)
    total = sum(outcome.total for outcome in outcomes)
    return CvResult(
        algorithm=tag,
        k=k,
        metrics=merged,
        accuracy=correct / total,
        fold_peaks=tuple(outcome.metrics.peak_stack_words for outcome in outcomes),
    )
