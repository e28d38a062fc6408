"""Ordered holdout validation: split, log losses, and baseline comparisons.

The holdout is an ordered 80/20 split of the canonically sorted table
(train = floor(0.8 n)).  Both ridge models are fit on the train portion
with penalty weights selected by grouped cross-validation on the train
portion only; the four baselines are fit on the same train portion, and
everything is scored by log loss (nats) on the held-out rows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import (
    DEFAULT_SEVERITY_PRIOR,
    DEFAULT_WIN_PRIOR,
    SeverityBaseline,
    WinBaseline,
    fit_severity_baseline,
    fit_win_baseline,
    predict_severity_matchup,
    predict_win_matchup,
)
from .errors import DataError
from .fit import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    BinaryFit,
    MultinomialFit,
    cv_select_lambda,
    fit_severity_model,
    fit_win_model,
    predict_class_prob_matrix,
    predict_win_probs,
)
from .interactions import CLASSES, InteractionTable, OutcomeClass

PROB_CLIP = 1e-15
DEFAULT_SPLIT_RATIO = 0.8
SENSITIVITY_PRIOR_GRID = (10.0, 25.0, 50.0, 100.0)

TASKS = ("win", "severity")
BASELINE_KINDS = ("global", "matchup")


@dataclass(frozen=True)
class SplitResult:
    """Ordered train/test partition of an interaction table."""

    train: InteractionTable
    test: InteractionTable
    ratio: float


@dataclass(frozen=True)
class ValidationRow:
    """One model-vs-baseline holdout comparison (losses in nats)."""

    task: str
    baseline: str
    model_logloss: float
    baseline_logloss: float
    improvement: float


@dataclass(frozen=True)
class SensitivityRow:
    """One matchup-baseline comparison at a specific prior strength."""

    task: str
    m: float
    model_logloss: float
    baseline_logloss: float
    improvement: float


@dataclass(frozen=True)
class ValidationReport:
    """The four validation rows plus the fitted objects behind them."""

    rows: tuple[ValidationRow, ...]
    lambda_win: float
    lambda_sev: float
    n_train: int
    n_test: int
    win_fit: BinaryFit
    severity_fit: MultinomialFit
    win_baseline: WinBaseline
    severity_baseline: SeverityBaseline


def ordered_split(table: InteractionTable, ratio: float = DEFAULT_SPLIT_RATIO) -> SplitResult:
    """First floor(ratio*n) rows to train, the rest to test, order kept."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    if not table.is_canonically_sorted():
        raise DataError("ordered_split requires a canonically sorted table")
    n = len(table)
    n_train = math.floor(ratio * n)
    if n_train == 0 or n_train == n:
        warnings.warn(
            f"degenerate split: {n_train} train / {n - n_train} test rows",
            RuntimeWarning,
            stacklevel=2,
        )
    rows = list(table)
    return SplitResult(
        train=InteractionTable(rows[:n_train]),
        test=InteractionTable(rows[n_train:]),
        ratio=ratio,
    )


def binary_log_loss(probs: Sequence[float], outcomes: Sequence[bool]) -> float:
    """Mean Bernoulli cross-entropy in nats, probabilities clipped."""
    p = np.asarray(probs, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    if p.shape != y.shape:
        raise DataError(f"length mismatch: {p.shape} probs vs {y.shape} outcomes")
    if p.size == 0:
        raise DataError("binary_log_loss requires at least one row")
    p = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def multiclass_log_loss(prob_matrix: np.ndarray, classes: Sequence[OutcomeClass]) -> float:
    """Mean multiclass cross-entropy in nats over the four outcome classes."""
    P = np.asarray(prob_matrix, dtype=float)
    if P.ndim != 2 or P.shape[1] != len(CLASSES):
        raise DataError(f"expected an (n, {len(CLASSES)}) probability matrix, got {P.shape}")
    if P.shape[0] != len(classes):
        raise DataError(f"length mismatch: {P.shape[0]} rows vs {len(classes)} classes")
    if P.shape[0] == 0:
        raise DataError("multiclass_log_loss requires at least one row")
    sums = P.sum(axis=1)
    bad = np.abs(sums - 1.0) > 1e-9
    if bad.any():
        raise DataError(
            f"{int(bad.sum())} probability vectors do not sum to 1 "
            f"(max deviation {np.abs(sums - 1.0).max():.2e})"
        )
    idx = np.array([int(c) for c in classes], dtype=np.intp)
    p_obs = np.clip(P[np.arange(P.shape[0]), idx], PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(np.log(p_obs)))


def _severity_matrix_from_baseline(
    bl: SeverityBaseline, table: InteractionTable, matchup: bool
) -> np.ndarray:
    if matchup:
        return np.vstack(
            [predict_severity_matchup(bl, r.rusher_id, r.blocker_id) for r in table]
        )
    return np.tile(np.asarray(bl.pi_global, dtype=float), (len(table), 1))


def run_validation(
    table: InteractionTable,
    *,
    lambda_win: float | None = None,
    lambda_sev: float | None = None,
    m_win: float = DEFAULT_WIN_PRIOR,
    m_sev: float = DEFAULT_SEVERITY_PRIOR,
    ratio: float = DEFAULT_SPLIT_RATIO,
    grid: Sequence[float] | None = None,
    n_folds: int = 5,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ValidationReport:
    """Fit models and baselines on train, score everything on test.

    Pass ``lambda_win`` / ``lambda_sev`` to pin the penalties (as the
    bootstrap does); leave them None to select each by cross-validation
    on the train portion.  Test rows never touch selection or fitting.
    """
    split = ordered_split(table, ratio)
    train, test = split.train, split.test
    if len(train) == 0 or len(test) == 0:
        raise DataError("validation needs nonempty train and test portions")

    if lambda_win is None:
        lambda_win = cv_select_lambda(
            train, "win", grid, n_folds, tol=tol, max_iter=max_iter
        ).lambda_min
    if lambda_sev is None:
        lambda_sev = cv_select_lambda(
            train, "severity", grid, n_folds, tol=tol, max_iter=max_iter
        ).lambda_min

    win_fit = fit_win_model(train, lambda_win, tol=tol, max_iter=max_iter)
    sev_fit = fit_severity_model(train, lambda_sev, tol=tol, max_iter=max_iter)
    win_bl = fit_win_baseline(train, m_win)
    sev_bl = fit_severity_baseline(train, m_sev)

    y_test = [r.win_target for r in test]
    c_test = [r.severity for r in test]

    model_win = binary_log_loss(predict_win_probs(win_fit, test), y_test)
    model_sev = multiclass_log_loss(predict_class_prob_matrix(sev_fit, test), c_test)

    global_win = binary_log_loss(np.full(len(test), win_bl.p_global), y_test)
    matchup_win = binary_log_loss(
        [predict_win_matchup(win_bl, r.rusher_id, r.blocker_id) for r in test], y_test
    )
    global_sev = multiclass_log_loss(
        _severity_matrix_from_baseline(sev_bl, test, matchup=False), c_test
    )
    matchup_sev = multiclass_log_loss(
        _severity_matrix_from_baseline(sev_bl, test, matchup=True), c_test
    )

    rows = (
        ValidationRow("win", "global", model_win, global_win, global_win - model_win),
        ValidationRow("win", "matchup", model_win, matchup_win, matchup_win - model_win),
        ValidationRow("severity", "global", model_sev, global_sev, global_sev - model_sev),
        ValidationRow("severity", "matchup", model_sev, matchup_sev, matchup_sev - model_sev),
    )
    return ValidationReport(
        rows=rows,
        lambda_win=float(lambda_win),
        lambda_sev=float(lambda_sev),
        n_train=len(train),
        n_test=len(test),
        win_fit=win_fit,
        severity_fit=sev_fit,
        win_baseline=win_bl,
        severity_baseline=sev_bl,
    )


def prior_sensitivity(
    table: InteractionTable,
    m_grid: Sequence[float] = SENSITIVITY_PRIOR_GRID,
    *,
    lambda_win: float | None = None,
    lambda_sev: float | None = None,
    ratio: float = DEFAULT_SPLIT_RATIO,
    grid: Sequence[float] | None = None,
    n_folds: int = 5,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[SensitivityRow]:
    """Matchup-baseline improvements across a prior-strength grid.

    The models do not depend on m, so each task's model loss is fitted
    once and repeated across the grid.
    """
    if len(m_grid) == 0:
        raise ValueError("prior-strength grid must be nonempty")
    split = ordered_split(table, ratio)
    train, test = split.train, split.test
    if len(train) == 0 or len(test) == 0:
        raise DataError("sensitivity sweep needs nonempty train and test portions")

    if lambda_win is None:
        lambda_win = cv_select_lambda(
            train, "win", grid, n_folds, tol=tol, max_iter=max_iter
        ).lambda_min
    if lambda_sev is None:
        lambda_sev = cv_select_lambda(
            train, "severity", grid, n_folds, tol=tol, max_iter=max_iter
        ).lambda_min

    win_fit = fit_win_model(train, lambda_win, tol=tol, max_iter=max_iter)
    sev_fit = fit_severity_model(train, lambda_sev, tol=tol, max_iter=max_iter)
    y_test = [r.win_target for r in test]
    c_test = [r.severity for r in test]
    model_win = binary_log_loss(predict_win_probs(win_fit, test), y_test)
    model_sev = multiclass_log_loss(predict_class_prob_matrix(sev_fit, test), c_test)

    out: list[SensitivityRow] = []
    for m in m_grid:
        bl = fit_win_baseline(train, m)
        loss = binary_log_loss(
            [predict_win_matchup(bl, r.rusher_id, r.blocker_id) for r in test], y_test
        )
        out.append(SensitivityRow("win", float(m), model_win, loss, loss - model_win))
    for m in m_grid:
        bl = fit_severity_baseline(train, m)
        loss = multiclass_log_loss(
            _severity_matrix_from_baseline(bl, test, matchup=True), c_test
        )
        out.append(SensitivityRow("severity", float(m), model_sev, loss, loss - model_sev))
    return out
