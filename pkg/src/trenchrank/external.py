"""External rank validation against accolade labels.

Ratings from the fitted models are checked against season-honor labels
(first-team / second-team) with two metrics: tie-aware Mann-Whitney
rank AUC and enrichment@K (precision among the top K divided by the
positive base rate, K = number of positives in the slice).  Each model
is compared against a task-matched raw baseline: empirical win rate for
the win task and empirical severity value for the severity task.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError
from .fit import BinaryFit, MultinomialFit
from .interactions import (
    InteractionTable,
    OutcomeClass,
    SeverityWeights,
    default_severity_weights,
)

ROLES = ("rusher", "blocker")
ACCOLADE_SLICES = ("first", "first_second")
ACCOLADE_CSV_HEADER = ["player_id", "team_level"]
_TEAM_LEVELS = ("first", "second")


@dataclass(frozen=True)
class RankEvalRow:
    """Model-vs-baseline ranking comparison for one (task, role, slice)."""

    task: str
    role: str
    accolade: str
    k: int
    auc: float
    base_auc: float
    delta_auc: float
    enrichment: float
    base_enrichment: float
    delta_enrichment: float


def read_accolades_csv(path) -> dict[str, str]:
    """Load per-player accolade levels; players absent have no accolade."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ACCOLADE_CSV_HEADER:
            raise DataError(
                f"bad accolade header in {path}: expected {ACCOLADE_CSV_HEADER}, got {header}"
            )
        labels: dict[str, str] = {}
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(rec)}")
            pid, level = rec
            if level not in _TEAM_LEVELS:
                raise DataError(
                    f"{path}:{lineno}: team_level must be one of {_TEAM_LEVELS}, got {level!r}"
                )
            if pid in labels:
                raise DataError(f"{path}:{lineno}: duplicate player_id {pid!r}")
            labels[pid] = level
    return labels


def rank_auc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Tie-aware Mann-Whitney AUC by explicit pair counting."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if s.shape != y.shape:
        raise DataError(f"length mismatch: {s.shape} scores vs {y.shape} labels")
    pos = s[y]
    neg = s[~y]
    if pos.size == 0 or neg.size == 0:
        raise DataError(
            f"rank_auc needs both label values; got {pos.size} positives, {neg.size} negatives"
        )
    diff = pos[:, None] - neg[None, :]
    wins = np.count_nonzero(diff > 0)
    ties = np.count_nonzero(diff == 0)
    return (wins + 0.5 * ties) / (pos.size * neg.size)


def enrichment_at_k(
    scores: Sequence[float],
    labels: Sequence[bool],
    k: int,
    *,
    ids: Sequence[str] | None = None,
) -> float:
    """Precision among the top k divided by the positive base rate.

    Boundary ties are broken deterministically by (score descending,
    player id ascending); with no ids given, position stands in for id.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    n = s.size
    if s.shape != y.shape:
        raise DataError(f"length mismatch: {s.shape} scores vs {y.shape} labels")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    n_pos = int(y.sum())
    if n_pos == 0:
        raise DataError("enrichment_at_k needs at least one positive label")
    keys = list(range(n)) if ids is None else list(ids)
    order = sorted(range(n), key=lambda i: (-s[i], keys[i]))
    hits = int(y[order[:k]].sum())
    return (hits * n) / (k * n_pos)


def raw_baseline_scores(
    table: InteractionTable,
    task: str,
    role: str,
    weights: SeverityWeights | None = None,
) -> dict[str, float]:
    """Per-player empirical scores, oriented so higher is better.

    Win task: rushers score by win rate, blockers by the rate at which
    they stop the rusher.  Severity task: the severity weight of each
    observed outcome replaces the win indicator.
    """
    if task not in ("win", "severity"):
        raise ValueError(f"task must be 'win' or 'severity', got {task!r}")
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    w = default_severity_weights() if weights is None else weights
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for row in table:
        pid = row.rusher_id if role == "rusher" else row.blocker_id
        if task == "win":
            value = float(row.win_target)
        else:
            value = w.weight(row.severity)
        if role == "blocker":
            value = 1.0 - value
        sums[pid] = sums.get(pid, 0.0) + value
        counts[pid] = counts.get(pid, 0) + 1
    return {pid: sums[pid] / counts[pid] for pid in counts}


def model_scores(
    fit: BinaryFit | MultinomialFit,
    role: str,
    weights: SeverityWeights | None = None,
) -> dict[str, float]:
    """Per-player ratings from a fit: raw effects for the win model,
    severity-weighted effect sums for the multinomial model."""
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    if isinstance(fit, BinaryFit):
        effects = fit.rusher_effects if role == "rusher" else fit.blocker_effects
        return dict(effects)
    w = default_severity_weights() if weights is None else weights
    per_class = fit.rusher_effects if role == "rusher" else fit.blocker_effects
    out: dict[str, float] = {}
    for c in fit.classes:
        wc = w.weight(c)
        for pid, eff in per_class[c].items():
            out[pid] = out.get(pid, 0.0) + wc * eff
    return out


def _slice_positive(level: str | None, accolade: str) -> bool:
    if accolade == "first":
        return level == "first"
    if accolade == "first_second":
        return level in ("first", "second")
    raise ValueError(f"unknown accolade slice {accolade!r}")


def run_external_eval(
    win_fit: BinaryFit,
    severity_fit: MultinomialFit,
    table: InteractionTable,
    accolades: Mapping[str, str],
    slices: Sequence[str] = ACCOLADE_SLICES,
    weights: SeverityWeights | None = None,
    min_n: int = 0,
) -> list[RankEvalRow]:
    """Rank AUC and enrichment@K per (accolade slice, task, role).

    Role membership requires at least one interaction in that role
    (``min_n`` raises the bar); accolade players with no qualifying
    interactions are excluded with a warning.
    """
    role_counts: dict[str, dict[str, int]] = {"rusher": {}, "blocker": {}}
    for r in table:
        role_counts["rusher"][r.rusher_id] = role_counts["rusher"].get(r.rusher_id, 0) + 1
        role_counts["blocker"][r.blocker_id] = role_counts["blocker"].get(r.blocker_id, 0) + 1
    role_players = {
        role: [p for p in (table.rushers if role == "rusher" else table.blockers)
               if role_counts[role][p] >= max(1, min_n)]
        for role in ROLES
    }
    rated = set(role_players["rusher"]) | set(role_players["blocker"])
    missing = sorted(set(accolades) - rated)
    if missing:
        warnings.warn(
            f"{len(missing)} accolade players have no qualifying interactions "
            f"and were excluded: {', '.join(missing[:5])}"
            + ("..." if len(missing) > 5 else ""),
            RuntimeWarning,
            stacklevel=2,
        )

    rows: list[RankEvalRow] = []
    for accolade in slices:
        for task in ("win", "severity"):
            fit = win_fit if task == "win" else severity_fit
            for role in ROLES:
                players = role_players[role]
                model = model_scores(fit, role, weights)
                base = raw_baseline_scores(table, task, role, weights)
                labels = [_slice_positive(accolades.get(p), accolade) for p in players]
                k = sum(labels)
                if k == 0:
                    raise DataError(
                        f"no {accolade!r} accolade positives among {role}s; "
                        "cannot evaluate this slice"
                    )
                m_scores = [model.get(p, 0.0) for p in players]
                b_scores = [base[p] for p in players]
                auc = rank_auc(m_scores, labels)
                base_auc = rank_auc(b_scores, labels)
                enr = enrichment_at_k(m_scores, labels, k, ids=players)
                base_enr = enrichment_at_k(b_scores, labels, k, ids=players)
                rows.append(
                    RankEvalRow(
                        task=task,
                        role=role,
                        accolade=accolade,
                        k=k,
                        auc=auc,
                        base_auc=base_auc,
                        delta_auc=auc - base_auc,
                        enrichment=enr,
                        base_enrichment=base_enr,
                        delta_enrichment=enr - base_enr,
                    )
                )
    return rows
