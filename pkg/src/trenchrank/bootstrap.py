"""Game-level bootstrap uncertainty for metrics, ratings, and weekly paths.

Replicates resample whole games with replacement and rerun the pipeline
with the penalty weights held fixed (cross-validation is never invoked
here).  Two modes:

- ``end_to_end``: each replicate re-sorts and re-splits the resampled
  table, refits models and baselines, and records the four holdout
  improvements (95% percentile intervals) and per-player ratings from a
  full-table refit (25th-75th percentile bands).
- ``weekly_path``: for each cumulative week checkpoint, games from
  weeks <= w are resampled and refit, producing per-week rating bands
  of mean +/- 1.96 SD.

Each replicate derives its own RNG stream from (seed, replicate index)
or (seed, week, replicate index), so results do not depend on execution
order.  Percentiles use linearly interpolated order statistics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DataError, FitError
from .evaluate import run_validation
from .external import model_scores
from .fit import fit_severity_model, fit_win_model
from .interactions import Interaction, InteractionTable, canonical_sort

MODES = ("end_to_end", "weekly_path")
MODEL_NAMES = ("win", "severity")
IMPROVEMENT_LEVELS = (2.5, 97.5)
RATING_LEVELS = (25.0, 75.0)
WEEKLY_Z = 1.96


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate count, seed, fixed penalties, and tracking switches.

    ``identity_resample`` replaces each random draw with the original
    game multiset; it exists so that single-replicate runs can be
    checked against the point estimate.
    """

    b: int
    seed: int
    lambda_win: float
    lambda_sev: float
    mode: str
    ratio: float = 0.8
    m_win: float = 25.0
    m_sev: float = 50.0
    models: tuple[str, ...] = MODEL_NAMES
    track_improvements: bool = True
    track_ratings: bool = True
    track_players: tuple[str, ...] | None = None
    identity_resample: bool = False
    tol: float = 1e-8
    max_iter: int = 500
    max_failure_rate: float = 0.05

    def __post_init__(self) -> None:
        if self.b < 1:
            raise ValueError(f"replicate count must be >= 1, got {self.b}")
        if self.lambda_win <= 0 or self.lambda_sev <= 0:
            raise ValueError("bootstrap penalties must be positive (fixed from a prior CV run)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad:
            raise ValueError(f"unknown model names: {bad}")
        if self.track_improvements and tuple(self.models) != MODEL_NAMES:
            raise ValueError("improvement tracking refits both models; restrict via track_improvements=False")


@dataclass(frozen=True)
class TrackedSeries:
    """Replicate values for one quantity plus its standard reductions.

    ``values`` has one entry per successful replicate; NaN marks a
    replicate where the quantity was undefined (e.g. a player absent
    from the resample).  ``lo``/``hi`` are percentile bounds for
    improvement and rating series and mean +/- 1.96 SD for weekly
    series; all reductions can be recomputed from ``values``.
    """

    values: tuple[float, ...]
    mean: float
    sd: float
    lo: float
    hi: float


@dataclass(frozen=True)
class BootstrapSummary:
    mode: str
    b: int
    n_failed: int
    improvements: dict[tuple[str, str], TrackedSeries] = field(default_factory=dict)
    ratings: dict[tuple[str, str, str], TrackedSeries] = field(default_factory=dict)
    weekly: dict[tuple[str, str, str, int], TrackedSeries] = field(default_factory=dict)
    checkpoints: tuple[int, ...] = ()


def percentile_interval(values: Sequence[float], lo_pct: float, hi_pct: float) -> tuple[float, float]:
    """Percentile bounds by linear interpolation between order statistics."""
    arr = np.asarray(values, dtype=float)
    arr = arr[np.isfinite(arr)]
    if arr.size == 0:
        return math.nan, math.nan
    lo, hi = np.percentile(arr, [lo_pct, hi_pct], method="linear")
    return float(lo), float(hi)


def resample_games(game_ids: Sequence[str], rng: np.random.Generator) -> list[str]:
    """Draw |games| game ids with replacement (a multiset, in draw order)."""
    if len(game_ids) == 0:
        raise DataError("cannot resample an empty game list")
    draws = rng.integers(0, len(game_ids), size=len(game_ids))
    return [game_ids[i] for i in draws]


def resampled_table(table: InteractionTable, drawn: Sequence[str]) -> InteractionTable:
    """Concatenate the drawn games' rows and canonically sort.

    Repeated draws are kept as distinct blocks: the second and later
    copies of a game get a copy ordinal appended to game_id so the sort
    stays deterministic.
    """
    by_game = table.rows_by_game
    rows: list[Interaction] = []
    seen: dict[str, int] = {}
    for gid in drawn:
        if gid not in by_game:
            raise DataError(f"drawn game {gid!r} not present in table")
        copy = seen.get(gid, 0)
        seen[gid] = copy + 1
        block = by_game[gid]
        if copy == 0:
            rows.extend(block)
        else:
            tagged = f"{gid}#{copy + 1}"
            rows.extend(replace(r, game_id=tagged) for r in block)
    return canonical_sort(InteractionTable(rows))


def _series(values: list[float], kind: str) -> TrackedSeries:
    arr = np.asarray(values, dtype=float)
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        return TrackedSeries(tuple(values), math.nan, math.nan, math.nan, math.nan)
    mean = float(finite.mean())
    sd = float(finite.std(ddof=1)) if finite.size > 1 else math.nan
    if kind == "improvement":
        lo, hi = percentile_interval(finite, *IMPROVEMENT_LEVELS)
    elif kind == "rating":
        lo, hi = percentile_interval(finite, *RATING_LEVELS)
    else:
        lo = mean - WEEKLY_Z * sd if finite.size > 1 else math.nan
        hi = mean + WEEKLY_Z * sd if finite.size > 1 else math.nan
    return TrackedSeries(tuple(float(v) for v in arr), mean, sd, lo, hi)


def _tracked_role_players(
    table: InteractionTable, role: str, config: BootstrapConfig
) -> list[str]:
    players = table.rushers if role == "rusher" else table.blockers
    if config.track_players is None:
        return list(players)
    keep = set(config.track_players)
    return [p for p in players if p in keep]


def _fit_ratings(tbl: InteractionTable, config: BootstrapConfig) -> dict[tuple[str, str], dict[str, float]]:
    out: dict[tuple[str, str], dict[str, float]] = {}
    for model in config.models:
        if model == "win":
            fit = fit_win_model(tbl, config.lambda_win, tol=config.tol, max_iter=config.max_iter)
        else:
            fit = fit_severity_model(tbl, config.lambda_sev, tol=config.tol, max_iter=config.max_iter)
        for role in ("rusher", "blocker"):
            out[(model, role)] = model_scores(fit, role)
    return out


def _check_failures(n_failed: int, b: int, max_rate: float) -> None:
    if n_failed > max_rate * b:
        raise FitError(
            f"{n_failed} of {b} bootstrap replicates failed to fit "
            f"(limit {max_rate:.0%}); aborting"
        )


def end_to_end_bootstrap(table: InteractionTable, config: BootstrapConfig) -> BootstrapSummary:
    """Resample games B times, rerunning the split/fit/validate pipeline.

    Improvements come from each replicate's re-split holdout; ratings
    come from a refit on the replicate's full table, since season
    ratings are full-data quantities.  Failed replicates are dropped
    and counted; more than ``max_failure_rate`` of them aborts.
    """
    if config.mode != "end_to_end":
        raise ValueError(f"config mode is {config.mode!r}, expected 'end_to_end'")
    games = list(table.games)
    if not games:
        raise DataError("bootstrap requires at least one game")

    imp_values: dict[tuple[str, str], list[float]] = {}
    rating_players = {
        (model, role): _tracked_role_players(table, role, config)
        for model in config.models
        for role in ("rusher", "blocker")
    }
    rating_values: dict[tuple[str, str, str], list[float]] = {
        (model, role, pid): []
        for (model, role), players in rating_players.items()
        for pid in players
        if config.track_ratings
    }

    n_failed = 0
    for rep in range(config.b):
        rng = np.random.default_rng([config.seed, rep])
        drawn = list(games) if config.identity_resample else resample_games(games, rng)
        tbl = resampled_table(table, drawn)
        try:
            report = None
            if config.track_improvements:
                report = run_validation(
                    tbl,
                    lambda_win=config.lambda_win,
                    lambda_sev=config.lambda_sev,
                    m_win=config.m_win,
                    m_sev=config.m_sev,
                    ratio=config.ratio,
                    tol=config.tol,
                    max_iter=config.max_iter,
                )
            scores = _fit_ratings(tbl, config) if config.track_ratings else None
        except FitError:
            n_failed += 1
            _check_failures(n_failed, config.b, config.max_failure_rate)
            continue
        if report is not None:
            for row in report.rows:
                imp_values.setdefault((row.task, row.baseline), []).append(row.improvement)
        if scores is not None:
            for (model, role), players in rating_players.items():
                got = scores[(model, role)]
                for pid in players:
                    rating_values[(model, role, pid)].append(got.get(pid, math.nan))

    return BootstrapSummary(
        mode=config.mode,
        b=config.b,
        n_failed=n_failed,
        improvements={k: _series(v, "improvement") for k, v in imp_values.items()},
        ratings={k: _series(v, "rating") for k, v in rating_values.items()},
    )


def weekly_path_bootstrap(table: InteractionTable, config: BootstrapConfig) -> BootstrapSummary:
    """Per-cumulative-week resampled refits giving rating uncertainty bands.

    For checkpoint w, games from weeks <= w are resampled B times and
    both models refit at the fixed penalties; the band per player and
    week is mean +/- 1.96 SD over the replicates where the player
    appears.  Checkpoints with no games yet are skipped with a warning.
    """
    if config.mode != "weekly_path":
        raise ValueError(f"config mode is {config.mode!r}, expected 'weekly_path'")
    if len(table) == 0:
        raise DataError("weekly path bootstrap requires a nonempty table")
    max_week = max(r.week for r in table)

    weekly_values: dict[tuple[str, str, str, int], list[float]] = {}
    rating_players = {
        (model, role): _tracked_role_players(table, role, config)
        for model in config.models
        for role in ("rusher", "blocker")
    }
    checkpoints: list[int] = []
    for week in range(1, max_week + 1):
        if any(r.week <= week for r in table):
            checkpoints.append(week)
        else:
            warnings.warn(
                f"checkpoint week {week} has no games yet; skipped",
                RuntimeWarning,
                stacklevel=2,
            )
    planned_fits = config.b * len(checkpoints)

    n_failed = 0
    for week in checkpoints:
        sub = InteractionTable([r for r in table if r.week <= week])
        games = list(sub.games)
        for rep in range(config.b):
            rng = np.random.default_rng([config.seed, week, rep])
            drawn = list(games) if config.identity_resample else resample_games(games, rng)
            tbl = resampled_table(sub, drawn)
            try:
                scores = _fit_ratings(tbl, config)
            except FitError:
                n_failed += 1
                _check_failures(n_failed, planned_fits, config.max_failure_rate)
                continue
            for (model, role), players in rating_players.items():
                got = scores[(model, role)]
                for pid in players:
                    weekly_values.setdefault((model, role, pid, week), []).append(
                        got.get(pid, math.nan)
                    )

    return BootstrapSummary(
        mode=config.mode,
        b=config.b,
        n_failed=n_failed,
        weekly={k: _series(v, "weekly") for k, v in weekly_values.items()},
        checkpoints=tuple(checkpoints),
    )
