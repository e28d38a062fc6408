"""Smoothed matchup baselines for win and severity prediction.

Four non-latent reference predictors: a global win rate, a per-matchup
win rate built from smoothed per-player rates combined on the logit
scale, global class frequencies, and a per-matchup class distribution
built from smoothed per-player class profiles combined on the
multinomial-logit scale with loss as the reference class.

Per-player quantities are shrunk toward the global value with prior
strength ``m``:

    smoothed = (n * observed + m * global) / (n + m)

None of the baselines reads the double-team flag.  Degenerate rates
(exactly 0 or 1) are preserved; clipping for log loss belongs to the
evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .interactions import CLASSES, InteractionTable, OutcomeClass

DEFAULT_WIN_PRIOR = 25.0
DEFAULT_SEVERITY_PRIOR = 50.0


@dataclass(frozen=True)
class WinBaseline:
    """Global win rate plus smoothed per-player win rates.

    Rates on both sides are rates of rusher wins: a blocker's rate is
    the win rate of the rushers facing that blocker.
    """

    p_global: float
    m: float
    rusher_rates: dict[str, tuple[int, float]]
    blocker_rates: dict[str, tuple[int, float]]


@dataclass(frozen=True)
class SeverityBaseline:
    """Global class frequencies plus smoothed per-player class profiles.

    Profiles are probability vectors over the four outcome classes in
    severity order.
    """

    pi_global: tuple[float, float, float, float]
    m: float
    rusher_profiles: dict[str, tuple[int, tuple[float, float, float, float]]]
    blocker_profiles: dict[str, tuple[int, tuple[float, float, float, float]]]


def logit(p: float) -> float:
    with np.errstate(divide="ignore"):
        return float(np.log(p) - np.log1p(-p))


def inv_logit(x: float) -> float:
    if x >= 0:
        return float(1.0 / (1.0 + np.exp(-x)))
    z = np.exp(x)
    return float(z / (1.0 + z))


def smooth_rate(n: int, rate: float, m: float, global_rate: float) -> float:
    """Shrink an observed rate toward the global rate with prior strength m."""
    if n + m == 0:
        return global_rate
    return (n * rate + m * global_rate) / (n + m)


def _smooth_profile(n: int, profile: np.ndarray, m: float, global_profile: np.ndarray) -> np.ndarray:
    if n + m == 0:
        return global_profile.copy()
    return (n * profile + m * global_profile) / (n + m)


def fit_win_baseline(train: InteractionTable, m: float = DEFAULT_WIN_PRIOR) -> WinBaseline:
    if len(train) == 0:
        raise DataError("cannot fit a win baseline on an empty table")
    if m < 0:
        raise ValueError(f"prior strength must be >= 0, got {m}")
    wins = np.array([r.win_target for r in train], dtype=float)
    p_global = float(wins.mean())

    def side_rates(key_fn) -> dict[str, tuple[int, float]]:
        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        for row, w in zip(train, wins):
            pid = key_fn(row)
            sums[pid] = sums.get(pid, 0.0) + w
            counts[pid] = counts.get(pid, 0) + 1
        return {
            pid: (counts[pid], smooth_rate(counts[pid], sums[pid] / counts[pid], m, p_global))
            for pid in counts
        }

    return WinBaseline(
        p_global=p_global,
        m=float(m),
        rusher_rates=side_rates(lambda r: r.rusher_id),
        blocker_rates=side_rates(lambda r: r.blocker_id),
    )


def predict_win_global(bl: WinBaseline) -> float:
    return bl.p_global


def predict_win_matchup(bl: WinBaseline, rusher_id: str, blocker_id: str) -> float:
    """Inverse-logit of the mean logit of the two smoothed components.

    A player unseen in the relevant role contributes the global rate.
    """
    p_r = bl.rusher_rates.get(rusher_id, (0, bl.p_global))[1]
    p_b = bl.blocker_rates.get(blocker_id, (0, bl.p_global))[1]
    return inv_logit(0.5 * (logit(p_r) + logit(p_b)))


def fit_severity_baseline(
    train: InteractionTable, m: float = DEFAULT_SEVERITY_PRIOR
) -> SeverityBaseline:
    if len(train) == 0:
        raise DataError("cannot fit a severity baseline on an empty table")
    if m < 0:
        raise ValueError(f"prior strength must be >= 0, got {m}")
    n = len(train)
    global_counts = np.zeros(len(CLASSES))
    for row in train:
        global_counts[int(row.severity)] += 1
    pi_global = global_counts / n

    def side_profiles(key_fn) -> dict[str, tuple[int, tuple[float, float, float, float]]]:
        counts: dict[str, np.ndarray] = {}
        for row in train:
            pid = key_fn(row)
            if pid not in counts:
                counts[pid] = np.zeros(len(CLASSES))
            counts[pid][int(row.severity)] += 1
        out = {}
        for pid, vec in counts.items():
            n_p = int(vec.sum())
            smoothed = _smooth_profile(n_p, vec / n_p, m, pi_global)
            out[pid] = (n_p, tuple(float(v) for v in smoothed))
        return out

    return SeverityBaseline(
        pi_global=tuple(float(v) for v in pi_global),
        m=float(m),
        rusher_profiles=side_profiles(lambda r: r.rusher_id),
        blocker_profiles=side_profiles(lambda r: r.blocker_id),
    )


def predict_severity_global(bl: SeverityBaseline) -> np.ndarray:
    return np.asarray(bl.pi_global, dtype=float)


def predict_severity_matchup(bl: SeverityBaseline, rusher_id: str, blocker_id: str) -> np.ndarray:
    """Softmax of per-class log-odds averaged across the two sides.

    Each side contributes eta_c = log(profile_c / profile_loss); the
    loss entry is pinned at 0 and an unseen side falls back to the
    global profile.
    """
    prof_r = np.asarray(bl.rusher_profiles.get(rusher_id, (0, bl.pi_global))[1], dtype=float)
    prof_b = np.asarray(bl.blocker_profiles.get(blocker_id, (0, bl.pi_global))[1], dtype=float)
    loss_i = int(OutcomeClass.LOSS)
    if prof_r[loss_i] == 0.0 or prof_b[loss_i] == 0.0:
        raise DataError(
            "severity matchup log-odds undefined: a smoothed profile has a zero "
            "loss component (possible only at m=0 or a degenerate global profile)"
        )
    with np.errstate(divide="ignore"):
        eta = 0.5 * (
            np.log(prof_r / prof_r[loss_i]) + np.log(prof_b / prof_b[loss_i])
        )
    eta[loss_i] = 0.0
    eta -= eta.max()
    weights = np.exp(eta)
    return weights / weights.sum()


# ---------------------------------------------------------------------------
# JSON export


def win_baseline_to_json_dict(bl: WinBaseline) -> dict:
    return {
        "kind": "win",
        "p_global": bl.p_global,
        "m": bl.m,
        "rusher_rates": {pid: [n, rate] for pid, (n, rate) in bl.rusher_rates.items()},
        "blocker_rates": {pid: [n, rate] for pid, (n, rate) in bl.blocker_rates.items()},
    }


def severity_baseline_to_json_dict(bl: SeverityBaseline) -> dict:
    return {
        "kind": "severity",
        "pi_global": list(bl.pi_global),
        "m": bl.m,
        "rusher_profiles": {
            pid: [n, list(prof)] for pid, (n, prof) in bl.rusher_profiles.items()
        },
        "blocker_profiles": {
            pid: [n, list(prof)] for pid, (n, prof) in bl.blocker_profiles.items()
        },
    }


def win_baseline_from_json_dict(raw: dict) -> WinBaseline:
    return WinBaseline(
        p_global=raw["p_global"],
        m=raw["m"],
        rusher_rates={pid: (int(n), float(r)) for pid, (n, r) in raw["rusher_rates"].items()},
        blocker_rates={pid: (int(n), float(r)) for pid, (n, r) in raw["blocker_rates"].items()},
    )


def severity_baseline_from_json_dict(raw: dict) -> SeverityBaseline:
    return SeverityBaseline(
        pi_global=tuple(float(v) for v in raw["pi_global"]),
        m=raw["m"],
        rusher_profiles={
            pid: (int(n), tuple(float(v) for v in prof))
            for pid, (n, prof) in raw["rusher_profiles"].items()
        },
        blocker_profiles={
            pid: (int(n), tuple(float(v) for v in prof))
            for pid, (n, prof) in raw["blocker_profiles"].items()
        },
    )
