"""Sparse paired-comparison design construction.

Each interaction becomes one row with an intercept, the double-team
indicator, +1 on the rusher's column and -1 on the blocker's column.
Rusher and blocker columns are separate blocks even when the same
player appears in both roles.

Column layout: ``[intercept | double_team | rushers... | blockers...]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DataError
from .interactions import Interaction, InteractionTable

INTERCEPT_COL = 0
DOUBLE_TEAM_COL = 1

#: One encoded row: (column ordinal, value) pairs for the nonzero entries.
SparseRow = list[tuple[int, float]]


@dataclass(frozen=True)
class PlayerIndex:
    """Deterministic id-to-column mapping for one training table.

    Ordinals are dense and assigned in sorted-id order, so two tables
    with the same player sets produce identical indexes.
    """

    rusher_cols: dict[str, int]
    blocker_cols: dict[str, int]

    @property
    def n_rushers(self) -> int:
        return len(self.rusher_cols)

    @property
    def n_blockers(self) -> int:
        return len(self.blocker_cols)

    @property
    def n_columns(self) -> int:
        return 2 + self.n_rushers + self.n_blockers

    @property
    def rusher_ids(self) -> list[str]:
        return sorted(self.rusher_cols)

    @property
    def blocker_ids(self) -> list[str]:
        return sorted(self.blocker_cols)

    def to_json(self) -> str:
        return json.dumps({"rushers": self.rusher_cols, "blockers": self.blocker_cols})

    @classmethod
    def from_json(cls, text: str) -> "PlayerIndex":
        raw = json.loads(text)
        return cls(rusher_cols=dict(raw["rushers"]), blocker_cols=dict(raw["blockers"]))


def build_index(table: InteractionTable) -> PlayerIndex:
    """Index every distinct rusher and blocker id in the table."""
    if len(table) == 0:
        raise DataError("cannot build a player index from an empty table")
    rushers = table.rushers
    blockers = table.blockers
    rusher_cols = {pid: 2 + i for i, pid in enumerate(rushers)}
    blocker_cols = {pid: 2 + len(rushers) + j for j, pid in enumerate(blockers)}
    return PlayerIndex(rusher_cols=rusher_cols, blocker_cols=blocker_cols)


def encode_row(x: Interaction, idx: PlayerIndex) -> SparseRow:
    """Encode one interaction against an index.

    Players absent from the index contribute no column (their effect is
    the ridge prior mean, zero), so unseen matchups still encode.
    """
    row: SparseRow = [(INTERCEPT_COL, 1.0)]
    if x.double_team:
        row.append((DOUBLE_TEAM_COL, 1.0))
    rc = idx.rusher_cols.get(x.rusher_id)
    if rc is not None:
        row.append((rc, 1.0))
    bc = idx.blocker_cols.get(x.blocker_id)
    if bc is not None:
        row.append((bc, -1.0))
    return row


def encode_table(table: InteractionTable, idx: PlayerIndex) -> list[SparseRow]:
    return [encode_row(x, idx) for x in table]


def rows_to_csr(rows: Iterable[SparseRow], n_columns: int) -> sp.csr_matrix:
    """Assemble encoded rows into a CSR matrix for the solvers."""
    data: list[float] = []
    indices: list[int] = []
    indptr: list[int] = [0]
    for row in rows:
        for col, val in row:
            indices.append(col)
            data.append(val)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data), np.asarray(indices), np.asarray(indptr)),
        shape=(len(indptr) - 1, n_columns),
    )


def build_matrix(table: InteractionTable, idx: PlayerIndex) -> sp.csr_matrix:
    return rows_to_csr(encode_table(table, idx), idx.n_columns)


def penalty_mask(idx: PlayerIndex) -> np.ndarray:
    """1.0 on ridge-penalized columns, 0.0 on the intercept.

    Player effects and the double-team coefficient are penalized; the
    intercept is not, which keeps the shrinkage limit calibrated to the
    training base rate.
    """
    mask = np.ones(idx.n_columns)
    mask[INTERCEPT_COL] = 0.0
    return mask


def linear_predictor(theta: Sequence[float], row: SparseRow) -> float:
    """Dot product of a parameter vector with one encoded row."""
    return sum(theta[col] * val for col, val in row)
