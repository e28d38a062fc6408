import csv
import warnings
from fractions import Fraction

import numpy as np
import pytest

from trenchrank.errors import DataError
from trenchrank.external import (
    ACCOLADE_SLICES,
    enrichment_at_k,
    model_scores,
    rank_auc,
    raw_baseline_scores,
    read_accolades_csv,
    run_external_eval,
)
from trenchrank.fit import fit_severity_model, fit_win_model
from trenchrank.interactions import InteractionTable, OutcomeClass, default_severity_weights

from conftest import make_row, random_table


def brute_force_auc(scores, labels):
    """Exact pair counting with Fractions; ties contribute one half."""
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    total = Fraction(0)
    for p in pos:
        for n in neg:
            if p > n:
                total += 1
            elif p == n:
                total += Fraction(1, 2)
    return total / (len(pos) * len(neg))


class TestRankAuc:
    def test_perfect_ranking(self):
        assert rank_auc([4.0, 3.0, 2.0, 1.0], [True, True, False, False]) == 1.0

    def test_reversed_ranking(self):
        assert rank_auc([1.0, 2.0, 3.0, 4.0], [True, True, False, False]) == 0.0

    def test_all_tied_is_half(self):
        assert rank_auc([1.0, 1.0, 1.0], [True, False, False]) == 0.5

    def test_matches_brute_force_with_ties(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 40))
            # coarse integer scores force plenty of ties
            scores = rng.integers(0, 5, size=n).astype(float)
            labels = rng.random(n) < 0.5
            if labels.all() or not labels.any():
                continue
            expected = brute_force_auc(scores.tolist(), labels.tolist())
            assert rank_auc(scores, labels) == float(expected)

    def test_complement_of_negated_scores(self, rng):
        scores = rng.normal(size=30)
        labels = rng.random(30) < 0.4
        labels[0] = True
        labels[1] = False
        a = rank_auc(scores, labels)
        b = rank_auc(-scores, labels)
        assert a + b == pytest.approx(1.0, abs=1e-15)

    def test_invariant_under_monotone_transform(self, rng):
        scores = rng.normal(size=50)
        labels = rng.random(50) < 0.3
        labels[:2] = [True, False]
        assert rank_auc(scores, labels) == rank_auc(np.exp(scores), labels)

    def test_degenerate_labels_rejected(self):
        with pytest.raises(DataError):
            rank_auc([1.0, 2.0], [True, True])
        with pytest.raises(DataError):
            rank_auc([1.0, 2.0], [False, False])


class TestEnrichmentAtK:
    def test_identity_hits_equals_enrichment_base_rate_k(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 60))
            scores = rng.integers(0, 6, size=n).astype(float)
            labels = (rng.random(n) < 0.4).tolist()
            if not any(labels):
                continue
            n_pos = sum(labels)
            k = int(rng.integers(1, n + 1))
            e = enrichment_at_k(scores, labels, k)
            # exact identity: enrichment * (n_pos/n) * k == hits in top k
            hits = Fraction(e).limit_denominator(10**12) * Fraction(n_pos, n) * k
            assert hits.denominator == 1
            assert 0 <= hits.numerator <= min(k, n_pos)

    def test_hand_example(self):
        scores = [5.0, 4.0, 3.0, 2.0, 1.0]
        labels = [True, False, True, False, False]
        # top-2 by score contains 1 positive; base rate 2/5
        assert enrichment_at_k(scores, labels, 2) == pytest.approx((1 * 5) / (2 * 2))

    def test_perfect_top_k(self):
        scores = [3.0, 2.0, 1.0, 0.5]
        labels = [True, True, False, False]
        assert enrichment_at_k(scores, labels, 2) == pytest.approx(2.0)

    def test_ties_break_by_player_id(self):
        # identical scores: order falls back to ascending id, making the
        # top-k selection reproducible
        scores = [1.0, 1.0, 1.0]
        labels = [False, True, False]
        ids = ["a", "b", "c"]
        e_named = enrichment_at_k(scores, labels, 1, ids=ids)
        assert e_named == 0.0  # "a" sorts first and is negative
        e_renamed = enrichment_at_k(scores, labels, 1, ids=["z", "b", "c"])
        assert e_renamed == pytest.approx(3.0)  # now "b" leads the order

    def test_bad_k_rejected(self):
        with pytest.raises(ValueError):
            enrichment_at_k([1.0], [True], 0)
        with pytest.raises(ValueError):
            enrichment_at_k([1.0], [True], 2)

    def test_no_positives_rejected(self):
        with pytest.raises(DataError):
            enrichment_at_k([1.0, 2.0], [False, False], 1)


class TestAccoladeCsv:
    def write(self, tmp_path, lines):
        p = tmp_path / "acc.csv"
        p.write_text("\n".join(lines) + "\n")
        return p

    def test_read_and_levels(self, tmp_path):
        p = self.write(
            tmp_path,
            ["player_id,team_level", "R1,first", "B2,second"],
        )
        acc = read_accolades_csv(p)
        assert acc == {"R1": "first", "B2": "second"}

    def test_bad_header_rejected(self, tmp_path):
        p = self.write(tmp_path, ["player,level", "R1,first"])
        with pytest.raises(DataError):
            read_accolades_csv(p)

    def test_duplicate_player_rejected(self, tmp_path):
        p = self.write(
            tmp_path, ["player_id,team_level", "R1,first", "R1,second"]
        )
        with pytest.raises(DataError, match=":3"):
            read_accolades_csv(p)

    def test_unknown_level_rejected(self, tmp_path):
        p = self.write(tmp_path, ["player_id,team_level", "R1,third"])
        with pytest.raises(DataError, match=":2"):
            read_accolades_csv(p)


class TestScores:
    def test_model_scores_binary_are_effects(self, rng, small_table):
        fit = fit_win_model(small_table, 0.3)
        scores = model_scores(fit, "rusher", default_severity_weights())
        assert scores == fit.rusher_effects

    def test_model_scores_severity_weighted_sum(self, rng, small_table):
        fit = fit_severity_model(small_table, 0.3)
        w = default_severity_weights()
        scores = model_scores(fit, "blocker", w)
        pid = small_table.blockers[0]
        expected = sum(
            w.weight(c) * fit.blocker_effects[c][pid]
            for c in fit.classes
            if c is not OutcomeClass.LOSS
        )
        assert scores[pid] == pytest.approx(expected)

    def test_raw_win_scores_orientation(self):
        t = InteractionTable(
            [
                make_row(idx=0, rusher="R1", blocker="B1", win=True),
                make_row(idx=1, rusher="R1", blocker="B1", win=True),
                make_row(idx=2, rusher="R1", blocker="B2", win=False),
                make_row(idx=3, rusher="R2", blocker="B1", win=False),
            ]
        )
        w = default_severity_weights()
        rusher = raw_baseline_scores(t, "win", "rusher", w)
        blocker = raw_baseline_scores(t, "win", "blocker", w)
        assert rusher["R1"] == pytest.approx(2 / 3)
        # blockers are scored by the rate at which they deny wins
        assert blocker["B1"] == pytest.approx(1 / 3)
        assert blocker["B2"] == pytest.approx(1.0)

    def test_raw_severity_scores_use_weights(self):
        t = InteractionTable(
            [
                make_row(idx=0, rusher="R1", severity=OutcomeClass.SACK),
                make_row(idx=1, rusher="R1", severity=OutcomeClass.LOSS),
            ]
        )
        w = default_severity_weights()
        scores = raw_baseline_scores(t, "severity", "rusher", w)
        assert scores["R1"] == pytest.approx(0.5)  # mean of (1.0, 0.0)


class TestRunExternalEval:
    def build(self, rng):
        t = random_table(rng, n_rows=400, n_rushers=8, n_blockers=6, n_games=8)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            win_fit = fit_win_model(t, 0.5)
            sev_fit = fit_severity_model(t, 0.5)
        accolades = {"R0": "first", "R1": "second", "B0": "first", "B1": "second"}
        return t, win_fit, sev_fit, accolades

    def test_eight_rows_and_k_definition(self, rng):
        t, win_fit, sev_fit, accolades = self.build(rng)
        rows = run_external_eval(win_fit, sev_fit, t, accolades)
        assert len(rows) == 8
        assert [r.accolade for r in rows] == ["first"] * 4 + ["first_second"] * 4
        for r in rows:
            if r.accolade == "first":
                assert r.k == 1  # one first-team player per role
            else:
                assert r.k == 2
            assert r.delta_auc == pytest.approx(r.auc - r.base_auc)
            assert 0.0 <= r.auc <= 1.0

    def test_accolade_slices_constant(self):
        assert ACCOLADE_SLICES == ("first", "first_second")

    def test_min_n_drops_thin_players(self, rng):
        t, win_fit, sev_fit, accolades = self.build(rng)
        counts = {}
        for r in t:
            counts[r.rusher_id] = counts.get(r.rusher_id, 0) + 1
        thin = min(counts, key=counts.get)
        rows_all = run_external_eval(win_fit, sev_fit, t, accolades, min_n=0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rows_cut = run_external_eval(
                win_fit, sev_fit, t, accolades, min_n=counts[thin] + 1
            )
        # removing players changes the evaluated population size
        assert len(rows_cut) == 8
        assert any(
            a.auc != b.auc or a.enrichment != b.enrichment
            for a, b in zip(rows_all, rows_cut)
        ) or thin not in accolades

    def test_no_positives_in_slice_rejected(self, rng):
        t, win_fit, sev_fit, _ = self.build(rng)
        with pytest.raises(DataError):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                run_external_eval(win_fit, sev_fit, t, {"nobody": "first"})
