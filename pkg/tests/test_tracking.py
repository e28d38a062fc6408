import math

import pytest

from trenchrank.errors import DataError
from trenchrank.interactions import OutcomeClass
from trenchrank.tracking import (
    Engagement,
    Frame,
    PlayEvents,
    WIN_HORIZON_FRAMES,
    build_interactions,
    detect_double_team,
    is_dropback,
    qb_distance,
    read_engagements_csv,
    read_events_csv,
    read_schedule_csv,
    read_tracking_csv,
    rusher_win_25,
)


def frame(pid, x, y, *, qb=False, game="g1", play="p1", t=0):
    return Frame(game, play, t, pid, float(x), float(y), qb)


class TestQbDistance:
    def test_three_four_five_triangle(self):
        frames = [frame("QB", 0, 0, qb=True), frame("R1", 3, 4)]
        assert qb_distance(frames, "R1") == 5.0

    def test_zero_distance(self):
        frames = [frame("QB", 2, 2, qb=True), frame("B1", 2, 2)]
        assert qb_distance(frames, "B1") == 0.0

    def test_multiple_qbs_rejected(self):
        frames = [frame("QB", 0, 0, qb=True), frame("QB2", 1, 1, qb=True), frame("R1", 3, 4)]
        with pytest.raises(DataError, match="multiple QB"):
            qb_distance(frames, "R1")

    def test_missing_qb_rejected(self):
        with pytest.raises(DataError, match="no QB"):
            qb_distance([frame("R1", 3, 4)], "R1")

    def test_missing_player_rejected(self):
        with pytest.raises(DataError, match="no frame for player"):
            qb_distance([frame("QB", 0, 0, qb=True)], "R9")


def dists(pairs):
    return {t: float(d) for t, d in pairs}


class TestWinRule:
    def far(self, ts):
        return dists((t, 5.0) for t in ts)

    def test_strictly_closer_wins(self):
        ts = range(0, 11)
        rd = dists((t, 4.9 if t == 6 else 5.5) for t in ts)
        assert rusher_win_25(rd, self.far(ts), 0, (0, 10)) is True

    def test_tie_is_not_a_win(self):
        ts = range(0, 11)
        rd = dists((t, 5.0) for t in ts)
        assert rusher_win_25(rd, self.far(ts), 0, (0, 10)) is False

    def test_horizon_endpoint_included(self):
        # closer only at frame snap+25: still a win
        ts = range(0, 40)
        rd = dists((t, 1.0 if t == WIN_HORIZON_FRAMES else 9.0) for t in ts)
        assert rusher_win_25(rd, self.far(ts), 0, (0, 39)) is True

    def test_frame_after_horizon_ignored(self):
        # closer only at frame snap+26: one frame too late
        ts = range(0, 40)
        rd = dists((t, 1.0 if t == WIN_HORIZON_FRAMES + 1 else 9.0) for t in ts)
        assert rusher_win_25(rd, self.far(ts), 0, (0, 39)) is False

    def test_horizon_counts_from_snap_not_window(self):
        ts = range(0, 60)
        rd = dists((t, 1.0 if t == 30 else 9.0) for t in ts)
        # snap at 10: frame 30 is within 10+25; snap at 0: it is not
        assert rusher_win_25(rd, self.far(ts), 10, (0, 59)) is True
        assert rusher_win_25(rd, self.far(ts), 0, (0, 59)) is False

    def test_window_clipped_to_snap(self):
        # frames before the snap never count even if the window covers them
        ts = range(0, 20)
        rd = dists((t, 1.0 if t < 5 else 9.0) for t in ts)
        assert rusher_win_25(rd, self.far(ts), 5, (0, 19)) is False

    def test_tolerance_widens_required_gap(self):
        ts = range(0, 5)
        rd = dists((t, 4.6) for t in ts)
        assert rusher_win_25(rd, self.far(ts), 0, (0, 4), tolerance=0.0) is True
        assert rusher_win_25(rd, self.far(ts), 0, (0, 4), tolerance=0.3) is True
        assert rusher_win_25(rd, self.far(ts), 0, (0, 4), tolerance=0.4) is False
        assert rusher_win_25(rd, self.far(ts), 0, (0, 4), tolerance=0.5) is False

    def test_disjoint_window_rejected(self):
        with pytest.raises(DataError, match="does not intersect"):
            rusher_win_25({}, {}, 0, (30, 40))

    def test_missing_frame_rejected(self):
        rd = dists([(0, 5.0), (2, 5.0)])
        bd = dists([(0, 5.0), (1, 5.0), (2, 5.0)])
        with pytest.raises(DataError, match="missing frame 1"):
            rusher_win_25(rd, bd, 0, (0, 2))


def eng(rusher, blocker, start, end, *, game="g1", play="p1"):
    return Engagement(game, play, rusher, blocker, start, end)


class TestDoubleTeam:
    def test_two_blockers_overlapping(self):
        assert detect_double_team([eng("R1", "B1", 0, 10), eng("R1", "B2", 5, 15)]) is True

    def test_single_shared_frame_counts(self):
        assert detect_double_team([eng("R1", "B1", 0, 10), eng("R1", "B2", 10, 20)]) is True

    def test_adjacent_windows_do_not_overlap(self):
        assert detect_double_team([eng("R1", "B1", 0, 10), eng("R1", "B2", 11, 20)]) is False

    def test_same_blocker_twice_is_not_a_double(self):
        assert detect_double_team([eng("R1", "B1", 0, 10), eng("R1", "B1", 12, 20)]) is False

    def test_min_overlap_threshold(self):
        pair = [eng("R1", "B1", 0, 10), eng("R1", "B2", 9, 20)]  # 2 shared frames
        assert detect_double_team(pair, min_overlap=2) is True
        assert detect_double_team(pair, min_overlap=3) is False

    def test_empty_is_false(self):
        assert detect_double_team([]) is False

    def test_mixed_rushers_rejected(self):
        with pytest.raises(DataError, match="one rusher"):
            detect_double_team([eng("R1", "B1", 0, 10), eng("R2", "B2", 0, 10)])


class TestDropbackFilter:
    def test_pass_counts(self):
        assert is_dropback(PlayEvents("g", "p", 0, True, False, False)) is True

    def test_sack_counts(self):
        assert is_dropback(PlayEvents("g", "p", 0, False, True, False)) is True

    def test_run_play_does_not(self):
        assert is_dropback(PlayEvents("g", "p", 0, False, False, False)) is False


def hand_play():
    """One game, two plays: a pass dropback and a run to be filtered.

    On p1 (snap frame 2) R1 beats B1 at frame 6 and the QB is hit, while
    R2 is double-teamed by B1 and B2 and never wins.
    """
    frames = []
    for t in range(0, 13):
        frames.append(frame("QB", 0.0, 0.0, qb=True, t=t))
        frames.append(frame("R1", 4.0 if t == 6 else 6.0, 0.0, t=t))
        frames.append(frame("B1", 5.0, 0.0, t=t))
        frames.append(frame("R2", 8.0, 0.0, t=t))
        frames.append(frame("B2", 5.0, 1.0, t=t))
    frames += [
        frame("QB", 0.0, 0.0, qb=True, play="p2", t=0),
        frame("R1", 6.0, 0.0, play="p2", t=0),
        frame("B1", 5.0, 0.0, play="p2", t=0),
    ]
    events = [
        PlayEvents("g1", "p1", 2, True, False, True),
        PlayEvents("g1", "p2", 0, False, False, False),
    ]
    engagements = [
        eng("R1", "B1", 3, 12),
        eng("R2", "B1", 3, 8),
        eng("R2", "B2", 6, 12),
        eng("R1", "B1", 0, 0, play="p2"),
    ]
    return frames, events, engagements, {"g1": 4}


class TestBuildInteractions:
    def test_hand_built_play(self):
        frames, events, engagements, schedule = hand_play()
        table = build_interactions(frames, events, engagements, schedule)
        assert len(table) == 3  # run play filtered out
        assert [r.play_id for r in table] == ["p1", "p1", "p1"]
        assert [r.week for r in table] == [4, 4, 4]
        assert [r.event_game_index for r in table] == [0, 1, 2]
        by_pair = {(r.rusher_id, r.blocker_id): r for r in table}
        r1 = by_pair[("R1", "B1")]
        assert r1.win_target is True
        assert r1.severity is OutcomeClass.HIT  # hit outranks the 2.5 s win
        assert r1.double_team is False
        r2b1 = by_pair[("R2", "B1")]
        r2b2 = by_pair[("R2", "B2")]
        assert r2b1.win_target is False and r2b2.win_target is False
        assert r2b1.severity is OutcomeClass.HIT  # play-level flag reaches every row
        assert r2b1.double_team is True and r2b2.double_team is True

    def test_event_index_orders_by_start_frame_then_ids(self):
        frames, events, engagements, schedule = hand_play()
        table = build_interactions(frames, events, engagements, schedule)
        ordered = [(r.rusher_id, r.blocker_id) for r in table]
        assert ordered == [("R1", "B1"), ("R2", "B1"), ("R2", "B2")]

    def test_window_past_horizon_is_a_loss_not_an_error(self):
        frames, events, engagements, schedule = hand_play()
        engagements = engagements + [eng("R3", "B3", 40, 50)]
        table = build_interactions(frames, events, engagements, schedule)
        row = next(r for r in table if r.rusher_id == "R3")
        assert row.win_target is False
        assert row.severity is OutcomeClass.HIT  # qb_hit still applies

    def test_dangling_engagement_rejected(self):
        frames, events, engagements, schedule = hand_play()
        with pytest.raises(DataError, match="dangling"):
            build_interactions(
                frames, events, engagements + [eng("R1", "B1", 0, 1, play="p9")], schedule
            )

    def test_missing_schedule_entry_rejected(self):
        frames, events, engagements, _ = hand_play()
        with pytest.raises(DataError, match="schedule"):
            build_interactions(frames, events, engagements, {})

    def test_missing_track_rejected(self):
        frames, events, engagements, schedule = hand_play()
        frames = [f for f in frames if f.player_id != "B2"]
        with pytest.raises(DataError, match="missing track"):
            build_interactions(frames, events, engagements, schedule)

    def test_sack_outranks_everything(self):
        frames, events, engagements, schedule = hand_play()
        events = [
            PlayEvents("g1", "p1", 2, True, True, True),
            events[1],
        ]
        table = build_interactions(frames, events, engagements, schedule)
        assert all(r.severity is OutcomeClass.SACK for r in table)

    def test_output_is_canonically_sorted(self):
        frames, events, engagements, schedule = hand_play()
        table = build_interactions(frames, events, engagements, schedule)
        assert table.is_canonically_sorted()

    def test_tolerance_flips_marginal_win(self):
        frames, events, engagements, schedule = hand_play()
        table = build_interactions(frames, events, engagements, schedule, tolerance=2.0)
        r1 = next(r for r in table if r.rusher_id == "R1")
        # R1's best margin is 1.0 yard (4.0 vs 5.0): below the 2.0 gap
        assert r1.win_target is False
        assert r1.severity is OutcomeClass.HIT


class TestValidation:
    def test_negative_frame_index_rejected(self):
        with pytest.raises(DataError):
            Frame("g", "p", -1, "R1", 0.0, 0.0, False)

    def test_negative_snap_rejected(self):
        with pytest.raises(DataError):
            PlayEvents("g", "p", -3, True, False, False)

    def test_reversed_engagement_rejected(self):
        with pytest.raises(DataError):
            Engagement("g", "p", "R1", "B1", 10, 4)


class TestCsvReaders:
    def test_tracking_round_trip(self, tmp_path):
        path = tmp_path / "tracking.csv"
        path.write_text(
            "game_id,play_id,frame_index,player_id,x,y,is_qb\n"
            "g1,p1,0,QB,1.5,2.5,1\n"
            "g1,p1,0,R1,4.5,6.5,0\n"
        )
        frames = read_tracking_csv(path)
        assert len(frames) == 2
        assert frames[0].is_qb is True
        assert frames[1] == Frame("g1", "p1", 0, "R1", 4.5, 6.5, False)

    def test_tracking_bad_header(self, tmp_path):
        path = tmp_path / "tracking.csv"
        path.write_text("game,play\ng1,p1\n")
        with pytest.raises(DataError, match="bad header"):
            read_tracking_csv(path)

    def test_tracking_bad_flag_has_line_number(self, tmp_path):
        path = tmp_path / "tracking.csv"
        path.write_text(
            "game_id,play_id,frame_index,player_id,x,y,is_qb\n"
            "g1,p1,0,QB,1.0,2.0,1\n"
            "g1,p1,0,R1,1.0,2.0,yes\n"
        )
        with pytest.raises(DataError, match=r":3:"):
            read_tracking_csv(path)

    def test_events_round_trip(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(
            "game_id,play_id,snap_frame,has_forward_pass,has_sack,qb_hit\n"
            "g1,p1,3,1,0,1\n"
        )
        (ev,) = read_events_csv(path)
        assert ev == PlayEvents("g1", "p1", 3, True, False, True)

    def test_events_negative_snap_has_line_number(self, tmp_path):
        path = tmp_path / "events.csv"
        path.write_text(
            "game_id,play_id,snap_frame,has_forward_pass,has_sack,qb_hit\n"
            "g1,p1,-2,1,0,0\n"
        )
        with pytest.raises(DataError, match=r":2:.*snap_frame"):
            read_events_csv(path)

    def test_engagements_round_trip(self, tmp_path):
        path = tmp_path / "engagements.csv"
        path.write_text(
            "game_id,play_id,rusher_id,blocker_id,start_frame,end_frame\n"
            "g1,p1,R1,B1,2,9\n"
        )
        (e,) = read_engagements_csv(path)
        assert e == Engagement("g1", "p1", "R1", "B1", 2, 9)

    def test_engagements_reversed_window_has_line_number(self, tmp_path):
        path = tmp_path / "engagements.csv"
        path.write_text(
            "game_id,play_id,rusher_id,blocker_id,start_frame,end_frame\n"
            "g1,p1,R1,B1,9,2\n"
        )
        with pytest.raises(DataError, match=r":2:"):
            read_engagements_csv(path)

    def test_schedule_round_trip(self, tmp_path):
        path = tmp_path / "schedule.csv"
        path.write_text("game_id,week\ng1,1\ng2,14\n")
        assert read_schedule_csv(path) == {"g1": 1, "g2": 14}

    def test_schedule_duplicate_game_rejected(self, tmp_path):
        path = tmp_path / "schedule.csv"
        path.write_text("game_id,week\ng1,1\ng1,2\n")
        with pytest.raises(DataError, match="duplicate"):
            read_schedule_csv(path)

    def test_schedule_week_below_one_rejected(self, tmp_path):
        path = tmp_path / "schedule.csv"
        path.write_text("game_id,week\ng1,0\n")
        with pytest.raises(DataError, match="week"):
            read_schedule_csv(path)

    def test_field_count_checked(self, tmp_path):
        path = tmp_path / "engagements.csv"
        path.write_text(
            "game_id,play_id,rusher_id,blocker_id,start_frame,end_frame\n"
            "g1,p1,R1,B1,2\n"
        )
        with pytest.raises(DataError, match="fields"):
            read_engagements_csv(path)
