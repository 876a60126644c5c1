import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from ingest.helpers import Button, MouseEvent, Trace, clean_trace
from utils.helpers import FrameEmptyError, ShapeMismatchError
from .helpers import *


def _trace(points, session='001-pb-001', buttons=None):
    events = []
    for index, (t, x, y) in enumerate(points):
        button = None if buttons is None else buttons.get(index)
        duration = None if button is None else 0.1
        events.append(MouseEvent(session, t, x, y, button, duration))
    return Trace(session, tuple(events))


HAND_POINTS = [(0.0, 0, 0), (0.1, 3, 4), (0.2, 3, 4), (0.3, 3, 4), (0.4, 6, 8)]


def _random_points(seed, count=80):
    rng = np.random.default_rng(seed)
    t = np.cumsum(rng.uniform(0.005, 0.02, count)) + 1000.0
    xy = np.abs(np.cumsum(rng.integers(-4, 5, (count, 2)), axis=0)) + 50
    return [(float(t[i]), int(xy[i, 0]), int(xy[i, 1])) for i in range(count)]


#-------------------------------------------------------------------------------

def test_hand_computed_kinematics():
    records = derive_kinematics(_trace(HAND_POINTS))
    assert len(records) == 4

    first = records[0]
    assert first.movement_distance == 5.0
    assert first.velocity == pytest.approx(50.0, rel=1e-12)
    assert first.angle == pytest.approx(math.atan2(4, 3), abs=1e-9)
    assert first.angle == pytest.approx(0.92730, abs=1e-5)

    for record, expected_stop in zip(records[1:3], (0.1, 0.2)):
        assert record.movement_distance == 0.0
        assert record.is_stop
        assert record.stop_duration == pytest.approx(expected_stop, abs=1e-12)
        assert record.angle == first.angle

    last = records[3]
    assert last.movement_distance == 5.0
    assert last.direction_change == 0.0
    assert last.stop_duration == 0.0


def test_coincident_positions_are_a_stop():
    records = derive_kinematics(_trace([(0.0, 7, 7), (0.1, 7, 7)]))
    assert records[0].movement_distance == 0.0
    assert records[0].velocity == 0.0
    assert records[0].is_stop
    assert records[0].angle == 0.0


def test_constant_velocity_has_no_higher_derivatives():
    points = [(0.01 * i, 10 + 2 * i, 20 + i) for i in range(12)]
    records = derive_kinematics(_trace(points))
    for record in records[2:]:
        assert record.acceleration == pytest.approx(0.0, abs=1e-6)
        assert record.jerk == pytest.approx(0.0, abs=1e-3)
        assert record.direction_change == pytest.approx(0.0, abs=1e-12)


def test_zero_dt_rows_are_skipped():
    points = [(0.0, 0, 0), (0.1, 1, 0), (0.1, 5, 5), (0.2, 2, 0), (0.3, 3, 0)]
    records = derive_kinematics(_trace(points))
    assert [record.t for record in records] == [0.1, 0.2, 0.3]
    assert all(record.dt > 0 for record in records)


def test_button_code_carried_onto_rows():
    records = derive_kinematics(_trace(HAND_POINTS, buttons={2: Button.RIGHT}))
    assert [record.button_code for record in records] == [0, 2, 0, 0]


def test_angle_range_and_direction_change_bounds():
    records = derive_kinematics(_trace([(0.0, 10, 10), (0.1, 5, 10), (0.2, 10, 10), (0.3, 10, 5), (0.4, 10, 10)]))
    assert records[0].angle == math.pi
    for record in records:
        assert -math.pi < record.angle <= math.pi
        assert abs(record.direction_change) <= math.pi


def test_kinematic_row_count_is_events_minus_one():
    points = _random_points(1)
    assert len(derive_kinematics(_trace(points))) == len(points) - 1


#-------------------------------------------------------------------------------

def test_five_event_trace_gives_one_row():
    frame = build_frame(_trace(HAND_POINTS))
    assert frame.rows.shape == (1, FEATURE_WIDTH)
    assert frame.timestamps.tolist() == [0.3]
    assert frame.column('stop_duration')[0] == pytest.approx(0.2, abs=1e-12)


def test_hundred_event_trace_gives_ninety_six_rows():
    points = [(0.01 * i, i % 37, (3 * i) % 41) for i in range(100)]
    frame = build_frame(_trace(points))
    assert frame.rows.shape == (96, 9)


def test_velocity_is_not_a_selected_feature():
    assert 'velocity' not in FEATURE_COLUMNS
    assert 'is_stop' not in FEATURE_COLUMNS
    assert FEATURE_COLUMNS == ('x', 'y', 'stop_duration', 'jerk', 'direction_change', 'movement_distance', 'acceleration', 'button_code', 'angle')


def test_too_few_rows_is_frame_empty():
    with pytest.raises(FrameEmptyError):
        build_frame(_trace(HAND_POINTS[:4]))


def test_stationary_rows_and_stop_runs():
    points = [(0.1 * i, p, p) for i, p in enumerate([0, 1, 1, 1, 2, 3, 3, 4, 4, 4, 4, 5, 6, 7])]
    frame = build_frame(_trace(points))
    distance = frame.column('movement_distance')
    stop = frame.column('stop_duration')
    for i in range(len(frame)):
        if distance[i] == 0:
            assert stop[i] > 0
            if i > 0 and distance[i - 1] == 0:
                assert stop[i] >= stop[i - 1]
        else:
            assert stop[i] == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), dx=st.integers(0, 500), dy=st.integers(0, 500), shift=st.floats(0, 1e6))
def test_translation_and_time_shift_invariance(seed, dx, dy, shift):
    points = _random_points(seed, 40)
    base = build_frame(_trace(points))
    moved = build_frame(_trace([(t, x + dx, y + dy) for t, x, y in points]))

    invariant = [FEATURE_COLUMNS.index(name) for name in ('stop_duration', 'jerk', 'direction_change', 'movement_distance', 'acceleration', 'angle')]
    assert np.array_equal(base.rows[:, invariant], moved.rows[:, invariant])
    assert np.array_equal(moved.column('x'), base.column('x') + dx)

    # Shifting time by a constant perturbs dt only by rounding
    shifted = build_frame(_trace([(t + shift, x, y) for t, x, y in points]))
    distance = FEATURE_COLUMNS.index('movement_distance')
    assert np.array_equal(shifted.rows[:, distance], base.rows[:, distance])
    assert np.allclose(shifted.column('stop_duration'), base.column('stop_duration'), rtol=1e-6, atol=1e-6)


def test_export_frame_csv_has_fixed_header(tmp_path):
    frame = build_frame(_trace(_random_points(5)))
    path = export_frame_csv(frame, tmp_path / 'frame.csv')
    header = path.read_text(encoding='utf-8').splitlines()[0]
    assert header == ','.join(FEATURE_COLUMNS)
    assert len(path.read_text(encoding='utf-8').splitlines()) == len(frame) + 1


#-------------------------------------------------------------------------------

def test_fit_single_row():
    rows = np.arange(9, dtype=float).reshape(1, 9)
    stats = fit_normalizer(rows)
    assert np.array_equal(stats.mean, rows[0])
    assert np.array_equal(stats.std, np.zeros(9))


def test_fit_hand_arithmetic():
    rows = np.zeros((2, 9))
    rows[1, 0] = 2.0
    stats = fit_normalizer(rows)
    assert stats.mean[0] == 1.0
    assert stats.std[0] == 1.0


def test_zscored_data_has_unit_statistics():
    rows = np.random.default_rng(0).normal(5.0, 3.0, (500, 9))
    rows[:, 7] = 1.0
    stats = fit_normalizer(rows)
    again = fit_normalizer(normalize_rows(rows, stats))
    assert np.all(np.abs(again.mean) < 1e-9)
    nonconstant = [i for i in range(9) if i != 7]
    assert np.all(np.abs(again.std[nonconstant] - 1.0) < 1e-9)
    assert again.std[7] == 0.0


def test_identity_and_constant_component():
    frame = build_frame(_trace(_random_points(2)))
    identity = NormStats(mean=np.zeros(9), std=np.ones(9))
    assert np.array_equal(apply_normalizer(frame, identity).rows, frame.rows)

    stats = fit_normalizer(frame)
    normalized = apply_normalizer(frame, stats)
    assert np.array_equal(normalized.column('button_code'), np.zeros(len(frame)))


def test_inexact_constant_component_normalizes_to_zero():
    rows = np.random.default_rng(1).normal(0.0, 1.0, (37, 9))
    rows[:, 3] = 0.1
    stats = fit_normalizer(rows)
    assert stats.std[3] == 0.0
    assert np.array_equal(normalize_rows(rows, stats)[:, 3], np.zeros(37))


def test_straight_line_angle_normalizes_to_zero():
    frame = build_frame(_trace([(0.01 * i, 10 + 2 * i, 20 + i) for i in range(100)]))
    assert np.unique(frame.column('angle')).size == 1
    normalized = apply_normalizer(frame, fit_normalizer(frame))
    assert np.array_equal(normalized.column('angle'), np.zeros(len(frame)))


def test_stats_fit_on_train_leave_shifted_test_off_center():
    rng = np.random.default_rng(4)
    train = rng.normal(0.0, 1.0, (300, 9))
    test = rng.normal(3.0, 1.0, (300, 9))
    normalized = normalize_rows(test, fit_normalizer(train))
    assert np.all(np.abs(normalized.mean(axis=0)) > 1.0)


def test_width_mismatch_and_empty_fit():
    with pytest.raises(ShapeMismatchError):
        normalize_rows(np.zeros((3, 8)), NormStats(mean=np.zeros(9), std=np.ones(9)))
    with pytest.raises(FrameEmptyError):
        fit_normalizer(np.zeros((0, 9)))
    stats = NormStats(mean=np.arange(9.0), std=np.ones(9))
    restored = NormStats.from_dict(stats.to_dict())
    assert np.array_equal(restored.mean, stats.mean)
    assert np.array_equal(restored.std, stats.std)


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('seed', range(5))
def test_feature_stream_matches_batch_frame_on_every_prefix(seed):
    points = _random_points(seed, 60)
    points[10] = (points[9][0], points[10][1], points[10][2])
    trace = clean_trace(_trace(points).events)
    stream = FeatureStream()
    rows = []
    for count, event in enumerate(trace.events, start=1):
        emitted = stream.push(event)
        if emitted is not None:
            rows.append(emitted)
        if count >= 5:
            prefix = Trace(trace.user_session_id, trace.events[:count])
            try:
                frame = build_frame(prefix)
            except FrameEmptyError:
                assert rows == []
                continue
            assert np.array_equal(np.array([row for _, row in rows]), frame.rows)
            assert [t for t, _ in rows] == frame.timestamps.tolist()
