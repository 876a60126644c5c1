import math
import numpy as np
import pytest
from pydantic import ValidationError
from features.helpers import FEATURE_COLUMNS, build_frame
from ingest.helpers import Button, serialize_events
from utils.helpers import UsageError
from .helpers import *


def _positions(trace):
    return np.array([(event.x, event.y) for event in trace.events], dtype=np.float64)


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('mode', ['low', 'high'])
def test_profile_is_deterministic(mode):
    assert sample_profile(5, mode, '001') == sample_profile(5, mode, '001')


def test_profiles_differ_across_seeds():
    for seed in range(100):
        assert sample_profile(seed, 'low', '001') != sample_profile(seed + 1000, 'low', '001')


def test_profile_mode_contract():
    for seed in range(20):
        high = sample_profile(seed, 'high', '002')
        low = sample_profile(seed, 'low', '002')
        assert high.focal_pull > 0
        assert low.focal_pull == 0
        assert high.base_speed > low.base_speed
        assert high.pause_prob < low.pause_prob


def test_profile_rejects_out_of_range_values():
    values = sample_profile(1, 'low').model_dump()
    with pytest.raises(ValidationError):
        UserProfile(**{**values, 'pause_prob': 1.5})
    with pytest.raises(ValidationError):
        UserProfile(**{**values, 'base_speed': float('inf')})


#-------------------------------------------------------------------------------

def test_one_second_trace_is_ordered_and_sized():
    trace = generate_trace(sample_profile(0, 'low'), GenSpec(mode='low', duration=1.0, interval=0.01))
    assert len(trace) == 100
    timestamps = [event.timestamp for event in trace.events]
    assert all(b > a for a, b in zip(timestamps, timestamps[1:]))
    assert min(b - a for a, b in zip(timestamps, timestamps[1:])) >= 0.01 - 1e-6


@pytest.mark.parametrize('mode', ['low', 'high'])
def test_same_inputs_give_byte_identical_traces(mode):
    profile = sample_profile(3, mode, '004')
    spec = GenSpec(mode=mode, duration=20.0, seed=9)
    assert serialize_events(generate_trace(profile, spec).events) == serialize_events(generate_trace(profile, spec).events)


@pytest.mark.parametrize('mode', ['low', 'high'])
def test_coordinates_stay_on_screen(mode):
    spec = GenSpec(mode=mode, duration=60.0, width=640, height=480, seed=2)
    positions = _positions(generate_trace(sample_profile(8, mode), spec))
    assert positions[:, 0].min() >= 0 and positions[:, 0].max() < 640
    assert positions[:, 1].min() >= 0 and positions[:, 1].max() < 480


def test_clicks_are_left_presses_with_bounded_duration():
    trace = generate_trace(sample_profile(1, 'high'), GenSpec(mode='high', duration=60.0, seed=1))
    presses = [event for event in trace.events if event.button is not None]
    assert presses
    assert all(event.button == Button.LEFT for event in presses)
    assert all(0.05 <= event.press_duration <= 0.2 for event in presses)


def test_high_mode_gathers_around_the_focal_point():
    for seed in range(10):
        high = sample_profile(seed, 'high', '001')
        low = sample_profile(seed, 'low', '001')
        focal = np.array([high.focal_x, high.focal_y])
        high_positions = _positions(generate_trace(high, GenSpec(mode='high', duration=30.0, seed=seed)))
        low_positions = _positions(generate_trace(low, GenSpec(mode='low', duration=30.0, seed=seed)))
        high_spread = np.linalg.norm(high_positions - focal, axis=1).mean()
        low_spread = np.linalg.norm(low_positions - focal, axis=1).mean()
        assert high_spread < low_spread


@pytest.mark.parametrize('mode', ['low', 'high'])
def test_pause_rows_track_the_pause_budget(mode):
    profile = sample_profile(21, mode, '003')
    spec = GenSpec(mode=mode, duration=900.0, seed=4)
    positions = _positions(generate_trace(profile, spec))
    stationary = np.mean(np.all(positions[1:] == positions[:-1], axis=1))
    budget = pause_budget(profile, spec)
    assert 0.5 * budget <= stationary <= 1.5 * budget


def test_degenerate_bounds_and_mode_mismatch():
    with pytest.raises(UsageError):
        generate_trace(sample_profile(0, 'low'), GenSpec(mode='low', duration=1.0, width=0))
    with pytest.raises(UsageError):
        generate_trace(sample_profile(0, 'low'), GenSpec(mode='high', duration=1.0))


def test_min_jerk_profile_endpoints():
    assert min_jerk(0.0) == 0.0
    assert min_jerk(1.0) == 1.0
    assert min_jerk(0.5) == pytest.approx(0.5)


def test_distinct_users_have_distinct_feature_means():
    frames = [build_frame(generate_trace(sample_profile(0, 'low', user), GenSpec(mode='low', duration=60.0, seed=1))) for user in ('001', '002')]
    first, second = (frame.rows.mean(axis=0) for frame in frames)
    moving = [FEATURE_COLUMNS.index(name) for name in ('movement_distance', 'stop_duration', 'acceleration')]
    relative = np.abs(first[moving] - second[moving]) / np.maximum(np.abs(first[moving]), np.abs(second[moving]))
    assert relative.max() > 0.05


#-------------------------------------------------------------------------------

def test_corpus_layout_counts():
    layout = corpus_layout()
    assert len(layout) == 19
    assert sum('low' in modes for modes in layout.values()) == 15
    assert sum('high' in modes for modes in layout.values()) == 15
    assert sum(len(modes) == 2 for modes in layout.values()) == 11
    with pytest.raises(UsageError):
        corpus_layout(5, 6)


def test_corpus_scenarios_and_session_ids():
    corpus = build_corpus(seed=3, duration=2.0, users_per_game=3, shared_users=2)
    assert sorted(corpus) == ['001', '002', '003', '004']
    low = scenario_traces(corpus, 'low')
    high = scenario_traces(corpus, 'high')
    both = scenario_traces(corpus, 'both')
    assert sorted(low) == ['001', '002', '004']
    assert sorted(high) == ['001', '002', '003']
    assert [trace.user_session_id for trace in both['001']] == ['001-pb-001', '001-tf2-001']
    with pytest.raises(UsageError):
        scenario_traces(corpus, 'medium')


def test_corpus_write_and_load(tmp_path):
    corpus = build_corpus(seed=5, duration=1.0, users_per_game=2, shared_users=1)
    paths = write_corpus(corpus, tmp_path / 'corpus')
    assert len(paths) == 4
    loaded = load_corpus(tmp_path / 'corpus')
    assert sorted(loaded) == sorted(corpus)
    for user_id, modes in corpus.items():
        for mode, traces in modes.items():
            assert [trace.events for trace in loaded[user_id][mode]] == [trace.events for trace in traces]


def test_pause_budget_is_a_fraction():
    for mode in ('low', 'high'):
        profile = sample_profile(2, mode)
        budget = pause_budget(profile, GenSpec(mode=mode))
        assert 0.0 < budget < 1.0
        assert math.isfinite(budget)
