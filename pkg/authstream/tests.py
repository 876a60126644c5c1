import json
import numpy as np
import pytest
from pydantic import ValidationError
from features.helpers import FEATURE_WIDTH, NormStats, build_frame, fit_normalizer, normalize_rows
from forest.helpers import TreeConfig, fit_forest
from ingest.helpers import MouseEvent, Trace
from rnn.helpers import RnnConfig, RnnModel, init_params
from synthgen.helpers import GenSpec, generate_trace, sample_profile
from utils.helpers import MixedSessionError, OutOfOrderEventError, ShapeMismatchError
from windows.helpers import label_windows, make_user_windows, window_count
from .helpers import *


class ScriptedScorer:
    kind = 'scripted'
    input_width = FEATURE_WIDTH

    def __init__(self, scores):
        self.scores = list(scores)
        self.calls = 0

    def score_windows(self, X):
        value = self.scores[min(self.calls, len(self.scores) - 1)]
        self.calls += 1
        return np.full(np.asarray(X).shape[0], value)


IDENTITY = NormStats(mean=np.zeros(FEATURE_WIDTH), std=np.ones(FEATURE_WIDTH))


def _walk(count, session='001-pb-001', start=100.0):
    rng = np.random.default_rng(count)
    xy = np.abs(np.cumsum(rng.integers(-5, 6, (count, 2)), axis=0)) + 200
    return Trace(session, tuple(MouseEvent(session, start + 0.01 * i, int(xy[i, 0]), int(xy[i, 1])) for i in range(count)))


def _push_all(state, trace):
    return [update for update in (push_event(state, event) for event in trace.events) if update is not None]


def _rnn(seed):
    config = RnnConfig(hidden_units=4, seed=seed)
    return RnnModel(config=config, params=init_params('gru', FEATURE_WIDTH, 4, seed))


#-------------------------------------------------------------------------------

def test_policy_defaults_and_invariant():
    policy = SessionPolicy()
    assert (policy.window, policy.stride, policy.alpha) == (40, 10, 0.3)
    assert (policy.intruder_threshold, policy.recovery_threshold) == (0.7, 0.5)
    with pytest.raises(ValidationError):
        SessionPolicy(recovery_threshold=0.8, intruder_threshold=0.7)
    with pytest.raises(ValidationError):
        SessionPolicy(alpha=0.0)
    with pytest.raises(ValidationError):
        SessionPolicy(stride=0)


@pytest.mark.parametrize('current, smoothed, expected', [
    (Decision.WARMING_UP, 0.0, Decision.AUTHENTIC),
    (Decision.AUTHENTIC, 0.6, Decision.SUSPICIOUS),
    (Decision.AUTHENTIC, 0.7, Decision.INTRUDER),
    (Decision.INTRUDER, 0.6, Decision.INTRUDER),
    (Decision.INTRUDER, 0.5, Decision.AUTHENTIC),
    (Decision.SUSPICIOUS, 0.69, Decision.SUSPICIOUS),
])
def test_hysteresis_automaton(current, smoothed, expected):
    assert next_decision(SessionPolicy(), current, smoothed) == expected


#-------------------------------------------------------------------------------

def test_fresh_session():
    state = new_session(ScriptedScorer([0.0]), IDENTITY)
    assert state.events_consumed == 0
    assert state.decision == Decision.WARMING_UP
    assert state.smoothed is None


def test_sessions_are_independent():
    model = ScriptedScorer([0.0])
    first = new_session(model, IDENTITY)
    second = new_session(model, IDENTITY)
    _push_all(first, _walk(60))
    assert first.events_consumed == 60
    assert second.events_consumed == 0
    assert second.decision == Decision.WARMING_UP


def test_width_mismatch_is_rejected():
    with pytest.raises(ShapeMismatchError):
        new_session(ScriptedScorer([0.0]), NormStats(mean=np.zeros(4), std=np.ones(4)))
    forest = fit_forest(TreeConfig(n_trees=2), np.random.default_rng(0).random((10, 12)), np.arange(10) % 2)
    with pytest.raises(ShapeMismatchError):
        new_session(forest, IDENTITY)


def test_warm_up_then_first_decision():
    state = new_session(ScriptedScorer([0.0]), IDENTITY)
    trace = _walk(44)
    assert _push_all(state, Trace(trace.user_session_id, trace.events[:43])) == []
    assert state.decision == Decision.WARMING_UP
    update = push_event(state, trace.events[43])
    assert update is not None
    assert update.rows_seen == 40
    assert update.smoothed == 0.0
    assert update.decision == Decision.AUTHENTIC
    assert update.previous == Decision.WARMING_UP


def test_ema_arithmetic_and_intruder_transition():
    state = new_session(ScriptedScorer([0.9, 0.9]), IDENTITY)
    updates = _push_all(state, _walk(54))
    assert [update.smoothed for update in updates] == pytest.approx([0.9, 0.9])
    assert updates[0].decision == Decision.INTRUDER


def test_recovery_needs_the_lower_threshold():
    # 0.9, then 0.7 * 0.9, then 0.7 * 0.63
    state = new_session(ScriptedScorer([0.9, 0.0, 0.0]), IDENTITY)
    updates = _push_all(state, _walk(64))
    assert [update.decision for update in updates] == [Decision.INTRUDER, Decision.INTRUDER, Decision.AUTHENTIC]
    assert [update.smoothed for update in updates] == pytest.approx([0.9, 0.63, 0.441])


def test_update_count_follows_the_stride():
    policy = SessionPolicy(stride=7)
    for count in (44, 50, 51, 97):
        state = new_session(ScriptedScorer([0.1]), IDENTITY, policy)
        updates = _push_all(state, _walk(count))
        rows = count - 4
        assert len(updates) == window_count(rows, 40, 7)


def test_smoothed_score_stays_in_the_hull():
    scores = np.random.default_rng(5).random(12)
    state = new_session(ScriptedScorer(scores), IDENTITY)
    updates = _push_all(state, _walk(154))
    observed = scores[:len(updates)]
    assert all(observed.min() - 1e-12 <= update.smoothed <= observed.max() + 1e-12 for update in updates)


def test_rejected_events_leave_the_state_unchanged():
    state = new_session(ScriptedScorer([0.2]), IDENTITY)
    trace = _walk(50)
    _push_all(state, Trace(trace.user_session_id, trace.events[:45]))
    before = (state.events_consumed, state.rows_seen, state.smoothed, state.decision, state.last_timestamp)

    with pytest.raises(OutOfOrderEventError):
        push_event(state, MouseEvent(trace.user_session_id, trace.events[10].timestamp, 5, 5))
    with pytest.raises(MixedSessionError):
        push_event(state, MouseEvent('002-pb-001', trace.events[45].timestamp, 5, 5))
    assert (state.events_consumed, state.rows_seen, state.smoothed, state.decision, state.last_timestamp) == before

    _push_all(state, Trace(trace.user_session_id, trace.events[45:]))
    assert state.events_consumed == 50


def test_update_serializes_to_json():
    state = new_session(ScriptedScorer([0.3]), IDENTITY)
    update = _push_all(state, _walk(44))[0]
    payload = json.loads(json.dumps(update.to_dict()))
    assert payload['decision'] == 'authentic'
    assert payload['previous'] == 'warming_up'
    assert payload['sequence'] == 1


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('seed', range(10))
def test_stream_scores_equal_offline_scores(seed):
    trace = generate_trace(sample_profile(seed, 'low', '001'), GenSpec(mode='low', duration=3.0, seed=seed))
    model = _rnn(seed)
    norm_stats = fit_normalizer(build_frame(trace))
    policy = SessionPolicy()

    timeline = replay(model, norm_stats, policy, trace)
    offline = offline_window_scores(model, norm_stats, policy, trace)
    assert len(timeline) == len(offline) > 0
    assert np.array_equal(np.array([update.score for update in timeline]), offline)
    assert replay(model, norm_stats, policy, trace) == timeline


def test_stream_scores_equal_offline_scores_for_a_forest():
    trace = generate_trace(sample_profile(1, 'high', '002'), GenSpec(mode='high', duration=3.0, seed=1))
    frame = build_frame(trace)
    norm_stats = fit_normalizer(frame)
    policy = SessionPolicy(stride=5)
    X = normalize_rows(frame.rows[:200], norm_stats).reshape(5, -1)
    forest = fit_forest(TreeConfig(n_trees=5, seed=2), X, np.array([0, 1, 0, 1, 1]))
    timeline = replay(forest, norm_stats, policy, trace)
    assert np.array_equal(np.array([update.score for update in timeline]), offline_window_scores(forest, norm_stats, policy, trace))


#-------------------------------------------------------------------------------

@pytest.fixture(scope='module')
def trained_forest():
    users = ('001', '002', '003')
    frames = {
        user: [build_frame(generate_trace(sample_profile(11, 'low', user), GenSpec(mode='low', duration=90.0, seed=1)))]
        for user in users
    }
    labeled = label_windows(make_user_windows(frames), '001')
    norm_stats = fit_normalizer(labeled.tensor())
    X = normalize_rows(labeled.tensor(), norm_stats).reshape(len(labeled), -1)
    config = TreeConfig(n_trees=25, class_weighting='balanced', seed=3)
    return fit_forest(config, X, labeled.labels), norm_stats


def _held_out(user):
    return generate_trace(sample_profile(11, 'low', user), GenSpec(mode='low', duration=60.0, seed=2, session=2))


def test_replay_of_the_target_user_ends_authentic(trained_forest):
    forest, norm_stats = trained_forest
    timeline = replay(forest, norm_stats, SessionPolicy(alpha=0.05), _held_out('001'))
    assert timeline[-1].decision == Decision.AUTHENTIC


def test_replay_of_an_impostor_reaches_intruder(trained_forest):
    forest, norm_stats = trained_forest
    timeline = replay(forest, norm_stats, SessionPolicy(), _held_out('002'))
    assert any(update.decision == Decision.INTRUDER for update in timeline)
