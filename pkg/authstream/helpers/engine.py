from collections import deque
from dataclasses import dataclass
import logging
import numpy as np
from features.helpers import FEATURE_WIDTH, FeatureStream, build_frame, normalize_rows
from utils.helpers import MixedSessionError, OutOfOrderEventError, ShapeMismatchError
from windows.helpers import make_windows
from .policy import Decision, SessionPolicy, next_decision

logger = logging.getLogger('mousetrust')
decision_logger = logging.getLogger('auth_decisions')

__all__ = ['DecisionUpdate', 'SessionState', 'new_session', 'offline_window_scores', 'push_event', 'replay']


@dataclass(frozen=True)
class DecisionUpdate:
    sequence: int # 1-based count of scored windows
    user_session_id: str
    timestamp: float # timestamp of the newest feature row in the window
    events_consumed: int
    rows_seen: int
    score: float
    smoothed: float
    decision: Decision
    previous: Decision

    @property
    def changed(self):
        return self.decision != self.previous

    def to_dict(self):
        return {
            'sequence': self.sequence,
            'user_session_id': self.user_session_id,
            'timestamp': self.timestamp,
            'events_consumed': self.events_consumed,
            'rows_seen': self.rows_seen,
            'score': self.score,
            'smoothed': self.smoothed,
            'decision': self.decision.value,
            'previous': self.previous.value,
        }


# Mutable, single-owner state of one monitored session.
# The raw-event memory lives inside the FeatureStream (previous event and derivatives only);
# the feature buffer holds at most one window of rows.
class SessionState:
    def __init__(self, model, norm_stats, policy):
        self.model = model
        self.norm_stats = norm_stats
        self.policy = policy
        self.stream = FeatureStream()
        self.rows = deque(maxlen=policy.window)
        self.row_timestamps = deque(maxlen=policy.window)
        self.rows_seen = 0
        self.events_consumed = 0
        self.smoothed = None
        self.decision = Decision.WARMING_UP
        self.updates = 0
        self.user_session_id = None
        self.last_timestamp = None

    def __repr__(self):
        return f'SessionState(session={self.user_session_id!r}, events={self.events_consumed}, decision={self.decision.value}, smoothed={self.smoothed})'

    def _due(self):
        excess = self.rows_seen - self.policy.window
        return excess >= 0 and excess % self.policy.stride == 0

    def _score_latest(self):
        window = normalize_rows(np.array(self.rows, dtype=np.float64), self.norm_stats)
        return float(self.model.score_windows(window[np.newaxis])[0])


# Tree models read flattened windows, recurrent models read one feature row per step
def _expected_width(model, policy):
    if model.kind in ('dt', 'rf'):
        return FEATURE_WIDTH * policy.window
    return FEATURE_WIDTH


def new_session(model, norm_stats, policy=None):
    policy = policy or SessionPolicy()
    if norm_stats.width != FEATURE_WIDTH:
        raise ShapeMismatchError(f'normalization statistics have {norm_stats.width} components, feature rows have {FEATURE_WIDTH}')
    expected = _expected_width(model, policy)
    if model.input_width != expected:
        raise ShapeMismatchError(f'{model.kind} model expects width {model.input_width}, a {policy.window}-row window gives {expected}')
    return SessionState(model, norm_stats, policy)


# Folds one event into the session. Returns a DecisionUpdate when a new window was scored, else None.
# A rejected event leaves the state untouched.
def push_event(state, event):
    # Step 1: validate before mutating anything
    if state.user_session_id is not None and event.user_session_id != state.user_session_id:
        raise MixedSessionError(f'event for session {event.user_session_id!r} pushed into session {state.user_session_id!r}')
    if state.last_timestamp is not None and event.timestamp < state.last_timestamp:
        raise OutOfOrderEventError(f'timestamp {event.timestamp!r} is earlier than the previous {state.last_timestamp!r}')

    # Step 2: extend kinematics and features
    emitted = state.stream.push(event)
    state.user_session_id = event.user_session_id
    state.last_timestamp = event.timestamp
    state.events_consumed += 1
    if emitted is None:
        return None
    timestamp, row = emitted
    state.rows.append(row)
    state.row_timestamps.append(timestamp)
    state.rows_seen += 1
    if not state._due():
        return None

    # Step 3: score the latest window and smooth
    score = state._score_latest()
    alpha = state.policy.alpha
    state.smoothed = score if state.smoothed is None else alpha * score + (1.0 - alpha) * state.smoothed
    previous = state.decision
    state.decision = next_decision(state.policy, previous, state.smoothed)
    state.updates += 1

    update = DecisionUpdate(
        sequence=state.updates,
        user_session_id=state.user_session_id,
        timestamp=timestamp,
        events_consumed=state.events_consumed,
        rows_seen=state.rows_seen,
        score=score,
        smoothed=state.smoothed,
        decision=state.decision,
        previous=previous,
    )
    if update.changed:
        decision_logger.info(f'session { update.user_session_id } { previous.value } -> { update.decision.value } at t={ timestamp } smoothed is: { update.smoothed:.4f}')
    logger.debug(f'running push_event() ... update { update.sequence } score is: { score }')
    return update


def replay(model, norm_stats, policy, trace):
    state = new_session(model, norm_stats, policy)
    timeline = []
    for event in trace.events:
        update = push_event(state, event)
        if update is not None:
            timeline.append(update)
    logger.debug(f'running replay() ... session { trace.user_session_id } updates: { len(timeline) } final decision: { state.decision.value }')
    return timeline


# Batch pipeline counterpart of replay: build the frame, cut windows at the policy stride,
# and score each window as a batch of one.
def offline_window_scores(model, norm_stats, policy, trace):
    frame = build_frame(trace)
    windows = make_windows(frame, length=policy.window, stride=policy.stride)
    scores = [float(model.score_windows(normalize_rows(window.rows, norm_stats)[np.newaxis])[0]) for window in windows]
    return np.array(scores, dtype=np.float64)
