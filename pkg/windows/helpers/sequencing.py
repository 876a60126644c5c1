from dataclasses import dataclass, field
import logging
import numpy as np
import pandas as pd
from pathlib import Path
from features.helpers import FEATURE_COLUMNS, FEATURE_WIDTH
from ingest.helpers import split_session_id
from utils.helpers import UnknownTargetError, UsageError

logger = logging.getLogger('mousetrust')

__all__ = ['AUTHENTIC', 'DEFAULT_WINDOW', 'INTRUDER', 'LabeledSet', 'Window', 'export_labeled_csv', 'flatten_window', 'label_windows', 'make_user_windows', 'make_windows', 'window_count']


DEFAULT_WINDOW = 40

AUTHENTIC = 0
INTRUDER = 1


@dataclass(frozen=True, eq=False)
class Window:
    rows: np.ndarray = field(repr=False)
    user_session_id: str
    start: int

    @property
    def length(self):
        return self.rows.shape[0]

    @property
    def user_id(self):
        return split_session_id(self.user_session_id)['user']


@dataclass(frozen=True, eq=False)
class LabeledSet:
    windows: tuple
    labels: np.ndarray = field(repr=False)
    users: tuple
    target_user: str

    def __post_init__(self):
        if len(self.windows) != self.labels.shape[0] or len(self.windows) != len(self.users):
            raise UsageError(f'{len(self.windows)} windows, {self.labels.shape[0]} labels, {len(self.users)} user tags')
        self.labels.flags.writeable = False

    def __len__(self):
        return len(self.windows)

    def class_counts(self):
        counts = np.bincount(self.labels, minlength=2)
        return {AUTHENTIC: int(counts[0]), INTRUDER: int(counts[1])}

    def tensor(self):
        return np.stack([window.rows for window in self.windows]).astype(np.float64)

    def flat(self):
        return np.stack([flatten_window(window) for window in self.windows])

    @property
    def sessions(self):
        return tuple(window.user_session_id for window in self.windows)


def window_count(rows, length=DEFAULT_WINDOW, stride=DEFAULT_WINDOW):
    if rows < length:
        return 0
    return (rows - length) // stride + 1


# Windows start at 0, stride, 2*stride, ...; a trailing remainder shorter than length is dropped
def make_windows(frame, length=DEFAULT_WINDOW, stride=DEFAULT_WINDOW):
    if length < 1 or stride < 1:
        raise UsageError(f'window length and stride must be >= 1, got length={length} stride={stride}')

    count = window_count(len(frame), length, stride)
    windows = [
        Window(rows=frame.rows[start:start + length], user_session_id=frame.user_session_id, start=start)
        for start in range(0, count * stride, stride)
    ]
    logger.debug(f'running make_windows() ... session { frame.user_session_id } rows: { len(frame) } windows: { len(windows) }')
    return windows


# Windows per user from their session frames. Each session is windowed on its own, so no window spans two sessions.
def make_user_windows(frames_by_user, length=DEFAULT_WINDOW, stride=DEFAULT_WINDOW):
    groups = {}
    for user, frames in frames_by_user.items():
        groups[user] = [window for frame in frames for window in make_windows(frame, length, stride)]
    return groups


# Label 0 for the target user's windows, 1 for everybody else's
def label_windows(groups, target_user):
    if target_user not in groups:
        raise UnknownTargetError(f'target user {target_user!r} not among {sorted(groups)}')

    windows, labels, users = [], [], []
    for user in sorted(groups):
        for window in groups[user]:
            windows.append(window)
            labels.append(AUTHENTIC if user == target_user else INTRUDER)
            users.append(user)

    labeled = LabeledSet(windows=tuple(windows), labels=np.array(labels, dtype=np.int64), users=tuple(users), target_user=target_user)
    logger.debug(f'running label_windows() ... target { target_user } class counts: { labeled.class_counts() }')
    return labeled


# Row-major: row 0's components, then row 1's, ...
def flatten_window(window):
    rows = window.rows if isinstance(window, Window) else np.asarray(window)
    return np.ascontiguousarray(rows, dtype=np.float64).reshape(-1)


def export_labeled_csv(labeled, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    length = labeled.windows[0].length if labeled.windows else 0
    columns = [f'{name}_{step}' for step in range(length) for name in FEATURE_COLUMNS]
    frame = pd.DataFrame(labeled.flat() if labeled.windows else np.zeros((0, length * FEATURE_WIDTH)), columns=columns)
    frame['label'] = labeled.labels
    frame.to_csv(path, index=False, float_format='%.17g')
    logger.debug(f'running export_labeled_csv() ... wrote { len(labeled) } windows to { path }')
    return path
