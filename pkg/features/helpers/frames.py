from dataclasses import dataclass, field
import logging
import numpy as np
import pandas as pd
from pathlib import Path
from utils.helpers import FrameEmptyError, ShapeMismatchError
from .kinematics import derive_kinematics

logger = logging.getLogger('mousetrust')

__all__ = ['FEATURE_COLUMNS', 'FEATURE_WIDTH', 'LEADING_DROP', 'FeatureFrame', 'build_frame', 'export_frame_csv', 'feature_row', 'to_feature_frame']


# Final selected features, fixed order. Velocity is computed but not selected.
FEATURE_COLUMNS = (
    'x',
    'y',
    'stop_duration',
    'jerk',
    'direction_change',
    'movement_distance',
    'acceleration',
    'button_code',
    'angle',
)
FEATURE_WIDTH = len(FEATURE_COLUMNS)

# Rows whose acceleration or jerk have no predecessor to difference against
LEADING_DROP = 2


@dataclass(frozen=True, eq=False)
class FeatureFrame:
    user_session_id: str
    rows: np.ndarray = field(repr=False)
    timestamps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != FEATURE_WIDTH:
            raise ShapeMismatchError(f'feature rows must be (n, {FEATURE_WIDTH}), got {self.rows.shape}')
        if self.timestamps.shape != (self.rows.shape[0],):
            raise ShapeMismatchError(f'{self.timestamps.shape[0]} timestamps for {self.rows.shape[0]} rows')
        self.rows.flags.writeable = False
        self.timestamps.flags.writeable = False

    def __len__(self):
        return self.rows.shape[0]

    def column(self, name):
        return self.rows[:, FEATURE_COLUMNS.index(name)]


def feature_row(record):
    return (
        float(record.x),
        float(record.y),
        record.stop_duration,
        record.jerk,
        record.direction_change,
        record.movement_distance,
        record.acceleration,
        float(record.button_code),
        record.angle,
    )


# Selects the 9 final components and drops the leading undefined-derivative rows and the final row
def to_feature_frame(kinematics, user_session_id=''):
    kinematics = list(kinematics)
    kept = kinematics[LEADING_DROP:-1]
    if not kept:
        raise FrameEmptyError(f'frame empty for session {user_session_id!r}: {len(kinematics)} kinematic rows')

    rows = np.array([feature_row(record) for record in kept], dtype=np.float64)
    timestamps = np.array([record.t for record in kept], dtype=np.float64)
    logger.debug(f'running to_feature_frame() ... session { user_session_id } rows: { rows.shape[0] }')
    return FeatureFrame(user_session_id=user_session_id, rows=rows, timestamps=timestamps)


def build_frame(trace):
    return to_feature_frame(derive_kinematics(trace), trace.user_session_id)


def export_frame_csv(frame, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(frame.rows, columns=list(FEATURE_COLUMNS)).to_csv(path, index=False, float_format='%.17g')
    logger.debug(f'running export_frame_csv() ... wrote { len(frame) } rows to { path }')
    return path
