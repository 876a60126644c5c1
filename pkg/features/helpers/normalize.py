from dataclasses import dataclass, field
import logging
import numpy as np
from utils.helpers import FrameEmptyError, ShapeMismatchError
from .frames import FEATURE_WIDTH, FeatureFrame

logger = logging.getLogger('mousetrust')

__all__ = ['NormStats', 'apply_normalizer', 'fit_normalizer', 'normalize_rows']


# Per-component z-score statistics, in FEATURE_COLUMNS order. Immutable once fit.
@dataclass(frozen=True, eq=False)
class NormStats:
    mean: np.ndarray = field(repr=False)
    std: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'mean', np.array(self.mean, dtype=np.float64))
        object.__setattr__(self, 'std', np.array(self.std, dtype=np.float64))
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ShapeMismatchError(f'mean {self.mean.shape} and std {self.std.shape} must be matching vectors')
        if np.any(self.std < 0):
            raise ShapeMismatchError('standard deviations must be non-negative')
        self.mean.flags.writeable = False
        self.std.flags.writeable = False

    @property
    def width(self):
        return self.mean.shape[0]

    def to_dict(self):
        return {'mean': self.mean.tolist(), 'std': self.std.tolist()}

    @classmethod
    def from_dict(cls, payload):
        return cls(mean=payload['mean'], std=payload['std'])


def _as_rows(frame):
    rows = frame.rows if isinstance(frame, FeatureFrame) else np.asarray(frame, dtype=np.float64)
    # Window tensors (n, L, width) are fit over all their rows
    if rows.ndim == 3:
        rows = rows.reshape(-1, rows.shape[-1])
    return rows


# Mean and population standard deviation per component
def fit_normalizer(frame):
    rows = _as_rows(frame)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise FrameEmptyError('cannot fit normalization statistics on an empty frame')
    std = rows.std(axis=0)
    # Constant components can leave float residue in std; pin them to exactly zero
    std[np.ptp(rows, axis=0) == 0] = 0.0
    stats = NormStats(mean=rows.mean(axis=0), std=std)
    logger.debug(f'running fit_normalizer() ... fit on { rows.shape[0] } rows')
    return stats


# (value - mean) / std elementwise over the last axis; zero-variance components map to 0.
# Works on single rows, frames and (n, L, width) window tensors alike.
def normalize_rows(rows, stats):
    rows = np.asarray(rows, dtype=np.float64)
    if rows.shape[-1] != stats.width:
        raise ShapeMismatchError(f'rows have {rows.shape[-1]} components, statistics have {stats.width}')
    centered = rows - stats.mean
    scale = np.broadcast_to(stats.std, centered.shape)
    out = np.zeros_like(centered)
    np.divide(centered, scale, out=out, where=scale > 0)
    return out


def apply_normalizer(frame, stats):
    if stats.width != FEATURE_WIDTH:
        raise ShapeMismatchError(f'statistics have {stats.width} components, frames have {FEATURE_WIDTH}')
    return FeatureFrame(
        user_session_id=frame.user_session_id,
        rows=normalize_rows(frame.rows, stats),
        timestamps=frame.timestamps.copy(),
    )
