import logging
import math
from typing import Literal
from pydantic import BaseModel, ConfigDict, Field
from utils.helpers import derive_seed, make_rng

logger = logging.getLogger('mousetrust')

__all__ = ['GAME_FOR_MODE', 'GenSpec', 'MODE_RANGES', 'MOVEMENT_TIME', 'UserProfile', 'pause_budget', 'sample_profile']


# Game code written into session ids for each intensity mode
GAME_FOR_MODE = {'high': 'tf2', 'low': 'pb'}

# Movement time per segment, seconds, uniform over the range
MOVEMENT_TIME = {'low': (0.35, 0.9), 'high': (0.15, 0.45)}

# Documented per-mode parameter ranges. One uniform draw per parameter is mapped into the range of the
# requested mode, so a user's low and high profiles share their relative position inside each range.
MODE_RANGES = {
    'low': {
        'base_speed': (250.0, 600.0),
        'speed_cv': (0.1, 0.35),
        'curvature_bias': (-0.35, 0.35),
        'tremor': (0.3, 1.2),
        'pause_prob': (0.25, 0.5),
        'pause_scale': (0.2, 0.8),
        'click_rate': (4.0, 12.0),
        'reaction_latency': (0.1, 0.3),
        'focal_pull': (0.0, 0.0),
    },
    'high': {
        'base_speed': (900.0, 1800.0),
        'speed_cv': (0.2, 0.5),
        'curvature_bias': (-0.2, 0.2),
        'tremor': (0.5, 2.0),
        'pause_prob': (0.02, 0.08),
        'pause_scale': (0.05, 0.2),
        'click_rate': (20.0, 60.0),
        'reaction_latency': (0.08, 0.2),
        'focal_pull': (0.4, 0.9),
    },
}


class UserProfile(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    user_id: str
    mode: Literal['low', 'high']
    base_speed: float = Field(gt=0) # pixels per second
    speed_cv: float = Field(ge=0)
    curvature_bias: float # radians of bow per segment
    tremor: float = Field(ge=0) # pixels, standard deviation
    pause_prob: float = Field(ge=0, le=1) # per segment
    pause_scale: float = Field(gt=0) # seconds, mean pause length
    click_rate: float = Field(ge=0) # clicks per minute of movement
    reaction_latency: float = Field(ge=0) # seconds of dwell after a click
    focal_x: float
    focal_y: float
    focal_pull: float = Field(ge=0, le=1)


class GenSpec(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    mode: Literal['low', 'high'] = 'low'
    duration: float = Field(default=900.0, gt=0)
    interval: float = Field(default=0.01, gt=0)
    width: int = 1920
    height: int = 1080
    seed: int = Field(default=0, ge=0, lt=2**64)
    start_time: float = Field(default=1.68e9, ge=0)
    session: int = Field(default=1, ge=0)

    @property
    def event_count(self):
        return int(round(self.duration / self.interval))


def _scale(unit, bounds):
    low, high = bounds
    return low + unit * (high - low)


# Deterministic per (seed, mode, user_id)
def sample_profile(seed, mode, user_id='000'):
    ranges = MODE_RANGES[mode]
    rng = make_rng(derive_seed(seed, 'profile', user_id))
    units = rng.random(len(ranges) + 2)

    values = {name: _scale(unit, bounds) for unit, (name, bounds) in zip(units, ranges.items())}
    # Focal point within 15% of the centre of a 1920x1080 screen
    values['focal_x'] = 960.0 + (units[-2] - 0.5) * 0.3 * 1920.0
    values['focal_y'] = 540.0 + (units[-1] - 0.5) * 0.3 * 1080.0

    profile = UserProfile(user_id=user_id, mode=mode, **values)
    logger.debug(f'running sample_profile() ... user { user_id } mode { mode } base_speed is: { profile.base_speed }')
    return profile


# Expected share of samples with zero displacement: pause samples plus click dwell samples,
# over those plus movement samples, for one pause-move-click cycle
def pause_budget(profile, spec):
    low, high = MOVEMENT_TIME[profile.mode]
    movement_samples = max(2.0, (low + high) / 2.0 / spec.interval)

    rate = profile.click_rate / 60.0
    if rate > 0:
        click_prob = 1.0 - (math.exp(-rate * low) - math.exp(-rate * high)) / (rate * (high - low))
    else:
        click_prob = 0.0

    pause_samples = profile.pause_prob * max(1.0, profile.pause_scale / spec.interval)
    dwell_samples = click_prob * max(1, int(round(profile.reaction_latency / spec.interval)))
    stationary = pause_samples + dwell_samples
    return stationary / (stationary + movement_samples)
