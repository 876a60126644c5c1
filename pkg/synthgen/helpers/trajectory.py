import logging
import math
import numpy as np
from ingest.helpers import Button, Intensity, MouseEvent, Trace
from utils.helpers import UsageError, derive_seed, make_rng
from .profiles import GAME_FOR_MODE, MOVEMENT_TIME

logger = logging.getLogger('mousetrust')

__all__ = ['generate_trace', 'min_jerk', 'session_id_for']


# Radius of outward sweeps in high mode, as a fraction of the shorter screen side
SWEEP_RADIUS = (0.1, 0.45)
PRESS_DURATION = (0.05, 0.2)
MAX_BOW = 1.2


# Normalized minimum-jerk position profile: 0 at tau = 0, 1 at tau = 1, zero speed and acceleration at both ends
def min_jerk(tau):
    tau = np.asarray(tau, dtype=np.float64)
    return 10.0 * tau ** 3 - 15.0 * tau ** 4 + 6.0 * tau ** 5


def session_id_for(user_id, mode, session=1):
    return f'{user_id}-{GAME_FOR_MODE[mode]}-{session:03d}'


class _TraceBuilder:
    def __init__(self, spec):
        self.spec = spec
        self.xs = []
        self.ys = []
        self.presses = {} # sample index -> press duration
        self.limit = spec.event_count

    @property
    def full(self):
        return len(self.xs) >= self.limit

    @property
    def current(self):
        return self.xs[-1], self.ys[-1]

    def clamp(self, x, y):
        return min(max(x, 0.0), self.spec.width - 1.0), min(max(y, 0.0), self.spec.height - 1.0)

    def place(self, x, y):
        px, py = self.clamp(float(np.rint(x)), float(np.rint(y)))
        self.xs.append(int(px))
        self.ys.append(int(py))

    # A moving sample never repeats the previous pixel, so zero displacement only comes from pauses and dwells
    def move_to(self, x, y):
        px, py = self.clamp(float(np.rint(x)), float(np.rint(y)))
        px, py = int(px), int(py)
        if self.xs and (px, py) == self.current:
            px = px + 1 if px + 1 <= self.spec.width - 1 else px - 1
        self.xs.append(px)
        self.ys.append(py)

    def stay(self, samples, press_duration=None):
        x, y = self.current
        if press_duration is not None:
            self.presses[len(self.xs)] = press_duration
        for _ in range(samples):
            self.xs.append(x)
            self.ys.append(y)


def _next_target(profile, spec, rng, outward):
    if spec.mode == 'low':
        return rng.uniform(0.0, spec.width - 1.0), rng.uniform(0.0, spec.height - 1.0)

    side = min(spec.width, spec.height)
    if outward:
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(*SWEEP_RADIUS) * side
        return profile.focal_x + radius * math.cos(angle), profile.focal_y + radius * math.sin(angle)
    # Return sweep: lands near the focal point, tighter for a stronger pull
    spread = (1.0 - profile.focal_pull) * 0.1 * side
    return profile.focal_x + rng.normal(0.0, spread), profile.focal_y + rng.normal(0.0, spread)


# Pause (Bernoulli, exponential length), one minimum-jerk movement segment with tremor and a bowed path,
# then a click with a reaction dwell at Poisson rate over the movement time
def generate_trace(profile, spec):
    if spec.width < 2 or spec.height < 2:
        raise UsageError(f'screen bounds must be at least 2x2 pixels, got {spec.width}x{spec.height}')
    if spec.mode != profile.mode:
        raise UsageError(f'profile is for {profile.mode} mode, generation asked for {spec.mode}')

    rng = make_rng(derive_seed(spec.seed, 'trace', profile.user_id, spec.mode, spec.session))
    builder = _TraceBuilder(spec)
    low, high = MOVEMENT_TIME[spec.mode]

    # Step 1: starting point
    if spec.mode == 'high':
        builder.place(profile.focal_x, profile.focal_y)
    else:
        builder.place(rng.uniform(0.0, spec.width - 1.0), rng.uniform(0.0, spec.height - 1.0))
    anchor = np.array(builder.current, dtype=np.float64)
    outward = True

    while not builder.full:
        # Step 2: optional pause
        if rng.random() < profile.pause_prob:
            builder.stay(max(1, int(round(rng.exponential(profile.pause_scale) / spec.interval))))

        # Step 3: movement segment toward the next target, length limited by the drawn speed
        movement_time = rng.uniform(low, high)
        target = np.array(_next_target(profile, spec, rng, outward), dtype=np.float64)
        outward = not outward
        reach = profile.base_speed * rng.lognormal(0.0, profile.speed_cv) * movement_time
        offset = target - anchor
        distance = float(np.hypot(*offset))
        if distance > reach:
            offset = offset * (reach / distance)
            distance = reach
        end = np.array(builder.clamp(*(anchor + offset)), dtype=np.float64)

        samples = max(2, int(round(movement_time / spec.interval)))
        tau = np.arange(1, samples + 1) / samples
        bow = 0.5 * distance * math.tan(float(np.clip(profile.curvature_bias + rng.normal(0.0, 0.1), -MAX_BOW, MAX_BOW)))
        normal = np.array([-offset[1], offset[0]]) / distance if distance > 0 else np.zeros(2)
        path = anchor + np.outer(min_jerk(tau), end - anchor) + np.outer(bow * np.sin(np.pi * tau), normal)
        path = path + rng.normal(0.0, profile.tremor, path.shape)
        for x, y in path:
            builder.move_to(x, y)
        anchor = end

        # Step 4: click with reaction dwell
        click_prob = 1.0 - math.exp(-profile.click_rate / 60.0 * movement_time)
        if rng.random() < click_prob:
            dwell = max(1, int(round(profile.reaction_latency / spec.interval)))
            builder.stay(dwell, press_duration=rng.uniform(*PRESS_DURATION))

    # Step 5: events at the sample interval
    count = builder.limit
    timestamps = spec.start_time + np.arange(count) * spec.interval
    user_session_id = session_id_for(profile.user_id, spec.mode, spec.session)
    events = []
    for index in range(count):
        press = builder.presses.get(index)
        events.append(MouseEvent(
            user_session_id,
            float(timestamps[index]),
            builder.xs[index],
            builder.ys[index],
            None if press is None else Button.LEFT,
            press,
        ))

    logger.debug(f'running generate_trace() ... session { user_session_id } events: { count }')
    return Trace(user_session_id=user_session_id, events=tuple(events), intensity_tag=Intensity(spec.mode))
