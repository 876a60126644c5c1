from dataclasses import dataclass
import logging
import math
from utils.helpers import NonFiniteError

logger = logging.getLogger('mousetrust')

__all__ = ['KinematicRecord', 'KinematicStream', 'derive_kinematics', 'wrap_angle']


@dataclass(frozen=True, slots=True)
class KinematicRecord:
    t: float
    x: int
    y: int
    dt: float
    movement_distance: float
    velocity: float
    acceleration: float
    jerk: float
    angle: float
    direction_change: float
    stop_duration: float
    button_code: int
    is_stop: bool


# Wraps an angle difference into [-pi, pi]
def wrap_angle(value):
    return math.remainder(value, 2.0 * math.pi)


# Incremental first-order backward differences over consecutive events.
# Keeps only the previous accepted event and the last velocity, acceleration and angle,
# so batch extraction and the streaming engine share one arithmetic path.
class KinematicStream:
    def __init__(self):
        self.previous = None # (t, x, y) of the last accepted event
        self.previous_velocity = None
        self.previous_acceleration = None
        self.previous_angle = 0.0
        self.stop_run = 0.0
        self.rows = 0

    # Returns the new KinematicRecord, or None for the first event and for zero-dt events
    def push(self, t, x, y, button_code=0):
        if self.previous is None:
            self.previous = (t, x, y)
            return None

        previous_t, previous_x, previous_y = self.previous
        dt = t - previous_t
        if dt <= 0:
            return None

        dx = x - previous_x
        dy = y - previous_y
        distance = math.hypot(dx, dy)
        velocity = distance / dt

        # Undefined derivatives on the leading rows are recorded as 0; to_feature_frame drops those rows
        if self.previous_velocity is None:
            acceleration = 0.0
        else:
            acceleration = (velocity - self.previous_velocity) / dt
        if self.previous_acceleration is None:
            jerk = 0.0
        else:
            jerk = (acceleration - self.previous_acceleration) / dt

        is_stop = distance == 0
        if is_stop:
            angle = self.previous_angle
            self.stop_run += dt
            stop_duration = self.stop_run
        else:
            angle = math.atan2(dy, dx)
            if angle == -math.pi:
                angle = math.pi
            self.stop_run = 0.0
            stop_duration = 0.0
        direction_change = wrap_angle(angle - self.previous_angle)

        record = KinematicRecord(
            t=t, x=x, y=y, dt=dt,
            movement_distance=distance,
            velocity=velocity,
            acceleration=acceleration,
            jerk=jerk,
            angle=angle,
            direction_change=direction_change,
            stop_duration=stop_duration,
            button_code=int(button_code),
            is_stop=is_stop,
        )
        if not all(math.isfinite(value) for value in (velocity, acceleration, jerk, angle, direction_change, stop_duration)):
            raise NonFiniteError(f'non-finite kinematics at t={t!r}: {record}')

        self.previous = (t, x, y)
        self.previous_velocity = velocity
        # Acceleration only becomes a real value from the second row on
        if self.rows >= 1:
            self.previous_acceleration = acceleration
        self.previous_angle = angle
        self.rows += 1
        return record


def _button_code(event):
    return 0 if event.button is None else int(event.button)


# One record per consecutive event pair with dt > 0
def derive_kinematics(trace):
    logger.debug(f'running derive_kinematics() ... session { trace.user_session_id } events: { len(trace.events) }')
    stream = KinematicStream()
    records = []
    for event in trace.events:
        record = stream.push(event.timestamp, event.x, event.y, _button_code(event))
        if record is not None:
            records.append(record)
    logger.debug(f'running derive_kinematics() ... records derived: { len(records) }')
    return records
