import logging
from .frames import LEADING_DROP, feature_row
from .kinematics import KinematicStream

logger = logging.getLogger('mousetrust')

__all__ = ['FeatureStream']


# Streaming counterpart of build_frame.
# A kinematic row becomes a feature row once the next row exists (the batch frame drops the last row)
# and it is not one of the LEADING_DROP rows. On any event prefix the emitted rows equal build_frame
# of that prefix, value for value.
class FeatureStream:
    def __init__(self):
        self.kinematics = KinematicStream()
        self.pending = None
        self.pending_index = -1
        self.rows_emitted = 0
        self.last_timestamp = None

    # Returns (timestamp, feature row tuple) when a row is finalized, else None
    def push(self, event):
        button_code = 0 if event.button is None else int(event.button)
        record = self.kinematics.push(event.timestamp, event.x, event.y, button_code)
        self.last_timestamp = event.timestamp
        if record is None:
            return None

        finalized = None
        if self.pending is not None and self.pending_index >= LEADING_DROP:
            finalized = (self.pending.t, feature_row(self.pending))
            self.rows_emitted += 1
        self.pending = record
        self.pending_index += 1
        return finalized
