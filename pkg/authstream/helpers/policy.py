from enum import Enum
import logging
from pydantic import BaseModel, ConfigDict, Field, model_validator
from windows.helpers import DEFAULT_WINDOW

logger = logging.getLogger('mousetrust')

__all__ = ['Decision', 'SessionPolicy', 'next_decision']


class Decision(str, Enum):
    WARMING_UP = 'warming_up'
    AUTHENTIC = 'authentic'
    SUSPICIOUS = 'suspicious'
    INTRUDER = 'intruder'


class SessionPolicy(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    window: int = Field(default=DEFAULT_WINDOW, ge=1)
    stride: int = Field(default=10, ge=1)
    alpha: float = Field(default=0.3, gt=0, le=1) # EMA weight of the newest score
    intruder_threshold: float = 0.7
    recovery_threshold: float = 0.5

    @model_validator(mode='after')
    def check_thresholds(self):
        if self.recovery_threshold > self.intruder_threshold:
            raise ValueError(f'recovery threshold {self.recovery_threshold} exceeds intruder threshold {self.intruder_threshold}')
        return self


# Hysteresis automaton over the smoothed score.
# Entering intruder needs s >= intruder threshold; leaving it needs s <= recovery threshold.
def next_decision(policy, current, smoothed):
    if smoothed >= policy.intruder_threshold:
        return Decision.INTRUDER
    if smoothed <= policy.recovery_threshold:
        return Decision.AUTHENTIC
    if current == Decision.INTRUDER:
        return Decision.INTRUDER
    return Decision.SUSPICIOUS
