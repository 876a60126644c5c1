import logging
from utils.helpers import MixedSessionError, TraceTooShortError
from .events import GAME_INTENSITY, Intensity, Trace, split_session_id

logger = logging.getLogger('mousetrust')

__all__ = ['MIN_TRACE_EVENTS', 'clean_trace', 'intensity_for']


# Jerk needs three time differences (4 events) and the last row is dropped, so 5 events yield one row
MIN_TRACE_EVENTS = 5


def intensity_for(user_session_id):
    game = split_session_id(user_session_id)['game'].lower()
    return GAME_INTENSITY.get(game, Intensity.UNKNOWN)


# Sorts, dedupes and validates the events of one session.
# - Stable sort on timestamp: ties keep input order.
# - Consecutive exact duplicates (same t, x, y, button) are dropped; the first occurrence stays.
# - Distinct events sharing a timestamp are kept; features skips their zero-dt row.
def clean_trace(events, intensity_tag=None):
    events = list(events)
    logger.debug(f'running clean_trace() ... events received: { len(events) }')

    if not events:
        raise TraceTooShortError(f'trace too short: 0 events, need at least {MIN_TRACE_EVENTS}')

    session_ids = {event.user_session_id for event in events}
    if len(session_ids) > 1:
        raise MixedSessionError(f'events belong to {len(session_ids)} sessions: {sorted(session_ids)}')
    user_session_id = events[0].user_session_id

    # Step 1: stable sort
    ordered = sorted(events, key=lambda event: event.timestamp)

    # Step 2: drop consecutive exact duplicates
    cleaned = [ordered[0]]
    for event in ordered[1:]:
        if event.position_key != cleaned[-1].position_key:
            cleaned.append(event)

    if len(cleaned) < MIN_TRACE_EVENTS:
        raise TraceTooShortError(f'trace too short: {len(cleaned)} events after cleaning, need at least {MIN_TRACE_EVENTS}')

    if intensity_tag is None:
        intensity_tag = intensity_for(user_session_id)

    logger.debug(f'running clean_trace() ... session { user_session_id } kept { len(cleaned) } of { len(events) } events')
    return Trace(user_session_id=user_session_id, events=tuple(cleaned), intensity_tag=Intensity(intensity_tag))
