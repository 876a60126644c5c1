import csv
from dataclasses import dataclass
from enum import Enum, IntEnum
import logging
import math
from pathlib import Path
from utils.helpers import DataError, ParseError

logger = logging.getLogger('mousetrust')

__all__ = ['Button', 'EVENT_HEADER', 'GAME_INTENSITY', 'Intensity', 'MouseEvent', 'Trace', 'group_sessions', 'parse_event_line', 'parse_events', 'read_event_file', 'serialize_events', 'split_session_id', 'write_event_file']


EVENT_HEADER = ('ID', 'Timestamp', 'X', 'Y', 'Button', 'Duration')
SENTINEL = -1


class Button(IntEnum):
    NONE = 0
    LEFT = 1
    RIGHT = 2
    MIDDLE = 3


class Intensity(str, Enum):
    LOW = 'low'
    HIGH = 'high'
    UNKNOWN = 'unknown'


# Game codes in session ids: tf2 is the fast shooter (high intensity), pb the bridge-building puzzle (low)
GAME_INTENSITY = {
    'tf2': Intensity.HIGH,
    'pb': Intensity.LOW,
    'poly': Intensity.LOW,
}


@dataclass(frozen=True, slots=True)
class MouseEvent:
    user_session_id: str
    timestamp: float
    x: int
    y: int
    button: Button | None = None
    press_duration: float | None = None

    def __post_init__(self):
        if (self.button is None) != (self.press_duration is None):
            raise DataError('button and press_duration must be both present or both absent')
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise DataError(f'timestamp must be finite and non-negative, got {self.timestamp!r}')
        if self.x < 0 or self.y < 0:
            raise DataError(f'coordinates must be non-negative, got ({self.x}, {self.y})')
        if self.press_duration is not None and not self.press_duration > 0:
            raise DataError(f'press_duration must be > 0, got {self.press_duration!r}')

    # Identity used by trace cleaning to detect exact duplicates
    @property
    def position_key(self):
        return (self.timestamp, self.x, self.y, self.button)


@dataclass(frozen=True, slots=True)
class Trace:
    user_session_id: str
    events: tuple
    intensity_tag: Intensity = Intensity.UNKNOWN

    def __len__(self):
        return len(self.events)

    @property
    def user_id(self):
        return split_session_id(self.user_session_id)['user']


#-----------------------------------------------------------------------------

# Splits '002-tf2-315' into user '002', game 'tf2', session '315'. Ids without dashes are a bare user.
def split_session_id(user_session_id):
    parts = user_session_id.split('-')
    if len(parts) >= 3:
        return {'user': parts[0], 'game': parts[1], 'session': '-'.join(parts[2:])}
    if len(parts) == 2:
        return {'user': parts[0], 'game': parts[1], 'session': ''}
    return {'user': user_session_id, 'game': '', 'session': ''}


def _parse_int(field, name, line_number):
    try:
        return int(field)
    except ValueError:
        # Accept integral values written as floats ('558.0')
        try:
            value = float(field)
        except ValueError:
            raise ParseError(line_number, f'{name} is not numeric: {field!r}') from None
        if not value.is_integer():
            raise ParseError(line_number, f'{name} must be an integer: {field!r}')
        return int(value)


def _parse_float(field, name, line_number):
    try:
        value = float(field)
    except ValueError:
        raise ParseError(line_number, f'{name} is not numeric: {field!r}') from None
    if not math.isfinite(value):
        raise ParseError(line_number, f'{name} must be finite: {field!r}')
    return value


# Parses the already-split fields of one data row
def parse_event_line(fields, line_number):
    if len(fields) != len(EVENT_HEADER):
        raise ParseError(line_number, f'expected {len(EVENT_HEADER)} columns, got {len(fields)}')

    user_session_id = fields[0].strip()
    if not user_session_id:
        raise ParseError(line_number, 'ID is empty')

    timestamp = _parse_float(fields[1].strip(), 'Timestamp', line_number)
    if timestamp < 0:
        raise ParseError(line_number, f'Timestamp must be non-negative: {fields[1]!r}')
    x = _parse_int(fields[2].strip(), 'X', line_number)
    y = _parse_int(fields[3].strip(), 'Y', line_number)
    if x < 0 or y < 0:
        raise ParseError(line_number, f'negative coordinates ({x}, {y})')

    button_code = _parse_int(fields[4].strip(), 'Button', line_number)
    duration = _parse_float(fields[5].strip(), 'Duration', line_number)

    # Step 1: sentinel -1 in both columns marks a move-only row
    if button_code == SENTINEL and duration == SENTINEL:
        return MouseEvent(user_session_id, timestamp, x, y)
    if button_code == SENTINEL or duration == SENTINEL:
        raise ParseError(line_number, 'Button and Duration must both be -1 or both be set')

    # Step 2: a press row needs a known button and a positive duration
    try:
        button = Button(button_code)
    except ValueError:
        raise ParseError(line_number, f'unknown Button code {button_code}') from None
    if not duration > 0:
        raise ParseError(line_number, f'Duration must be > 0, got {duration!r}')
    return MouseEvent(user_session_id, timestamp, x, y, button, duration)


# Parses mouse event text lines (LF or CRLF, optional header) into MouseEvents.
# Raises ParseError with the 1-based line number of the offending line.
def parse_events(text_lines):
    events = []
    reader = csv.reader(line.rstrip('\r\n') for line in text_lines)
    for fields in reader:
        line_number = reader.line_num
        if not fields or (len(fields) == 1 and not fields[0].strip()):
            continue
        if line_number == 1 and tuple(field.strip() for field in fields) == EVENT_HEADER:
            continue
        events.append(parse_event_line(fields, line_number))

    logger.debug(f'running parse_events() ... events parsed: { len(events) }')
    return events


def _format_float(value):
    # repr is the shortest string that round-trips a float exactly
    return repr(float(value))


def serialize_events(events, header=True):
    lines = [','.join(EVENT_HEADER)] if header else []
    for event in events:
        if event.button is None:
            button, duration = str(SENTINEL), str(SENTINEL)
        else:
            button, duration = str(int(event.button)), _format_float(event.press_duration)
        lines.append(','.join([event.user_session_id, _format_float(event.timestamp), str(event.x), str(event.y), button, duration]))
    return lines


def read_event_file(path):
    logger.debug(f'running read_event_file() ... path is: { path }')
    with open(path, encoding='utf-8', newline='') as handle:
        return parse_events(handle)


def write_event_file(path, events):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for line in serialize_events(events):
            handle.write(line + '\n')
    logger.debug(f'running write_event_file() ... wrote { len(events) } events to { path }')
    return path


# Splits a mixed event list into per-session lists, keeping first-seen session order
def group_sessions(events):
    sessions = {}
    for event in events:
        sessions.setdefault(event.user_session_id, []).append(event)
    return sessions
