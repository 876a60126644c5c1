import random
import pytest
from utils.helpers import DataError, MixedSessionError, ParseError, TraceTooShortError
from .helpers import *


def _events(count, session='001-pb-001'):
    return [MouseEvent(session, float(i) * 0.01, i, 2 * i) for i in range(count)]


#-------------------------------------------------------------------------------

def test_parse_move_only_row_from_table_2():
    events = parse_events(['ID,Timestamp,X,Y,Button,Duration', '002-tf2-315,1.68E+09,558,301,-1,-1'])
    assert events == [MouseEvent('002-tf2-315', 1.68e9, 558, 301)]
    assert events[0].button is None
    assert events[0].press_duration is None


def test_parse_header_only_is_empty():
    assert parse_events(['ID,Timestamp,X,Y,Button,Duration']) == []
    assert parse_events([]) == []


def test_parse_press_row():
    [event] = parse_events(['u1,10.0,5,5,1,0.12'])
    assert event.button == Button.LEFT
    assert event.press_duration == 0.12


def test_parse_accepts_crlf_line_endings():
    events = parse_events(['ID,Timestamp,X,Y,Button,Duration\r\n', 'u1,1.5,3,4,-1,-1\r\n', 'u1,1.6,3,5,2,0.05\r\n'])
    assert [event.y for event in events] == [4, 5]
    assert events[1].button == Button.RIGHT


@pytest.mark.parametrize('line,line_number', [
    ('u1,10.0,5,5,1', 2),
    ('u1,abc,5,5,-1,-1', 2),
    ('u1,10.0,-3,5,-1,-1', 2),
    ('u1,10.0,5,5,1,-1', 2),
    ('u1,10.0,5,5,9,0.1', 2),
    ('u1,nan,5,5,-1,-1', 2),
])
def test_parse_errors_carry_line_numbers(line, line_number):
    with pytest.raises(ParseError) as excinfo:
        parse_events(['u1,1.0,1,1,-1,-1', line])
    assert excinfo.value.line_number == line_number


def test_writer_and_parser_round_trip():
    events = [
        MouseEvent('u1', 10.0, 5, 5, Button.LEFT, 0.12),
        MouseEvent('u1', 1680000000.0123456, 558, 301),
        MouseEvent('u1', 1680000000.0223456, 0, 0, Button.MIDDLE, 0.2),
    ]
    lines = serialize_events(events)
    assert lines[0] == 'ID,Timestamp,X,Y,Button,Duration'
    assert parse_events(lines) == events
    assert serialize_events(parse_events(lines)) == lines


def test_event_file_round_trip(tmp_path):
    events = _events(20)
    path = write_event_file(tmp_path / 'session.csv', events)
    assert read_event_file(path) == events


def test_event_invariants():
    with pytest.raises(DataError):
        MouseEvent('u1', 1.0, 1, 1, Button.LEFT, None)
    with pytest.raises(DataError):
        MouseEvent('u1', -1.0, 1, 1)


def test_split_session_id_and_intensity():
    assert split_session_id('002-tf2-315') == {'user': '002', 'game': 'tf2', 'session': '315'}
    assert intensity_for('002-tf2-315') == Intensity.HIGH
    assert intensity_for('002-pb-1') == Intensity.LOW
    assert intensity_for('somebody') == Intensity.UNKNOWN


def test_group_sessions_keeps_first_seen_order():
    events = _events(3, 'a-pb-1') + _events(2, 'b-pb-1') + _events(1, 'a-pb-1')
    groups = group_sessions(events)
    assert list(groups) == ['a-pb-1', 'b-pb-1']
    assert len(groups['a-pb-1']) == 4


#-------------------------------------------------------------------------------

def test_clean_too_short_after_dedup():
    event = MouseEvent('u1', 1.0, 1, 1)
    with pytest.raises(TraceTooShortError):
        clean_trace([event, event, MouseEvent('u1', 2.0, 2, 2)])


def test_clean_identity_on_distinct_sorted_events():
    events = _events(100)
    trace = clean_trace(events)
    assert len(trace) == 100
    assert trace.events == tuple(events)
    assert trace.intensity_tag == Intensity.LOW


def test_clean_shuffled_equals_clean_sorted():
    events = _events(60)
    shuffled = list(events)
    random.Random(3).shuffle(shuffled)
    assert clean_trace(shuffled) == clean_trace(events)


def test_clean_is_idempotent_and_never_grows():
    events = _events(30)
    events = events + events[5:12] + [MouseEvent('001-pb-001', 0.05, 99, 99)]
    once = clean_trace(events)
    twice = clean_trace(once.events)
    assert once == twice
    assert len(once) <= len(events)
    timestamps = [event.timestamp for event in once.events]
    assert timestamps == sorted(timestamps)


def test_clean_keeps_distinct_events_sharing_a_timestamp_in_input_order():
    events = _events(6)
    tie = MouseEvent('001-pb-001', events[3].timestamp, 500, 500)
    trace = clean_trace(events[:4] + [tie] + events[4:])
    assert trace.events[3] == events[3]
    assert trace.events[4] == tie
    assert len(trace) == 7


def test_clean_rejects_mixed_sessions():
    with pytest.raises(MixedSessionError):
        clean_trace(_events(5, 'a-pb-1') + _events(5, 'b-pb-1'))


def test_clean_explicit_intensity_wins():
    trace = clean_trace(_events(10), intensity_tag='high')
    assert trace.intensity_tag == Intensity.HIGH
    assert trace.user_id == '001'
