import csv
import json
import logging
import sys
from authstream.helpers import SessionPolicy, new_session, push_event
from cli.helpers import MouseTrustCommand, load_model
from ingest.helpers import EVENT_HEADER, parse_event_line
from utils.helpers import DataError, OutOfOrderEventError
from windows.helpers import DEFAULT_WINDOW

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Read mouse event lines from standard input and write one JSON decision update per scored window.'
    stealth_options = ('stdin',)

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Path of a model JSON written by train')
        parser.add_argument('--window', type=int, default=DEFAULT_WINDOW)
        parser.add_argument('--stride', type=int, default=10)
        parser.add_argument('--alpha', type=float, default=0.3)
        parser.add_argument('--intruder-threshold', type=float, default=0.7)
        parser.add_argument('--recovery-threshold', type=float, default=0.5)

    def run(self, *args, **options):
        model = load_model(options['model'])
        if model.norm_stats is None:
            raise DataError(f'{options["model"]} carries no normalization statistics')
        policy = SessionPolicy(
            window=options['window'],
            stride=options['stride'],
            alpha=options['alpha'],
            intruder_threshold=options['intruder_threshold'],
            recovery_threshold=options['recovery_threshold'],
        )

        # One independent state per session id seen on the input
        sessions = {}
        stdin = options.get('stdin') or sys.stdin
        for line_number, fields in enumerate(csv.reader(line.rstrip('\r\n') for line in stdin), start=1):
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            if tuple(field.strip() for field in fields) == EVENT_HEADER:
                continue
            event = parse_event_line(fields, line_number)
            state = sessions.get(event.user_session_id)
            if state is None:
                state = sessions[event.user_session_id] = new_session(model, model.norm_stats, policy)
            try:
                update = push_event(state, event)
            except OutOfOrderEventError as error:
                logger.warning(f'running auth_stream ... line { line_number } rejected: { error }')
                continue
            if update is not None:
                self.stdout.write(json.dumps(update.to_dict(), sort_keys=True))

        for session_id, state in sorted(sessions.items()):
            logger.info(f'running auth_stream ... session { session_id } events: { state.events_consumed } final decision: { state.decision.value }')
