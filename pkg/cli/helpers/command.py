import logging
from pathlib import Path
from django.core.management.base import BaseCommand, CommandError
from pydantic import ValidationError
from features.helpers import build_frame
from ingest.helpers import clean_trace, group_sessions, read_event_file
from utils.helpers import DataError, MouseTrustError

logger = logging.getLogger('mousetrust')

__all__ = ['MouseTrustCommand', 'frames_by_user', 'read_traces']


# Base for every mousetrust management command. Subclasses implement run(); library errors
# become CommandError with the exit code of their family (2 usage, 3 data, 4 numeric).
class MouseTrustCommand(BaseCommand):
    def run(self, *args, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except MouseTrustError as error:
            logger.error(f'running { self.__module__ } ... { type(error).__name__ }: { error }')
            raise CommandError(f'{type(error).__name__}: {error}', returncode=error.exit_code) from error
        except ValidationError as error:
            logger.error(f'running { self.__module__ } ... invalid configuration: { error }')
            raise CommandError(f'invalid configuration: {error}', returncode=2) from error
        except OSError as error:
            logger.error(f'running { self.__module__ } ... I/O failure: { error }')
            raise CommandError(f'I/O failure: {error}', returncode=3) from error


# Cleaned traces from event files; a directory contributes every *.csv in it
def read_traces(paths):
    files = []
    for path in map(Path, paths):
        files.extend(sorted(path.glob('*.csv')) if path.is_dir() else [path])
    if not files:
        raise DataError(f'no event files found in {[str(path) for path in paths]}')

    traces = []
    for path in files:
        for events in group_sessions(read_event_file(path)).values():
            traces.append(clean_trace(events))
    traces.sort(key=lambda trace: trace.user_session_id)
    logger.debug(f'running read_traces() ... files: { len(files) } sessions: { len(traces) }')
    return traces


def frames_by_user(traces):
    frames = {}
    for trace in traces:
        frames.setdefault(trace.user_id, []).append(build_frame(trace))
    return frames
