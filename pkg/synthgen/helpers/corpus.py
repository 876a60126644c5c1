import logging
from pathlib import Path
from ingest.helpers import clean_trace, group_sessions, intensity_for, read_event_file, split_session_id, write_event_file
from utils.helpers import DataError, UsageError, derive_seed
from .profiles import GAME_FOR_MODE, GenSpec, sample_profile
from .trajectory import generate_trace

logger = logging.getLogger('mousetrust')

__all__ = ['SCENARIOS', 'build_corpus', 'corpus_layout', 'load_corpus', 'scenario_traces', 'write_corpus']


SCENARIOS = ('low', 'high', 'both')


# User ids and the modes each plays. The first `shared_users` ids play both games,
# the next ones only the high-intensity game, the rest only the low-intensity game.
def corpus_layout(users_per_game=15, shared_users=11):
    if not 0 <= shared_users <= users_per_game:
        raise UsageError(f'shared users must be between 0 and {users_per_game}, got {shared_users}')
    single = users_per_game - shared_users
    layout = {}
    for index in range(1, shared_users + 2 * single + 1):
        user_id = f'{index:03d}'
        if index <= shared_users:
            layout[user_id] = ('low', 'high')
        elif index <= shared_users + single:
            layout[user_id] = ('high',)
        else:
            layout[user_id] = ('low',)
    return layout


# {user_id: {mode: [Trace, ...]}}. Every session has its own seed derived from (seed, user, mode, session).
def build_corpus(seed, duration=900.0, interval=0.01, users_per_game=15, shared_users=11, sessions_per_game=1, users=None):
    layout = corpus_layout(users_per_game, shared_users)
    if users is not None:
        layout = {user_id: modes for user_id, modes in layout.items() if user_id in set(users)}

    corpus = {}
    for user_id, modes in layout.items():
        corpus[user_id] = {}
        for mode in modes:
            profile = sample_profile(seed, mode, user_id)
            traces = []
            for session in range(1, sessions_per_game + 1):
                spec = GenSpec(
                    mode=mode,
                    duration=duration,
                    interval=interval,
                    seed=derive_seed(seed, 'session', user_id, mode, session),
                    session=session,
                )
                traces.append(generate_trace(profile, spec))
            corpus[user_id][mode] = traces

    logger.info(f'running build_corpus() ... users: { len(corpus) } sessions: { sum(len(t) for modes in corpus.values() for t in modes.values()) }')
    return corpus


# Per-user traces for one scenario; 'both' merges each user's low and high traces
def scenario_traces(corpus, scenario):
    if scenario not in SCENARIOS:
        raise UsageError(f'unknown scenario {scenario!r}, expected one of {SCENARIOS}')
    modes = ('low', 'high') if scenario == 'both' else (scenario,)
    selected = {}
    for user_id in sorted(corpus):
        traces = [trace for mode in modes for trace in corpus[user_id].get(mode, [])]
        if traces:
            selected[user_id] = traces
    return selected


def write_corpus(corpus, directory):
    directory = Path(directory)
    paths = []
    for user_id in sorted(corpus):
        for mode in sorted(corpus[user_id]):
            for trace in corpus[user_id][mode]:
                paths.append(write_event_file(directory / f'{trace.user_session_id}.csv', trace.events))
    logger.info(f'running write_corpus() ... wrote { len(paths) } session files to { directory }')
    return paths


# Reads every *.csv under the directory; a file may hold several sessions
def load_corpus(directory):
    directory = Path(directory)
    files = sorted(directory.glob('*.csv'))
    if not files:
        raise DataError(f'no session files found in {directory}')

    corpus = {}
    for path in files:
        for user_session_id, events in group_sessions(read_event_file(path)).items():
            parts = split_session_id(user_session_id)
            mode = intensity_for(user_session_id).value
            if mode not in GAME_FOR_MODE:
                raise DataError(f'{path.name}: session {user_session_id!r} has no known game code')
            trace = clean_trace(events)
            corpus.setdefault(parts['user'], {}).setdefault(mode, []).append(trace)

    for modes in corpus.values():
        for traces in modes.values():
            traces.sort(key=lambda trace: trace.user_session_id)
    return corpus
