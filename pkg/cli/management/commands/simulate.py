import logging
from django.conf import settings
from cli.helpers import MouseTrustCommand
from synthgen.helpers import build_corpus, write_corpus

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Generate a synthetic corpus (one event CSV per session) in the two-game layout.'

    def add_arguments(self, parser):
        parser.add_argument('--output', required=True, help='Directory for the session files')
        parser.add_argument('--seed', type=int, default=settings.MOUSETRUST['SEED'])
        parser.add_argument('--duration', type=float, default=900.0, help='Seconds per session')
        parser.add_argument('--interval', type=float, default=0.01, help='Seconds between samples')
        parser.add_argument('--users-per-game', type=int, default=15)
        parser.add_argument('--shared-users', type=int, default=11)
        parser.add_argument('--sessions', type=int, default=1, help='Sessions per user and game')
        parser.add_argument('--users', nargs='*', help='Only generate these user ids')

    def run(self, *args, **options):
        corpus = build_corpus(
            seed=options['seed'],
            duration=options['duration'],
            interval=options['interval'],
            users_per_game=options['users_per_game'],
            shared_users=options['shared_users'],
            sessions_per_game=options['sessions'],
            users=options['users'] or None,
        )
        paths = write_corpus(corpus, options['output'])
        self.stdout.write(f'wrote {len(paths)} sessions for {len(corpus)} users to {options["output"]}')
