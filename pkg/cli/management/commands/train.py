import logging
import numpy as np
from django.conf import settings
from cli.helpers import MODEL_KINDS, MouseTrustCommand, fit_model, frames_by_user, read_traces, save_model
from features.helpers import fit_normalizer, normalize_rows
from forest.helpers import TreeConfig
from rnn.helpers import RnnConfig
from windows.helpers import DEFAULT_WINDOW, label_windows, make_user_windows

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Fit one model for a target user on every window of the given event files and save it as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('events', nargs='+', help='Event files or directories of event files')
        parser.add_argument('--target', required=True)
        parser.add_argument('--model', choices=MODEL_KINDS, required=True)
        parser.add_argument('--output', required=True, help='Path of the model JSON')
        parser.add_argument('--seed', type=int, default=settings.MOUSETRUST['SEED'])
        parser.add_argument('--window', type=int, default=DEFAULT_WINDOW)
        parser.add_argument('--stride', type=int, default=DEFAULT_WINDOW)
        parser.add_argument('--epochs', type=int, default=30)
        parser.add_argument('--hidden', type=int, default=32)
        parser.add_argument('--learning-rate', type=float, default=1e-3)
        parser.add_argument('--max-depth', type=int, default=12, help='0 grows trees without a depth limit')
        parser.add_argument('--trees', type=int, default=100)
        parser.add_argument('--balanced', action='store_true', help='Weight the classes inversely to their frequency')
        parser.add_argument('--workers', type=int, default=settings.MOUSETRUST['WORKERS'])

    def run(self, *args, **options):
        weighting = 'balanced' if options['balanced'] else 'none'
        rnn_config = RnnConfig(
            epochs=options['epochs'],
            hidden_units=options['hidden'],
            learning_rate=options['learning_rate'],
            class_weighting=weighting,
        )
        tree_config = TreeConfig(
            max_depth=options['max_depth'] or None,
            n_trees=options['trees'],
            class_weighting=weighting,
            n_jobs=options['workers'],
        )

        # Step 1: windows and labels
        frames = frames_by_user(read_traces(options['events']))
        labeled = label_windows(make_user_windows(frames, options['window'], options['stride']), options['target'])
        tensor = labeled.tensor()

        # Step 2: normalize with statistics of these windows and fit
        norm_stats = fit_normalizer(tensor)
        X = normalize_rows(tensor, norm_stats)
        model = fit_model(options['model'], X, np.asarray(labeled.labels), norm_stats, options['seed'], rnn_config, tree_config)

        save_model(model, options['output'])
        self.stdout.write(f'{options["model"]} model for target {options["target"]} on {len(labeled)} windows {labeled.class_counts()} -> {options["output"]}')
