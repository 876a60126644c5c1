import logging
import numpy as np
from cli.helpers import MouseTrustCommand, frames_by_user, load_model, read_traces
from features.helpers import normalize_rows
from metrics.helpers import evaluate, write_eval_report, write_roc_csv
from utils.helpers import DataError
from windows.helpers import DEFAULT_WINDOW, label_windows, make_user_windows

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Score a saved model on labeled windows from event files and write an evaluation report.'

    def add_arguments(self, parser):
        parser.add_argument('events', nargs='+', help='Event files or directories of event files')
        parser.add_argument('--model', required=True, help='Path of a model JSON written by train')
        parser.add_argument('--target', required=True)
        parser.add_argument('--output', required=True, help='Path of the report JSON')
        parser.add_argument('--roc', help='Optional path for the ROC points CSV')
        parser.add_argument('--scenario', default='', help='Scenario tag recorded in the report')
        parser.add_argument('--window', type=int, default=DEFAULT_WINDOW)
        parser.add_argument('--stride', type=int, default=DEFAULT_WINDOW)

    def run(self, *args, **options):
        model = load_model(options['model'])
        if model.norm_stats is None:
            raise DataError(f'{options["model"]} carries no normalization statistics')

        frames = frames_by_user(read_traces(options['events']))
        labeled = label_windows(make_user_windows(frames, options['window'], options['stride']), options['target'])
        X = normalize_rows(labeled.tensor(), model.norm_stats)
        report = evaluate(
            model, X, np.asarray(labeled.labels),
            model_tag=model.kind, user_tag=options['target'], scenario_tag=options['scenario'],
        )

        write_eval_report(report, options['output'])
        if options['roc']:
            write_roc_csv(report, options['roc'])
        self.stdout.write(f'auc {report.auc:.4f} f1 {report.f1:.4f} bal_acc {report.bal_acc:.4f} on {len(labeled)} windows')
