import logging
from pathlib import Path
from cli.helpers import MODEL_KINDS, SCENARIO_CHOICES, MouseTrustCommand, emit_report, load_experiment_config, run_experiment

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Run the per-user, per-model cross-validated experiment for one scenario or all three.'

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON file with ExperimentConfig keys; flags override it')
        parser.add_argument('--scenario', choices=SCENARIO_CHOICES)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--targets', nargs='+')
        parser.add_argument('--models', nargs='+', choices=MODEL_KINDS)
        parser.add_argument('--window', type=int)
        parser.add_argument('--stride', type=int)
        parser.add_argument('--folds', type=int)
        parser.add_argument('--fold-mode', choices=('stratified', 'session'))
        parser.add_argument('--users-per-game', type=int)
        parser.add_argument('--shared-users', type=int)
        parser.add_argument('--duration', type=float)
        parser.add_argument('--corpus-dir', help='Read sessions from this directory instead of generating them')
        parser.add_argument('--workers', type=int)
        parser.add_argument('--output-dir')
        parser.add_argument('--format', choices=('json', 'csv', 'both'), default='both')
        parser.add_argument('--timing', action='store_true', default=None, help='Record wall-clock time in the JSON report')

    def run(self, *args, **options):
        config = load_experiment_config(
            options['config'],
            scenario=options['scenario'],
            seed=options['seed'],
            targets=options['targets'],
            models=options['models'],
            window=options['window'],
            stride=options['stride'],
            folds=options['folds'],
            fold_mode=options['fold_mode'],
            users_per_game=options['users_per_game'],
            shared_users=options['shared_users'],
            duration=options['duration'],
            corpus_dir=options['corpus_dir'],
            workers=options['workers'],
            output_dir=options['output_dir'],
            include_timing=options['timing'],
        )
        report = run_experiment(config)

        output_dir = Path(config.output_dir)
        formats = ('json', 'csv') if options['format'] == 'both' else (options['format'],)
        for fmt in formats:
            path = emit_report(report, fmt, output_dir / f'experiment_{config.scenario}.{fmt}', include_timing=config.include_timing)
            self.stdout.write(f'wrote {path}')

        for section in report.sections:
            for model, values in section.averages.items():
                self.stdout.write(
                    f'{section.scenario:>5} {model:>4}  train auc {values["train"]["auc"]:.4f}  test auc {values["test"]["auc"]:.4f}'
                    f'  f1 {values["test"]["f1"]:.4f}  gap {section.auc_gaps[model]:+.4f}'
                )
            self.stdout.write(f'{section.scenario:>5} best model: {section.best_model}')
        if len(report.sections) > 1:
            self.stdout.write(f'overall best model: {report.best_model}')
