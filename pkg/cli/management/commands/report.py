import logging
from cli.helpers import MouseTrustCommand, emit_report, read_experiment_report
from metrics.helpers import EvalReport, write_roc_csv
from utils.helpers import read_json

logger = logging.getLogger('mousetrust')


class Command(MouseTrustCommand):
    help = 'Emit plot-ready CSV: ROC points of an evaluation report, or the flat table of an experiment report.'

    def add_arguments(self, parser):
        parser.add_argument('report', help='Evaluation or experiment report JSON')
        parser.add_argument('--output', required=True, help='Path of the CSV to write')

    def run(self, *args, **options):
        payload = read_json(options['report'])
        if 'roc_points' in payload:
            report = EvalReport.from_dict(payload)
            write_roc_csv(report, options['output'])
            self.stdout.write(f'wrote {len(report.roc_points)} ROC points to {options["output"]}')
        else:
            report = read_experiment_report(options['report'])
            emit_report(report, 'csv', options['output'])
            self.stdout.write(f'wrote experiment table for scenario {report.scenario} to {options["output"]}')
