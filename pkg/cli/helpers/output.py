import logging
import pandas as pd
from pathlib import Path
from utils.helpers import DataError, EmptyReportError, UsageError, read_json, write_json
from .experiment import METRICS, REPORT_FORMAT, SPLITS, ExperimentReport

logger = logging.getLogger('mousetrust')

__all__ = ['REPORT_COLUMNS', 'emit_report', 'read_experiment_report', 'report_rows']


REPORT_COLUMNS = ('scenario', 'user', 'model', 'metric', 'split', 'value')
AVERAGE_ROW = 'Average'


def _check_not_empty(report):
    if not report.sections or any(not section.cells for section in report.sections):
        raise EmptyReportError('report holds no result cells; nothing written')


# One row per (user, model, metric, split), then the Average rows of each scenario.
# Reports spanning several scenarios close with Average rows tagged scenario 'all'.
def report_rows(report):
    _check_not_empty(report)
    rows = []
    for section in report.sections:
        for cell in section.cells:
            for metric in METRICS:
                for split in SPLITS:
                    rows.append((section.scenario, cell.user, cell.model, metric, split, getattr(cell, split)[metric]))
        for model, values in section.averages.items():
            for metric in METRICS:
                for split in SPLITS:
                    rows.append((section.scenario, AVERAGE_ROW, model, metric, split, values[split][metric]))

    if len(report.sections) > 1:
        for model, values in report.overall.items():
            for metric in METRICS:
                for split in SPLITS:
                    rows.append(('all', AVERAGE_ROW, model, metric, split, values[split][metric]))
    return pd.DataFrame(rows, columns=list(REPORT_COLUMNS))


def emit_report(report, fmt, path, include_timing=False):
    _check_not_empty(report)
    path = Path(path)
    if fmt == 'json':
        write_json(report.to_dict(include_timing=include_timing), path)
    elif fmt == 'csv':
        table = report_rows(report)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(path, index=False, float_format='%.17g')
    else:
        raise UsageError(f'unknown report format {fmt!r}, expected json or csv')
    logger.info(f'running emit_report() ... wrote { fmt } report to { path }')
    return path


def read_experiment_report(path):
    payload = read_json(path)
    if payload.get('format') != REPORT_FORMAT:
        raise DataError(f'{path}: not an experiment report, format is {payload.get("format")!r}')
    return ExperimentReport.from_dict(payload)
