from dataclasses import asdict, dataclass, field
import logging
import math
import numpy as np
import pandas as pd
from pathlib import Path
from utils.helpers import FrameEmptyError, read_json, write_json
from .curves import confusion, f1_score, roc_auc, roc_curve

logger = logging.getLogger('mousetrust')

__all__ = ['EvalReport', 'ROC_COLUMNS', 'evaluate', 'evaluate_scores', 'read_eval_report', 'write_eval_report', 'write_roc_csv']


ROC_COLUMNS = ('fpr', 'tpr', 'threshold')
DECISION_THRESHOLD = 0.5


@dataclass(frozen=True)
class EvalReport:
    auc: float
    f1: float
    confusion: dict
    class_counts: dict
    roc_points: tuple = field(repr=False)
    model_tag: str = ''
    user_tag: str = ''
    scenario_tag: str = ''

    @property
    def bal_acc(self):
        return self.confusion['bal_acc']

    def to_dict(self):
        payload = asdict(self)
        # JSON has no infinity; the (0, 0) sentinel threshold is written as the string 'inf'
        payload['roc_points'] = [[fpr, tpr, 'inf' if math.isinf(threshold) else threshold] for fpr, tpr, threshold in self.roc_points]
        return payload

    @classmethod
    def from_dict(cls, payload):
        points = tuple((float(fpr), float(tpr), float(threshold)) for fpr, tpr, threshold in payload['roc_points'])
        class_counts = {int(label): int(count) for label, count in payload['class_counts'].items()}
        return cls(
            auc=payload['auc'],
            f1=payload['f1'],
            confusion=dict(payload['confusion']),
            class_counts=class_counts,
            roc_points=points,
            model_tag=payload.get('model_tag', ''),
            user_tag=payload.get('user_tag', ''),
            scenario_tag=payload.get('scenario_tag', ''),
        )


def evaluate_scores(scores, labels, *, model_tag='', user_tag='', scenario_tag=''):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64)
    if labels.shape[0] == 0:
        raise FrameEmptyError('cannot evaluate an empty set')

    curve = roc_curve(scores, labels)
    report = EvalReport(
        auc=roc_auc(scores, labels),
        f1=f1_score(scores, labels, DECISION_THRESHOLD),
        confusion=confusion(scores, labels, DECISION_THRESHOLD),
        class_counts={0: int(np.sum(labels == 0)), 1: int(np.sum(labels == 1))},
        roc_points=tuple((float(fpr), float(tpr), float(threshold)) for fpr, tpr, threshold in curve),
        model_tag=model_tag,
        user_tag=user_tag,
        scenario_tag=scenario_tag,
    )
    logger.debug(f'running evaluate_scores() ... { model_tag }/{ user_tag }/{ scenario_tag } auc is: { report.auc }')
    return report


# Scores every window with the model's probability output, then assembles all metrics
def evaluate(model, X, labels, *, model_tag='', user_tag='', scenario_tag=''):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise FrameEmptyError('cannot evaluate an empty set')
    scores = model.score_windows(X)
    return evaluate_scores(scores, labels, model_tag=model_tag, user_tag=user_tag, scenario_tag=scenario_tag)


def write_roc_csv(report, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(list(report.roc_points), columns=list(ROC_COLUMNS)).to_csv(path, index=False, float_format='%.17g')
    return path


def write_eval_report(report, path):
    return write_json(report.to_dict(), path)


def read_eval_report(path):
    return EvalReport.from_dict(read_json(path))
