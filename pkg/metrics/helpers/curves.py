import logging
import numpy as np
from utils.helpers import NonFiniteError, ShapeMismatchError, SingleClassError

logger = logging.getLogger('mousetrust')

__all__ = ['confusion', 'f1_score', 'pair_counting_auc', 'roc_auc', 'roc_curve']


def _scores_and_labels(scores, labels, need_both=True):
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel().astype(np.int64)
    if scores.shape != labels.shape:
        raise ShapeMismatchError(f'{scores.shape[0]} scores for {labels.shape[0]} labels')
    if not np.all(np.isfinite(scores)):
        raise NonFiniteError('scores must be finite')
    if need_both and (not np.any(labels == 1) or not np.any(labels == 0)):
        raise SingleClassError(f'both classes are required, got labels {np.unique(labels).tolist()}')
    return scores, labels


# Cumulative (false positives, true positives) at every distinct score, highest first.
# Tied scores collapse into one step.
def _operating_points(scores, labels):
    order = np.argsort(-scores, kind='stable')
    ranked = scores[order]
    hits = labels[order]
    last_of_run = np.r_[np.flatnonzero(ranked[:-1] != ranked[1:]), ranked.shape[0] - 1]
    true_positives = np.cumsum(hits)[last_of_run]
    false_positives = last_of_run + 1 - true_positives
    return np.r_[0, false_positives], np.r_[0, true_positives], np.r_[np.inf, ranked[last_of_run]]


# (fpr, tpr, threshold) rows from (0, 0, inf) to (1, 1, lowest score); a score >= threshold predicts 1
def roc_curve(scores, labels):
    scores, labels = _scores_and_labels(scores, labels)
    false_positives, true_positives, thresholds = _operating_points(scores, labels)
    negatives = int(np.sum(labels == 0))
    positives = int(np.sum(labels == 1))
    return np.column_stack([false_positives / negatives, true_positives / positives, thresholds])


# Trapezoidal area under the ROC curve. Summed over integer counts, then divided once,
# which makes it equal to the pair-counting statistic.
def roc_auc(scores, labels):
    scores, labels = _scores_and_labels(scores, labels)
    false_positives, true_positives = _operating_points(scores, labels)[:2]
    doubled_area = np.sum(np.diff(false_positives) * (true_positives[1:] + true_positives[:-1]))
    negatives = int(np.sum(labels == 0))
    positives = int(np.sum(labels == 1))
    return float(doubled_area) / (2.0 * negatives * positives)


# Fraction of (positive, negative) pairs ranked correctly, ties counted as one half
def pair_counting_auc(scores, labels):
    scores, labels = _scores_and_labels(scores, labels)
    positive = scores[labels == 1][:, np.newaxis]
    negative = scores[labels == 0][np.newaxis, :]
    concordant = np.sum(positive > negative) + 0.5 * np.sum(positive == negative)
    return float(concordant) / (positive.shape[0] * negative.shape[1])


def confusion(scores, labels, threshold=0.5):
    scores, labels = _scores_and_labels(scores, labels, need_both=False)
    predicted = scores >= threshold
    actual = labels == 1
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    tn = int(np.sum(~predicted & ~actual))
    fn = int(np.sum(~predicted & actual))

    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    specificity = tn / (tn + fp) if tn + fp else 0.0
    return {
        'tp': tp,
        'fp': fp,
        'tn': tn,
        'fn': fn,
        'precision': precision,
        'recall': recall,
        'bal_acc': (recall + specificity) / 2.0,
    }


# 2 tp / (2 tp + fp + fn); 0 when there are no true positives
def f1_score(scores, labels, threshold=0.5):
    counts = confusion(scores, labels, threshold)
    if counts['tp'] == 0:
        return 0.0
    return 2.0 * counts['tp'] / (2.0 * counts['tp'] + counts['fp'] + counts['fn'])
