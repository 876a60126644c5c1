from dataclasses import dataclass, field
import logging
import numpy as np
from utils.helpers import StratificationError, UsageError, make_rng

logger = logging.getLogger('mousetrust')

__all__ = ['FoldPlan', 'session_holdout_folds', 'stratified_folds']


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    seed: int
    folds: tuple = field(repr=False) # (train indices, test indices) per fold
    mode: str = 'stratified'

    def __iter__(self):
        return iter(self.folds)

    def __len__(self):
        return len(self.folds)


def _labels_of(labeled):
    labels = getattr(labeled, 'labels', labeled)
    return np.asarray(labels, dtype=np.int64)


def _build_plan(test_sets, total, k, seed, mode):
    folds = []
    everything = np.arange(total)
    for test in test_sets:
        test = np.sort(np.asarray(test, dtype=np.int64))
        train = np.setdiff1d(everything, test, assume_unique=True)
        folds.append((train, test))
    return FoldPlan(k=k, seed=seed, folds=tuple(folds), mode=mode)


# Per class: permute the indices with the seeded generator and deal them into k nearly equal chunks.
# Every test fold then holds each class to within one window of exact stratification.
def stratified_folds(labeled, k=5, seed=0):
    labels = _labels_of(labeled)
    if k < 2:
        raise UsageError(f'k must be >= 2, got {k}')

    classes, counts = np.unique(labels, return_counts=True)
    for label, count in zip(classes, counts):
        if count < k:
            raise StratificationError(f'class {int(label)} has {int(count)} windows, fewer than k={k} folds')

    rng = make_rng(seed)
    test_sets = [[] for _ in range(k)]
    for label in classes:
        members = np.flatnonzero(labels == label)
        members = rng.permutation(members)
        for fold, chunk in enumerate(np.array_split(members, k)):
            test_sets[fold].extend(chunk.tolist())

    plan = _build_plan(test_sets, labels.shape[0], k, seed, 'stratified')
    logger.debug(f'running stratified_folds() ... k: { k } seed: { seed } test sizes: { [len(test) for _, test in plan] }')
    return plan


# Group-aware folds: all windows of a session land in the same test fold.
# Sessions of each class are shuffled and dealt round-robin, so both classes reach every fold.
def session_holdout_folds(labeled, k=5, seed=0):
    labels = _labels_of(labeled)
    sessions = np.asarray(labeled.sessions)
    if k < 2:
        raise UsageError(f'k must be >= 2, got {k}')

    rng = make_rng(seed)
    test_sets = [[] for _ in range(k)]
    for label in np.unique(labels):
        class_sessions = sorted(set(sessions[labels == label].tolist()))
        if len(class_sessions) < k:
            raise StratificationError(f'class {int(label)} has {len(class_sessions)} sessions, fewer than k={k} folds')
        order = rng.permutation(len(class_sessions))
        for position, session_index in enumerate(order):
            members = np.flatnonzero((sessions == class_sessions[session_index]) & (labels == label))
            test_sets[position % k].extend(members.tolist())

    return _build_plan(test_sets, labels.shape[0], k, seed, 'session')
