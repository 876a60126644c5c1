import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st
from utils.helpers import FrameEmptyError, SingleClassError
from .helpers import *


class ConstantScorer:
    def __init__(self, value):
        self.value = value

    def score_windows(self, X):
        return np.full(np.asarray(X).shape[0], self.value)


class OracleScorer:
    # Reads the label planted in component 0 of the first row
    def score_windows(self, X):
        return np.asarray(X)[:, 0, 0].astype(np.float64)


def _random_instance(rng, size):
    labels = rng.integers(0, 2, size)
    labels[0], labels[1] = 0, 1
    scores = np.round(rng.random(size), int(rng.integers(1, 4)))
    return scores, labels


#-------------------------------------------------------------------------------

def test_two_point_curve():
    curve = roc_curve([0.9, 0.1], [1, 0])
    assert curve[:, :2].tolist() == [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
    assert np.isinf(curve[0, 2])


def test_all_equal_scores_collapse_to_the_diagonal_ends():
    curve = roc_curve([0.3] * 6, [0, 1, 0, 1, 1, 0])
    assert curve[:, :2].tolist() == [[0.0, 0.0], [1.0, 1.0]]


def test_reversed_scores_pass_through_one_zero():
    curve = roc_curve([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0])
    assert [1.0, 0.0] in curve[:, :2].tolist()


def test_curve_is_monotone_from_origin_to_corner():
    rng = np.random.default_rng(0)
    scores, labels = _random_instance(rng, 40)
    curve = roc_curve(scores, labels)
    assert curve[0, :2].tolist() == [0.0, 0.0]
    assert curve[-1, :2].tolist() == [1.0, 1.0]
    assert np.all(np.diff(curve[:, 0]) >= 0)
    assert np.all(np.diff(curve[:, 1]) >= 0)
    assert np.all(np.diff(curve[1:, 2]) < 0)


def test_single_class_is_rejected():
    with pytest.raises(SingleClassError):
        roc_curve([0.2, 0.4], [1, 1])
    with pytest.raises(SingleClassError):
        roc_auc([0.2, 0.4], [0, 0])


#-------------------------------------------------------------------------------

def test_auc_hand_example():
    assert roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75
    assert pair_counting_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75


def test_auc_extremes():
    assert roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert roc_auc([0.5] * 5, [0, 1, 1, 0, 1]) == 0.5
    assert roc_auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0


def test_trapezoid_equals_pair_counting_on_random_instances():
    rng = np.random.default_rng(12345)
    for _ in range(1000):
        scores, labels = _random_instance(rng, int(rng.integers(2, 51)))
        assert abs(roc_auc(scores, labels) - pair_counting_auc(scores, labels)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.integers(2, 50))
def test_auc_invariant_under_increasing_transform(seed, size):
    rng = np.random.default_rng(seed)
    scores, labels = _random_instance(rng, size)
    base = roc_auc(scores, labels)
    assert roc_auc(np.exp(3.0 * scores) - 7.0, labels) == base
    assert roc_auc(scores ** 3, labels) == base


def test_auc_of_negated_scores_is_complement_without_ties():
    rng = np.random.default_rng(7)
    for _ in range(50):
        labels = rng.integers(0, 2, 30)
        labels[:2] = [0, 1]
        scores = rng.permutation(30) / 30.0
        assert roc_auc(scores, labels) + roc_auc(-scores, labels) == pytest.approx(1.0, abs=1e-12)


#-------------------------------------------------------------------------------

def test_f1_hand_arithmetic():
    # tp=2, fp=1, fn=1, tn=1
    scores = [0.9, 0.8, 0.7, 0.2, 0.1]
    labels = [1, 1, 0, 1, 0]
    counts = confusion(scores, labels)
    assert (counts['tp'], counts['fp'], counts['fn'], counts['tn']) == (2, 1, 1, 1)
    assert counts['precision'] == pytest.approx(2 / 3)
    assert counts['recall'] == pytest.approx(2 / 3)
    assert f1_score(scores, labels) == pytest.approx(2 / 3)


def test_f1_degenerate_cases():
    assert f1_score([0.9, 0.1], [1, 0]) == 1.0
    assert f1_score([0.1, 0.2], [1, 0]) == 0.0
    assert f1_score([0.9, 0.8], [0, 0]) == 0.0


def test_threshold_is_inclusive():
    assert confusion([0.5], [1])['tp'] == 1


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.integers(1, 40))
def test_f1_bounds(seed, size):
    rng = np.random.default_rng(seed)
    scores = rng.random(size)
    labels = rng.integers(0, 2, size)
    value = f1_score(scores, labels)
    counts = confusion(scores, labels)
    assert 0.0 <= value <= 1.0
    assert (value == 1.0) == (counts['fp'] == 0 and counts['fn'] == 0 and counts['tp'] > 0)


def test_balanced_accuracy():
    counts = confusion([0.9, 0.9, 0.1, 0.1, 0.9], [1, 1, 0, 0, 0])
    assert counts['bal_acc'] == pytest.approx((1.0 + 2 / 3) / 2)


#-------------------------------------------------------------------------------

def _windows_with_labels(labels):
    X = np.zeros((len(labels), 3, 9))
    X[:, 0, 0] = labels
    return X, np.asarray(labels)


def test_evaluate_constant_scorer():
    X, y = _windows_with_labels([0, 1, 1, 0, 1])
    report = evaluate(ConstantScorer(0.5), X, y, model_tag='gru', user_tag='001', scenario_tag='low')
    assert report.auc == 0.5
    assert len(report.roc_points) == 2
    assert report.class_counts == {0: 2, 1: 3}
    assert (report.model_tag, report.user_tag, report.scenario_tag) == ('gru', '001', 'low')


def test_evaluate_oracle_scorer():
    X, y = _windows_with_labels([0, 1, 1, 0, 1, 0])
    report = evaluate(OracleScorer(), X, y)
    assert report.auc == 1.0
    assert report.f1 == 1.0
    assert report.bal_acc == 1.0


def test_evaluate_matches_direct_metrics():
    rng = np.random.default_rng(3)
    scores, labels = _random_instance(rng, 30)
    report = evaluate_scores(scores, labels)
    assert report.auc == roc_auc(scores, labels)
    assert report.f1 == f1_score(scores, labels)


def test_evaluate_empty_set():
    with pytest.raises(FrameEmptyError):
        evaluate(ConstantScorer(0.5), np.zeros((0, 3, 9)), np.zeros(0))


def test_report_json_and_roc_csv(tmp_path):
    rng = np.random.default_rng(4)
    scores, labels = _random_instance(rng, 25)
    report = evaluate_scores(scores, labels, model_tag='rf', user_tag='004', scenario_tag='both')

    restored = read_eval_report(write_eval_report(report, tmp_path / 'report.json'))
    assert restored == report

    table = pd.read_csv(write_roc_csv(report, tmp_path / 'roc.csv'))
    assert list(table.columns) == list(ROC_COLUMNS)
    assert len(table) == len(report.roc_points)
    assert np.isinf(table['threshold'][0])
