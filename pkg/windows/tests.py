import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st
from features.helpers import FEATURE_COLUMNS, FeatureFrame
from utils.helpers import StratificationError, UnknownTargetError, UsageError
from .helpers import *


def _frame(rows, session='001-pb-001', offset=0.0):
    values = np.arange(rows * 9, dtype=np.float64).reshape(rows, 9) + offset
    return FeatureFrame(user_session_id=session, rows=values, timestamps=np.arange(rows, dtype=np.float64))


def _groups(target_windows=10, other_windows=90, length=4):
    groups = {'018': [Window(np.zeros((length, 9)), '018-pb-001', i * length) for i in range(target_windows)]}
    others = ['001', '002', '003']
    for i in range(other_windows):
        user = others[i % len(others)]
        groups.setdefault(user, []).append(Window(np.full((length, 9), float(i)), f'{user}-pb-{i % 4:03d}', 0))
    return groups


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('rows,length,stride,starts', [
    (100, 40, 40, [0, 40]),
    (39, 40, 40, []),
    (100, 40, 20, [0, 20, 40, 60]),
    (40, 40, 40, [0]),
])
def test_make_windows_starts(rows, length, stride, starts):
    windows = make_windows(_frame(rows), length, stride)
    assert [window.start for window in windows] == starts
    assert all(window.rows.shape == (length, 9) for window in windows)
    assert window_count(rows, length, stride) == len(starts)


def test_windows_are_contiguous_slices_of_the_frame():
    frame = _frame(100)
    for window in make_windows(frame, 40, 20):
        assert np.array_equal(window.rows, frame.rows[window.start:window.start + 40])
        assert window.user_session_id == '001-pb-001'
        assert window.user_id == '001'


@pytest.mark.parametrize('length,stride', [(0, 40), (40, 0), (-1, 5)])
def test_bad_length_or_stride_is_usage_error(length, stride):
    with pytest.raises(UsageError):
        make_windows(_frame(50), length, stride)


@settings(max_examples=50, deadline=None)
@given(rows=st.integers(1, 200), length=st.integers(1, 60), stride=st.integers(1, 60))
def test_window_count_formula(rows, length, stride):
    expected = (rows - length) // stride + 1 if rows >= length else 0
    assert len(make_windows(_frame(rows), length, stride)) == expected


def test_user_windows_never_span_sessions():
    frames = {'001': [_frame(50, '001-pb-001'), _frame(50, '001-tf2-002', offset=1000.0)]}
    groups = make_user_windows(frames, 40, 40)
    assert [window.user_session_id for window in groups['001']] == ['001-pb-001', '001-tf2-002']
    assert all(window.start == 0 for window in groups['001'])


#-------------------------------------------------------------------------------

def test_label_counts_for_target():
    labeled = label_windows(_groups(), '018')
    assert len(labeled) == 100
    assert labeled.class_counts() == {AUTHENTIC: 10, INTRUDER: 90}
    assert labeled.labels.mean() == pytest.approx(1 - 10 / 100)
    for window, user, label in zip(labeled.windows, labeled.users, labeled.labels):
        assert (label == 0) == (window.user_id == '018')
        assert (label == 0) == (user == '018')


def test_all_windows_from_target_are_authentic():
    labeled = label_windows({'018': _groups()['018']}, '018')
    assert labeled.labels.tolist() == [0] * 10


def test_unknown_target_is_rejected():
    with pytest.raises(UnknownTargetError):
        label_windows(_groups(), '999')


def test_tensor_and_flat_shapes():
    labeled = label_windows(_groups(length=40), '018')
    assert labeled.tensor().shape == (100, 40, 9)
    assert labeled.flat().shape == (100, 360)


#-------------------------------------------------------------------------------

def test_flatten_is_row_major():
    window = make_windows(_frame(40), 40, 40)[0]
    flat = flatten_window(window)
    assert flat.shape == (360,)
    for r in (0, 7, 39):
        for c in range(9):
            assert flat[r * 9 + c] == window.rows[r, c]


def test_flatten_single_row_window_is_the_row():
    window = make_windows(_frame(3), 1, 1)[2]
    assert np.array_equal(flatten_window(window), window.rows[0])


def test_flatten_distinguishes_distinct_windows():
    windows = make_windows(_frame(100), 40, 10)
    flats = {flatten_window(window).tobytes() for window in windows}
    assert len(flats) == len(windows)


def test_export_labeled_csv(tmp_path):
    labeled = label_windows(_groups(target_windows=5, other_windows=6, length=2), '018')
    path = export_labeled_csv(labeled, tmp_path / 'out' / 'labeled.csv')
    table = pd.read_csv(path)
    assert list(table.columns[:9]) == [f'{name}_0' for name in FEATURE_COLUMNS]
    assert table.columns[-1] == 'label'
    assert table.shape == (11, 2 * 9 + 1)
    assert table['label'].tolist() == labeled.labels.tolist()


#-------------------------------------------------------------------------------

def test_stratified_folds_arithmetic():
    labeled = label_windows(_groups(), '018')
    plan = stratified_folds(labeled, k=5, seed=7)
    assert len(plan) == 5
    for train, test in plan:
        assert int((labeled.labels[test] == 0).sum()) == 2
        assert int((labeled.labels[test] == 1).sum()) == 18
        assert len(train) + len(test) == 100


def test_stratified_folds_partition_and_determinism():
    labeled = label_windows(_groups(target_windows=13, other_windows=58), '018')
    plan = stratified_folds(labeled, k=4, seed=3)
    again = stratified_folds(labeled, k=4, seed=3)
    tests = [test for _, test in plan]
    assert np.array_equal(np.sort(np.concatenate(tests)), np.arange(len(labeled)))
    assert sum(len(test) for test in tests) == len(labeled)
    for (train, test), (train_again, test_again) in zip(plan, again):
        assert np.array_equal(test, test_again)
        assert np.array_equal(train, train_again)
        assert not set(train.tolist()) & set(test.tolist())
    for _, test in plan:
        zeros = int((labeled.labels[test] == 0).sum())
        assert abs(zeros - 13 / 4) < 1
        assert 0 < zeros < len(test)


def test_stratified_folds_change_with_seed():
    labeled = label_windows(_groups(), '018')
    first = [test.tolist() for _, test in stratified_folds(labeled, 5, seed=1)]
    second = [test.tolist() for _, test in stratified_folds(labeled, 5, seed=2)]
    assert first != second


def test_stratification_infeasible_names_the_class():
    labeled = label_windows(_groups(target_windows=3), '018')
    with pytest.raises(StratificationError, match='class 0'):
        stratified_folds(labeled, k=5, seed=0)


def test_k_below_two_is_usage_error():
    with pytest.raises(UsageError):
        stratified_folds(label_windows(_groups(), '018'), k=1)


def test_session_holdout_keeps_sessions_together():
    groups = {
        '018': [Window(np.zeros((4, 9)), f'018-pb-{s:03d}', i) for s in range(5) for i in range(3)],
        '001': [Window(np.ones((4, 9)), f'001-pb-{s:03d}', i) for s in range(6) for i in range(2)],
    }
    labeled = label_windows(groups, '018')
    plan = session_holdout_folds(labeled, k=5, seed=11)
    sessions = np.asarray(labeled.sessions)
    seen = set()
    for train, test in plan:
        held = set(sessions[test].tolist())
        assert not held & set(sessions[train].tolist())
        assert set(labeled.labels[test].tolist()) == {0, 1}
        seen |= held
    assert seen == set(labeled.sessions)
