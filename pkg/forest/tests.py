import numpy as np
import pytest
from utils.helpers import FrameEmptyError, ShapeMismatchError, UnknownModelError
from .helpers import *


def _brute_force_split(x, y):
    values = np.unique(x)
    scored = []
    for low, high in zip(values[:-1], values[1:]):
        threshold = (low + high) / 2.0
        left = y[x <= threshold]
        right = y[x > threshold]
        impurity = split_impurity(float(len(left)), float(left.sum()), float(len(y)), float(y.sum()))
        scored.append((impurity, threshold))
    best = min(impurity for impurity, _ in scored)
    return next(threshold for impurity, threshold in scored if impurity <= best + TIE_TOLERANCE), best


#-------------------------------------------------------------------------------

def test_pure_labels_give_a_single_leaf():
    tree = fit_tree(TreeConfig(), np.arange(12.0).reshape(6, 2), np.zeros(6))
    assert tree.node_count == 1
    assert tree_predict(tree, [100.0, -3.0]) == 0.0


def test_one_dimensional_split_at_midpoint():
    tree = fit_tree(TreeConfig(), np.array([[1.0], [2.0], [8.0], [9.0]]), np.array([0, 0, 1, 1]))
    assert tree.feature[0] == 0
    assert tree.threshold[0] == 5.0
    assert tree.value[tree.left[0]] == 0.0
    assert tree.value[tree.right[0]] == 1.0
    assert tree_predict(tree, [0.0]) == 0.0
    assert tree_predict(tree, [9.5]) == 1.0
    assert tree_predict(tree, [5.0]) == 0.0


def test_identical_rows_with_mixed_labels_are_unsplittable():
    tree = fit_tree(TreeConfig(), np.ones((3, 4)), np.array([0, 0, 1]))
    assert tree.node_count == 1
    assert tree.value[0] == pytest.approx(1 / 3)
    scores = tree.predict(np.random.default_rng(0).normal(size=(10, 4)))
    assert np.all(scores == scores[0])


def test_ties_prefer_lowest_feature_then_lowest_threshold():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    tree = fit_tree(TreeConfig(max_depth=1), X, np.array([0, 1, 0, 1]))
    assert tree.feature[0] == 0
    assert tree.threshold[0] == 0.5


def test_depth_one_matches_exhaustive_midpoint_search():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 200:
        n = int(rng.integers(2, 30))
        x = rng.integers(0, 12, n).astype(np.float64)
        y = rng.integers(0, 2, n)
        if len(np.unique(x)) < 2 or len(np.unique(y)) < 2:
            continue
        tree = fit_tree(TreeConfig(max_depth=1), x[:, np.newaxis], y)
        threshold, best = _brute_force_split(x, y)
        assert tree.feature[0] == 0
        assert tree.threshold[0] == threshold
        left = y[x <= threshold]
        assert split_impurity(float(len(left)), float(left.sum()), float(n), float(y.sum())) == pytest.approx(best, abs=1e-12)
        checked += 1


def test_unbounded_tree_memorizes_label_consistent_data():
    rng = np.random.default_rng(8)
    X = rng.integers(0, 4, (300, 3)).astype(np.float64)
    keys = [tuple(row) for row in X]
    label_of = {key: int(rng.integers(0, 2)) for key in keys}
    y = np.array([label_of[key] for key in keys])
    tree = fit_tree(TreeConfig(max_depth=None), X, y)
    assert np.array_equal(tree.predict(X), y.astype(np.float64))


def test_children_are_allocated_in_pairs_after_their_parent():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(200, 4))
    y = (X[:, 0] * X[:, 1] > 0).astype(np.int64)
    tree = fit_tree(TreeConfig(max_depth=4), X, y)
    internal = np.flatnonzero(tree.feature != LEAF)
    assert internal.size >= 3
    assert (tree.left[0], tree.right[0]) == (1, 2)
    assert np.all(tree.right[internal] == tree.left[internal] + 1)
    assert np.all(tree.left[internal] > internal)
    # the left child of the root is expanded before the right one
    if tree.feature[1] != LEAF:
        assert tree.left[1] == 3


def test_depth_never_exceeds_max_depth():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(200, 6))
    y = rng.integers(0, 2, 200)
    for depth in (1, 3, 5):
        assert fit_tree(TreeConfig(max_depth=depth), X, y).depth <= depth


def test_min_samples_split_stops_growth():
    X = np.array([[1.0], [2.0], [8.0], [9.0]])
    tree = fit_tree(TreeConfig(min_samples_split=5), X, np.array([0, 0, 1, 1]))
    assert tree.node_count == 1
    assert tree.value[0] == 0.5


def test_bad_inputs():
    with pytest.raises(FrameEmptyError):
        fit_tree(TreeConfig(), np.zeros((0, 3)), np.zeros(0))
    with pytest.raises(ShapeMismatchError):
        fit_tree(TreeConfig(), np.zeros((4, 3)), np.zeros(3))
    tree = fit_tree(TreeConfig(), np.array([[1.0], [2.0], [8.0], [9.0]]), np.array([0, 0, 1, 1]))
    with pytest.raises(ShapeMismatchError):
        tree.predict(np.zeros((2, 2)))


def test_balanced_weights_shift_the_leaf_fraction():
    y = np.array([0, 1, 1, 1])
    weights = class_weights(TreeConfig(class_weighting='balanced'), y)
    assert weights.tolist() == [2.0, 2.0 / 3, 2.0 / 3, 2.0 / 3]
    tree = fit_tree(TreeConfig(class_weighting='balanced'), np.ones((4, 1)), y)
    assert tree.value[0] == pytest.approx(0.5)


#-------------------------------------------------------------------------------

def _forest_data(seed=0, rows=120, width=16):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, rows)
    X = rng.normal(size=(rows, width))
    X[:, 2] += 1.5 * y
    return X, y


def test_single_member_without_randomness_equals_the_tree():
    X, y = _forest_data()
    config = TreeConfig(max_features='all', bootstrap=False, n_trees=1, seed=5)
    forest = fit_forest(config, X, y)
    tree = fit_tree(config, X, y)
    probe = np.random.default_rng(1).normal(size=(50, 16))
    assert np.array_equal(forest.predict(probe), tree.predict(probe))
    assert np.array_equal(forest.predict(X), tree.predict(X))


def test_forest_is_deterministic_and_mean_of_members():
    X, y = _forest_data(1)
    config = TreeConfig(n_trees=15, seed=9)
    first = fit_forest(config, X, y)
    second = fit_forest(config, X, y)
    probe = np.random.default_rng(2).normal(size=(40, 16))
    scores = first.predict(probe)
    assert np.array_equal(scores, second.predict(probe))
    assert first.member_seeds == second.member_seeds

    members = np.vstack([tree.predict(probe) for tree in first.trees])
    assert np.array_equal(scores, np.mean(members, axis=0))
    assert np.all((scores >= 0.0) & (scores <= 1.0))


def test_member_seeds_depend_on_index_only():
    assert member_seed(3, 0) != member_seed(3, 1)
    assert member_seed(3, 4) == member_seed(3, 4)


def test_worker_count_does_not_change_the_forest():
    X, y = _forest_data(2, rows=60)
    serial = fit_forest(TreeConfig(n_trees=6, seed=4, n_jobs=1), X, y)
    parallel = fit_forest(TreeConfig(n_trees=6, seed=4, n_jobs=2), X, y)
    for a, b in zip(serial.trees, parallel.trees):
        assert np.array_equal(a.feature, b.feature)
        assert np.array_equal(a.threshold, b.threshold)
        assert np.array_equal(a.value, b.value)


def test_forest_members_use_sqrt_feature_subsampling():
    X, y = _forest_data(3)
    forest = fit_forest(TreeConfig(n_trees=5, seed=1, max_depth=None), X, y)
    split_features = set()
    for tree in forest.trees:
        split_features |= set(tree.feature[tree.feature != LEAF].tolist())
    assert len(split_features) > 1


def test_window_tensors_are_flattened_for_scoring():
    rng = np.random.default_rng(6)
    windows = rng.normal(size=(30, 4, 9))
    y = rng.integers(0, 2, 30)
    tree = fit_tree(TreeConfig(), flat_rows(windows), y)
    assert np.array_equal(tree.score_windows(windows), tree.predict(windows.reshape(30, 36)))


#-------------------------------------------------------------------------------

def test_tree_and_forest_json_round_trip(tmp_path):
    X, y = _forest_data(4)
    tree = fit_tree(TreeConfig(max_depth=None), X, y)
    forest = fit_forest(TreeConfig(n_trees=4, seed=2), X, y)
    probe = np.random.default_rng(3).normal(size=(25, 16))

    restored_tree = load_tree_model(save_tree_model(tree, tmp_path / 'dt.json'))
    restored_forest = load_tree_model(save_tree_model(forest, tmp_path / 'rf.json'))
    assert isinstance(restored_forest, RandomForest)
    assert np.array_equal(restored_tree.predict(probe), tree.predict(probe))
    assert np.array_equal(restored_forest.predict(probe), forest.predict(probe))
    assert np.array_equal(restored_tree.threshold, tree.threshold)


def test_foreign_tree_document_is_rejected():
    with pytest.raises(UnknownModelError):
        DecisionTree.from_dict({'format': 'mousetrust.rnn', 'version': 1})
