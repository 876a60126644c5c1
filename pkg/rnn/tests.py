import math
import numpy as np
import pytest
from django.apps import apps
from utils.helpers import ShapeMismatchError, SingleClassError, UnknownModelError, derive_seed
from .helpers import *


def _toy_set(count=64, length=10, seed=0):
    rng = np.random.default_rng(seed)
    y = np.tile([0.0, 1.0], count // 2)
    X = rng.normal(0.0, 0.1, (count, length, 9))
    X[:, :, 3] += np.where(y == 1, 1.0, -1.0)[:, np.newaxis]
    return X, y


def _zero_params(cell, input_width=9, hidden_units=2):
    return {name: np.zeros_like(value) for name, value in init_params(cell, input_width, hidden_units, 0).items()}


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('cell', ['gru', 'lstm'])
def test_zero_parameters_score_one_half(cell):
    model = RnnModel(config=RnnConfig(cell=cell, hidden_units=2), params=_zero_params(cell))
    window = np.random.default_rng(1).normal(size=(40, 9))
    assert rnn_forward(model, window) == 0.5


def test_one_unit_gru_matches_hand_evaluation():
    params = {
        'Wz': np.array([[0.5]]), 'Uz': np.array([[0.3]]), 'bz': np.array([0.1]),
        'Wr': np.array([[-0.3]]), 'Ur': np.array([[0.2]]), 'br': np.array([0.2]),
        'Wh': np.array([[0.8]]), 'Uh': np.array([[0.4]]), 'bh': np.array([-0.1]),
        'w_out': np.array([1.5]), 'b_out': np.array([-0.2]),
    }
    model = RnnModel(config=RnnConfig(cell='gru', input_width=1, hidden_units=1), params=params)

    def logistic(a):
        return 1.0 / (1.0 + math.exp(-a))

    x, h = 0.7, 0.0
    update = logistic(0.5 * x + 0.3 * h + 0.1)
    reset = logistic(-0.3 * x + 0.2 * h + 0.2)
    candidate = math.tanh(0.8 * x + 0.4 * (reset * h) - 0.1)
    h = (1 - update) * h + update * candidate
    expected = logistic(1.5 * h - 0.2)

    assert rnn_forward(model, np.array([[x]])) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize('cell', ['gru', 'lstm'])
def test_scores_in_open_unit_interval_and_forward_is_pure(cell):
    config = RnnConfig(cell=cell, hidden_units=6)
    model = RnnModel(config=config, params=init_params(cell, 9, 6, 3))
    X = np.random.default_rng(2).normal(0.0, 3.0, (20, 15, 9))
    scores = model.score_windows(X)
    assert np.all((scores > 0) & (scores < 1))
    assert np.array_equal(scores, model.score_windows(X))


def test_gru_hidden_state_stays_in_unit_box():
    model = RnnModel(config=RnnConfig(cell='gru', hidden_units=5), params=init_params('gru', 9, 5, 9))
    hidden = model.hidden_states(np.random.default_rng(3).normal(0.0, 10.0, (8, 40, 9)))
    assert np.all(np.abs(hidden) <= 1.0 + 1e-12)


def test_width_mismatch_is_rejected():
    model = RnnModel(config=RnnConfig(hidden_units=2), params=_zero_params('gru'))
    with pytest.raises(ShapeMismatchError):
        model.score_windows(np.zeros((3, 40, 8)))


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('cell', ['gru', 'lstm'])
def test_training_separates_the_toy_set(cell):
    X, y = _toy_set()
    config = RnnConfig(cell=cell, hidden_units=8, epochs=30, batch_size=8, learning_rate=0.05, seed=0)
    model = train_rnn(config, X, y)
    assert len(model.loss_log) == 31
    assert model.loss_log[-1] < 0.1
    assert model.loss_log[-1] < model.loss_log[0]
    scores = model.score_windows(X)
    assert np.all(scores[y == 1] > 0.5)
    assert np.all(scores[y == 0] < 0.5)


def test_training_is_deterministic():
    X, y = _toy_set(count=16, length=6)
    config = RnnConfig(cell='lstm', hidden_units=4, epochs=3, batch_size=4, seed=42)
    first = train_rnn(config, X, y)
    second = train_rnn(config, X, y)
    for name in first.params:
        assert np.array_equal(first.params[name], second.params[name])
    assert first.loss_log == second.loss_log


def test_uninformative_start_loss_is_near_ln2():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(64, 40, 9))
    y = np.tile([0.0, 1.0], 32)
    model = train_rnn(RnnConfig(epochs=0, seed=11), X, y)
    assert model.loss_log[0] == pytest.approx(math.log(2), abs=0.1)


def test_zero_learning_rate_leaves_parameters_unchanged():
    X, y = _toy_set(count=16, length=6)
    config = RnnConfig(hidden_units=4, epochs=2, batch_size=4, seed=7).model_copy(update={'learning_rate': 0.0})
    model = train_rnn(config, X, y)
    initial = init_params('gru', 9, 4, derive_seed(7, 'init'))
    for name, value in initial.items():
        assert np.array_equal(model.params[name], value)


def test_single_class_training_is_rejected():
    X, _ = _toy_set(count=8, length=4)
    with pytest.raises(SingleClassError):
        train_rnn(RnnConfig(hidden_units=2, epochs=1), X, np.zeros(8))


def test_balanced_weight_is_inverse_class_ratio():
    y = np.array([0] * 10 + [1] * 90)
    assert positive_weight(RnnConfig(class_weighting='balanced'), y) == pytest.approx(10 / 90)
    assert positive_weight(RnnConfig(), y) == 1.0


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('cell', ['gru', 'lstm'])
@pytest.mark.parametrize('seed', range(20))
def test_gradient_check_tiny_nets(cell, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(4, 5, 9))
    y = np.array([0.0, 1.0, 1.0, 0.0])
    config = RnnConfig(cell=cell, hidden_units=3, seed=seed)
    assert gradient_check(config, X, y) < 1e-4


@pytest.mark.parametrize('cell', ['gru', 'lstm'])
def test_readout_bias_gradient_closed_form(cell):
    config = RnnConfig(cell=cell, hidden_units=2)
    params = _zero_params(cell)
    X = np.zeros((1, 5, 9))
    for label, expected in ((1.0, -0.5), (0.0, 0.5)):
        _, grads = loss_and_grads(config, params, X, np.array([label]))
        assert grads['b_out'][0] == expected
        assert gradient_check(config, X, np.array([label]), params=params) < 1e-4


def test_gradient_check_refuses_large_nets():
    with pytest.raises(ShapeMismatchError):
        gradient_check(RnnConfig(hidden_units=8), np.zeros((2, 3, 9)), np.array([0.0, 1.0]))


#-------------------------------------------------------------------------------

@pytest.mark.parametrize('cell', ['gru', 'lstm'])
def test_json_round_trip_is_value_faithful(cell, tmp_path):
    X, y = _toy_set(count=16, length=6)
    model = train_rnn(RnnConfig(cell=cell, hidden_units=3, epochs=1, batch_size=8, seed=1), X, y)
    restored = load_rnn(save_rnn(model, tmp_path / 'model.json'))
    for name in model.params:
        assert np.array_equal(model.params[name], restored.params[name])
    assert np.array_equal(model.score_windows(X), restored.score_windows(X))
    assert restored.config == model.config
    assert restored.loss_log == model.loss_log


def test_foreign_document_is_rejected():
    with pytest.raises(UnknownModelError):
        RnnModel.from_dict({'format': 'mousetrust.forest', 'version': 1})


def test_app_config_does_not_shadow_the_training_config():
    app_config = apps.get_app_config('rnn')
    assert type(app_config).__name__ == 'RnnAppConfig'
    assert RnnConfig is not type(app_config)
    assert RnnConfig().hidden_units == 32
