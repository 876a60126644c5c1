from dataclasses import dataclass, field
import logging
import numpy as np
from features.helpers import NormStats
from utils.helpers import NonFiniteError, ShapeMismatchError, SingleClassError, UnknownModelError, derive_seed, make_rng, read_json, write_json
from .cells import init_params, param_names, recurrent_backward, recurrent_forward, sigmoid
from .config import RnnConfig

logger = logging.getLogger('mousetrust')

__all__ = ['MODEL_FORMAT', 'RnnModel', 'binary_cross_entropy', 'gradient_check', 'load_rnn', 'loss_and_grads', 'positive_weight', 'rnn_forward', 'save_rnn', 'train_rnn']


MODEL_FORMAT = 'mousetrust.rnn'
FORMAT_VERSION = 1


# A trained recurrent classifier. Parameters are read-only, so one model can score from many threads.
# Inputs to score_windows are expected to be normalized already; norm_stats travels with the model for that purpose.
@dataclass(frozen=True, eq=False)
class RnnModel:
    config: RnnConfig
    params: dict = field(repr=False)
    norm_stats: NormStats | None = None
    loss_log: tuple = ()

    def __post_init__(self):
        for name, value in self.params.items():
            if not np.all(np.isfinite(value)):
                raise NonFiniteError(f'parameter {name} holds non-finite values')
            value.flags.writeable = False

    @property
    def cell(self):
        return self.config.cell

    @property
    def input_width(self):
        return self.config.input_width

    @property
    def kind(self):
        return self.config.cell

    def _check(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 2:
            X = X[np.newaxis]
        if X.ndim != 3 or X.shape[-1] != self.input_width:
            raise ShapeMismatchError(f'expected windows of width {self.input_width}, got shape {X.shape}')
        return X

    # Intruder probabilities for a (N, L, width) batch
    def score_windows(self, X):
        X = self._check(X)
        logits, _, _ = recurrent_forward(self.cell, self.params, X)
        return sigmoid(logits)

    def hidden_states(self, X):
        _, hidden, _ = recurrent_forward(self.cell, self.params, self._check(X))
        return hidden

    def to_dict(self):
        return {
            'format': MODEL_FORMAT,
            'version': FORMAT_VERSION,
            'config': self.config.model_dump(mode='json'),
            'params': {name: {'shape': list(value.shape), 'values': value.ravel().tolist()} for name, value in self.params.items()},
            'norm_stats': None if self.norm_stats is None else self.norm_stats.to_dict(),
            'loss_log': list(self.loss_log),
        }

    @classmethod
    def from_dict(cls, payload):
        if payload.get('format') != MODEL_FORMAT or payload.get('version') != FORMAT_VERSION:
            raise UnknownModelError(f'not a {MODEL_FORMAT} v{FORMAT_VERSION} document: {payload.get("format")!r} v{payload.get("version")!r}')
        config = RnnConfig(**payload['config'])
        params = {}
        for name in param_names(config.cell):
            entry = payload['params'][name]
            params[name] = np.array(entry['values'], dtype=np.float64).reshape(entry['shape'])
        norm_stats = None if payload.get('norm_stats') is None else NormStats.from_dict(payload['norm_stats'])
        return cls(config=config, params=params, norm_stats=norm_stats, loss_log=tuple(payload.get('loss_log', ())))


def rnn_forward(model, window):
    return float(model.score_windows(window)[0])


#-----------------------------------------------------------------------------

# Weight on the positive (intruder) term of the loss; n_neg / n_pos in balanced mode
def positive_weight(config, y):
    if config.class_weighting != 'balanced':
        return 1.0
    positives = int(np.sum(y == 1))
    negatives = int(np.sum(y == 0))
    return negatives / positives if positives else 1.0


# Mean binary cross-entropy computed from logits: log(1 + e^-a) for label 1, log(1 + e^a) for label 0
def binary_cross_entropy(logits, y, pos_weight=1.0):
    per_window = np.where(y == 1, pos_weight * np.logaddexp(0.0, -logits), np.logaddexp(0.0, logits))
    return float(per_window.mean())


def loss_and_grads(config, params, X, y, pos_weight=1.0):
    logits, hidden, caches = recurrent_forward(config.cell, params, X)
    loss = binary_cross_entropy(logits, y, pos_weight)
    weights = np.where(y == 1, pos_weight, 1.0)
    dlogits = weights * (sigmoid(logits) - y) / X.shape[0]
    grads = recurrent_backward(config.cell, params, dlogits, hidden, caches)
    return loss, grads


def _full_loss(config, params, X, y, pos_weight):
    logits, _, _ = recurrent_forward(config.cell, params, X)
    return binary_cross_entropy(logits, y, pos_weight)


def _clip(grads, clip_norm):
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if norm > clip_norm:
        scale = clip_norm / norm
        for name in grads:
            grads[name] = grads[name] * scale
    return norm


# Backpropagation through time over full windows, Adam updates, global-norm clipping.
# Shuffle order comes from a generator seeded by (seed, 'shuffle'), so two runs with one config are bit-identical.
def train_rnn(config, X, y, norm_stats=None):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 3 or X.shape[-1] != config.input_width:
        raise ShapeMismatchError(f'expected (n, L, {config.input_width}) windows, got {X.shape}')
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatchError(f'{X.shape[0]} windows for {y.shape[0]} labels')
    if X.shape[0] < 2 or len(np.unique(y)) < 2:
        raise SingleClassError(f'training needs both classes among >= 2 windows, got labels {np.unique(y).tolist()}')

    logger.info(f'running train_rnn() ... cell: { config.cell } windows: { X.shape[0] } epochs: { config.epochs }')

    # Step 1: initialize parameters and optimizer state
    params = init_params(config.cell, config.input_width, config.hidden_units, derive_seed(config.seed, 'init'))
    first_moment = {name: np.zeros_like(value) for name, value in params.items()}
    second_moment = {name: np.zeros_like(value) for name, value in params.items()}
    shuffle_rng = make_rng(derive_seed(config.seed, 'shuffle'))
    pos_weight = positive_weight(config, y)

    loss_log = [_full_loss(config, params, X, y, pos_weight)]
    step = 0

    # Step 2: epochs of shuffled mini-batches
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(X.shape[0])
        for start in range(0, X.shape[0], config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, grads = loss_and_grads(config, params, X[batch], y[batch], pos_weight)
            if not np.isfinite(loss):
                raise NonFiniteError(f'loss became {loss} at epoch {epoch} batch starting {start}')
            grad_norm = _clip(grads, config.clip_norm)
            if not np.isfinite(grad_norm):
                raise NonFiniteError(f'gradient norm became {grad_norm} at epoch {epoch} batch starting {start}')

            step += 1
            for name in params:
                first_moment[name] = config.beta1 * first_moment[name] + (1.0 - config.beta1) * grads[name]
                second_moment[name] = config.beta2 * second_moment[name] + (1.0 - config.beta2) * grads[name] ** 2
                corrected_first = first_moment[name] / (1.0 - config.beta1 ** step)
                corrected_second = second_moment[name] / (1.0 - config.beta2 ** step)
                params[name] = params[name] - config.learning_rate * corrected_first / (np.sqrt(corrected_second) + config.epsilon)

        # Step 3: record the full-set loss after the epoch
        loss_log.append(_full_loss(config, params, X, y, pos_weight))
        logger.debug(f'running train_rnn() ... epoch { epoch } loss is: { loss_log[-1] }')

    return RnnModel(config=config, params=params, norm_stats=norm_stats, loss_log=tuple(loss_log))


#-----------------------------------------------------------------------------

# Compares BPTT gradients with central finite differences over every parameter element.
# Relative error is |a - n| / max(|a|, |n|, 1e-8); returns the maximum.
def gradient_check(config, X, y, params=None, step=1e-5):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if config.hidden_units > 4 or X.shape[0] > 4 or X.shape[1] > 5:
        raise ShapeMismatchError(f'gradient check is for tiny nets: hidden {config.hidden_units}, batch {X.shape[0]}, length {X.shape[1]}')
    if params is None:
        params = init_params(config.cell, config.input_width, config.hidden_units, derive_seed(config.seed, 'init'))
    params = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
    pos_weight = positive_weight(config, y)

    _, analytic = loss_and_grads(config, params, X, y, pos_weight)
    worst = 0.0
    for name, value in params.items():
        for index in np.ndindex(value.shape):
            original = value[index]
            value[index] = original + step
            loss_plus = _full_loss(config, params, X, y, pos_weight)
            value[index] = original - step
            loss_minus = _full_loss(config, params, X, y, pos_weight)
            value[index] = original

            numeric = (loss_plus - loss_minus) / (2.0 * step)
            a = analytic[name][index]
            error = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            worst = max(worst, error)

    logger.debug(f'running gradient_check() ... cell: { config.cell } max relative error is: { worst }')
    return worst


def save_rnn(model, path):
    return write_json(model.to_dict(), path)


def load_rnn(path):
    return RnnModel.from_dict(read_json(path))
