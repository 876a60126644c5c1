from dataclasses import replace
import hashlib
import json
import logging
from forest.helpers import DecisionTree, RandomForest, fit_forest, fit_tree, flat_rows
from forest.helpers.ensemble import FOREST_FORMAT
from forest.helpers.tree import TREE_FORMAT
from rnn.helpers import MODEL_FORMAT, RnnModel, train_rnn
from utils.helpers import UnknownModelError, read_json, write_json

logger = logging.getLogger('mousetrust')

__all__ = ['fit_model', 'load_model', 'model_digest', 'save_model']


LOADERS = {
    MODEL_FORMAT: RnnModel.from_dict,
    TREE_FORMAT: DecisionTree.from_dict,
    FOREST_FORMAT: RandomForest.from_dict,
}


# Fits one model of the given kind on normalized (n, L, 9) windows.
# Tree models see the windows flattened; every model keeps the statistics it was trained under.
def fit_model(kind, X, y, norm_stats, seed, rnn_config, tree_config):
    logger.debug(f'running fit_model() ... kind: { kind } windows: { X.shape[0] } seed is: { seed }')
    if kind in ('gru', 'lstm'):
        config = rnn_config.model_copy(update={'cell': kind, 'seed': seed})
        return train_rnn(config, X, y, norm_stats=norm_stats)

    if kind == 'dt':
        tree = fit_tree(tree_config.model_copy(update={'seed': seed}), flat_rows(X), y)
        return replace(tree, norm_stats=norm_stats)

    if kind == 'rf':
        config = tree_config.model_copy(update={'seed': seed})
        return replace(fit_forest(config, flat_rows(X), y), norm_stats=norm_stats)

    raise UnknownModelError(f'unknown model kind {kind!r}, expected one of gru, lstm, dt, rf')


def save_model(model, path):
    return write_json(model.to_dict(), path)


# Dispatches on the document's format tag
def load_model(path):
    payload = read_json(path)
    loader = LOADERS.get(payload.get('format'))
    if loader is None:
        raise UnknownModelError(f'{path}: unknown model format {payload.get("format")!r}')
    return loader(payload)


def model_digest(model):
    text = json.dumps(model.to_dict(), sort_keys=True)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()
