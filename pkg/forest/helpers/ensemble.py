from dataclasses import dataclass, field
import logging
from multiprocessing import Pool
import numpy as np
from features.helpers import NormStats
from utils.helpers import UnknownModelError, derive_seed, make_rng, read_json, write_json
from .config import TreeConfig
from .tree import DecisionTree, check_training_data, class_weights, fit_tree, flat_rows

logger = logging.getLogger('mousetrust')

__all__ = ['RandomForest', 'fit_forest', 'load_tree_model', 'member_seed', 'save_tree_model']


FOREST_FORMAT = 'mousetrust.forest'
FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class RandomForest:
    trees: tuple = field(repr=False)
    member_seeds: tuple = field(repr=False)
    input_width: int
    config: TreeConfig = TreeConfig()
    norm_stats: NormStats | None = None

    kind = 'rf'

    # Arithmetic mean of the member scores
    def predict(self, X):
        member_scores = [tree.predict(X) for tree in self.trees]
        return np.mean(np.vstack(member_scores), axis=0)

    def score_windows(self, X):
        return self.predict(flat_rows(X))

    def to_dict(self):
        return {
            'format': FOREST_FORMAT,
            'version': FORMAT_VERSION,
            'config': self.config.model_dump(mode='json'),
            'input_width': self.input_width,
            'member_seeds': [str(seed) for seed in self.member_seeds],
            'trees': [tree.to_dict() for tree in self.trees],
            'norm_stats': None if self.norm_stats is None else self.norm_stats.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload):
        if payload.get('format') != FOREST_FORMAT or payload.get('version') != FORMAT_VERSION:
            raise UnknownModelError(f'not a {FOREST_FORMAT} v{FORMAT_VERSION} document: {payload.get("format")!r}')
        return cls(
            trees=tuple(DecisionTree.from_dict(tree) for tree in payload['trees']),
            member_seeds=tuple(int(seed) for seed in payload['member_seeds']),
            input_width=int(payload['input_width']),
            config=TreeConfig(**payload['config']),
            norm_stats=None if payload.get('norm_stats') is None else NormStats.from_dict(payload['norm_stats']),
        )


def member_seed(seed, index):
    return derive_seed(seed, 'member', index)


# One member: its bootstrap draw and its split-feature draws both come from the member seed
def _fit_member(args):
    config, X, y, weights, seed = args
    indices = np.arange(X.shape[0])
    if config.bootstrap:
        indices = make_rng(seed).integers(0, X.shape[0], X.shape[0])
    return fit_tree(config, X[indices], y[indices], sample_weights=weights[indices], default_features='sqrt', seed=derive_seed(seed, 'splits'))


# Bagged CART. Member i is fully determined by (seed, i), so any worker count builds the same forest.
def fit_forest(config, X, y, n_trees=None, seed=None):
    X, y = check_training_data(X, y)
    n_trees = config.n_trees if n_trees is None else n_trees
    seed = config.seed if seed is None else seed
    weights = class_weights(config, y)
    seeds = tuple(member_seed(seed, index) for index in range(n_trees))
    jobs = [(config, X, y, weights, member) for member in seeds]

    logger.info(f'running fit_forest() ... trees: { n_trees } rows: { X.shape[0] } workers: { config.n_jobs }')
    if config.n_jobs > 1:
        with Pool(processes=config.n_jobs) as pool:
            trees = pool.map(_fit_member, jobs)
    else:
        trees = [_fit_member(job) for job in jobs]

    return RandomForest(trees=tuple(trees), member_seeds=seeds, input_width=X.shape[1], config=config)


def save_tree_model(model, path):
    return write_json(model.to_dict(), path)


def load_tree_model(path):
    payload = read_json(path)
    if payload.get('format') == FOREST_FORMAT:
        return RandomForest.from_dict(payload)
    return DecisionTree.from_dict(payload)
