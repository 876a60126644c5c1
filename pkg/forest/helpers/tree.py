from dataclasses import dataclass, field
import logging
import numpy as np
from features.helpers import NormStats
from utils.helpers import FrameEmptyError, ShapeMismatchError, UnknownModelError, make_rng
from .config import TreeConfig

logger = logging.getLogger('mousetrust')

__all__ = ['DecisionTree', 'LEAF', 'TIE_TOLERANCE', 'check_training_data', 'class_weights', 'fit_tree', 'flat_rows', 'split_impurity', 'tree_predict']


LEAF = -1
# Candidate splits whose impurity is within this of the best count as tied; the earliest one wins
TIE_TOLERANCE = 1e-12

TREE_FORMAT = 'mousetrust.tree'
FORMAT_VERSION = 1


# Flat node arrays in allocation order: both children of a node are appended together when it splits,
# left then right, and the left subtree is expanded first. feature == LEAF marks a leaf; value is the class-1 fraction at every node.
@dataclass(frozen=True, eq=False)
class DecisionTree:
    feature: np.ndarray = field(repr=False)
    threshold: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    value: np.ndarray = field(repr=False)
    n_samples: np.ndarray = field(repr=False)
    input_width: int
    config: TreeConfig = TreeConfig()
    norm_stats: NormStats | None = None

    def __post_init__(self):
        for array in (self.feature, self.threshold, self.left, self.right, self.value, self.n_samples):
            array.flags.writeable = False

    kind = 'dt'

    @property
    def node_count(self):
        return self.feature.shape[0]

    @property
    def leaf_count(self):
        return int(np.sum(self.feature == LEAF))

    @property
    def depth(self):
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    # Scores for flat rows (n, width): value <= threshold goes left
    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[np.newaxis]
        if X.ndim != 2 or X.shape[1] != self.input_width:
            raise ShapeMismatchError(f'tree expects rows of width {self.input_width}, got shape {X.shape}')

        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while np.any(active):
            current = node[active]
            goes_left = X[rows[active], self.feature[current]] <= self.threshold[current]
            node[active] = np.where(goes_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return self.value[node].astype(np.float64)

    # Window tensors (n, L, 9) are flattened row-major first
    def score_windows(self, X):
        return self.predict(flat_rows(X))

    def to_dict(self):
        return {
            'format': TREE_FORMAT,
            'version': FORMAT_VERSION,
            'config': self.config.model_dump(mode='json'),
            'input_width': self.input_width,
            'nodes': {
                'feature': self.feature.tolist(),
                'threshold': self.threshold.tolist(),
                'left': self.left.tolist(),
                'right': self.right.tolist(),
                'value': self.value.tolist(),
                'n_samples': self.n_samples.tolist(),
            },
            'norm_stats': None if self.norm_stats is None else self.norm_stats.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload):
        if payload.get('format') != TREE_FORMAT or payload.get('version') != FORMAT_VERSION:
            raise UnknownModelError(f'not a {TREE_FORMAT} v{FORMAT_VERSION} document: {payload.get("format")!r}')
        nodes = payload['nodes']
        return cls(
            feature=np.array(nodes['feature'], dtype=np.int64),
            threshold=np.array(nodes['threshold'], dtype=np.float64),
            left=np.array(nodes['left'], dtype=np.int64),
            right=np.array(nodes['right'], dtype=np.int64),
            value=np.array(nodes['value'], dtype=np.float64),
            n_samples=np.array(nodes['n_samples'], dtype=np.int64),
            input_width=int(payload['input_width']),
            config=TreeConfig(**payload['config']),
            norm_stats=None if payload.get('norm_stats') is None else NormStats.from_dict(payload['norm_stats']),
        )


def flat_rows(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 3:
        return X.reshape(X.shape[0], -1)
    return X


def tree_predict(tree, row):
    return float(tree.predict(row)[0])


# Inverse-frequency weights n / (2 * n_class) in balanced mode, else 1
def class_weights(config, y):
    if config.class_weighting != 'balanced':
        return np.ones(y.shape[0], dtype=np.float64)
    counts = np.bincount(y.astype(np.int64), minlength=2).astype(np.float64)
    per_class = np.divide(y.shape[0], 2.0 * counts, out=np.zeros(2), where=counts > 0)
    return per_class[y.astype(np.int64)]


#-----------------------------------------------------------------------------

# Weighted child Gini for splitting after position i: left holds the first i + 1 sorted samples.
# Inputs are cumulative weight and cumulative class-1 weight; accepts arrays.
def split_impurity(left_weight, left_positive, total_weight, total_positive):
    right_weight = total_weight - left_weight
    right_positive = total_positive - left_positive
    left_gini = 2.0 * left_positive * (left_weight - left_positive) / left_weight
    right_gini = 2.0 * right_positive * (right_weight - right_positive) / right_weight
    return (left_gini + right_gini) / total_weight


def _midpoint(low, high):
    threshold = (low + high) / 2.0
    # Adjacent floats can round the midpoint up onto the upper value
    if not (low <= threshold < high):
        threshold = low
    return threshold


# Best (feature, threshold, impurity) over candidate features, or None when no feature separates the node
def _best_split(X, y, weights, candidates):
    values = X[:, candidates]
    order = np.argsort(values, axis=0, kind='stable')
    xs = np.take_along_axis(values, order, axis=0)
    cumulative_weight = np.cumsum(weights[order], axis=0)
    cumulative_positive = np.cumsum((weights * y)[order], axis=0)
    total_weight = cumulative_weight[-1, 0]
    total_positive = cumulative_positive[-1, 0]

    valid = xs[:-1] < xs[1:]
    with np.errstate(divide='ignore', invalid='ignore'):
        impurity = split_impurity(cumulative_weight[:-1], cumulative_positive[:-1], total_weight, total_positive)
    impurity = np.where(valid, impurity, np.inf)

    best = None
    for column, feature in enumerate(candidates):
        column_impurity = impurity[:, column]
        lowest = column_impurity.min()
        if not np.isfinite(lowest):
            continue
        if best is not None and not lowest < best[2] - TIE_TOLERANCE:
            continue
        position = int(np.flatnonzero(column_impurity <= lowest + TIE_TOLERANCE)[0])
        best = (int(feature), _midpoint(xs[position, column], xs[position + 1, column]), float(column_impurity[position]))
    return best


def _candidate_features(config, width, rng, default_mode):
    mode = default_mode if config.max_features == 'auto' else config.max_features
    if mode == 'all':
        return np.arange(width)
    count = max(1, int(np.floor(np.sqrt(width))))
    return np.sort(rng.choice(width, size=count, replace=False))


def check_training_data(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise FrameEmptyError(f'cannot fit a tree on input of shape {X.shape}')
    if y.shape != (X.shape[0],):
        raise ShapeMismatchError(f'{X.shape[0]} rows for labels of shape {y.shape}')
    return X, y.astype(np.float64)


# Greedy CART with Gini impurity. Nodes split while impure, under max_depth, holding at least
# min_samples_split samples and having some feature with two distinct values.
def fit_tree(config, X, y, sample_weights=None, default_features='all', seed=None):
    X, y = check_training_data(X, y)
    weights = class_weights(config, y) if sample_weights is None else np.asarray(sample_weights, dtype=np.float64)
    rng = make_rng(config.seed if seed is None else seed)
    width = X.shape[1]

    feature, threshold, left, right, value, n_samples = [], [], [], [], [], []

    def new_node(indices):
        node_weight = weights[indices].sum()
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float((weights[indices] * y[indices]).sum() / node_weight) if node_weight > 0 else 0.0)
        n_samples.append(int(indices.shape[0]))
        return len(feature) - 1

    stack = [(new_node(np.arange(X.shape[0])), np.arange(X.shape[0]), 0)]
    while stack:
        node, indices, depth = stack.pop()
        fraction = value[node]
        if fraction == 0.0 or fraction == 1.0:
            continue
        if config.max_depth is not None and depth >= config.max_depth:
            continue
        if indices.shape[0] < config.min_samples_split:
            continue

        candidates = _candidate_features(config, width, rng, default_features)
        split = _best_split(X[indices], y[indices], weights[indices], candidates)
        if split is None:
            continue

        split_feature, split_threshold, _ = split
        goes_left = X[indices, split_feature] <= split_threshold
        left_node = new_node(indices[goes_left])
        right_node = new_node(indices[~goes_left])
        feature[node] = split_feature
        threshold[node] = split_threshold
        left[node] = left_node
        right[node] = right_node
        # Right pushed first so the left subtree is grown first
        stack.append((right_node, indices[~goes_left], depth + 1))
        stack.append((left_node, indices[goes_left], depth + 1))

    tree = DecisionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        n_samples=np.array(n_samples, dtype=np.int64),
        input_width=width,
        config=config,
    )
    logger.debug(f'running fit_tree() ... rows: { X.shape[0] } nodes: { tree.node_count } depth: { tree.depth }')
    return tree
