# morphomics/services/classifier.py
"""
Gradient boosted decision trees on binary logistic loss

Second-order boosting with exact greedy split search. Leaf weights use an
L1 soft-threshold on the gradient sum and an L2 term on the hessian sum;
positive rows have their gradient and hessian scaled by scale_pos_weight.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import expit

from morphomics.entities.gbt import (
    FeatureImportance,
    GbtConfig,
    GbtModel,
    ImportanceEntry,
    RegressionTree,
    TreeNode,
)
from morphomics.exceptions import FeatureMismatchError, TrainingDataError

logger = logging.getLogger(__name__)

_PROBABILITY_FLOOR = 1e-15


def soft_threshold(value: float, alpha: float) -> float:
    if value > alpha:
        return value - alpha
    if value < -alpha:
        return value + alpha
    return 0.0


def _check_training_data(features, labels):
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    if features.ndim != 2 or features.shape[0] == 0:
        raise TrainingDataError("training table is empty")
    if labels.shape != (features.shape[0],):
        raise TrainingDataError(f"{labels.size} labels for {features.shape[0]} rows")
    if features.shape[0] < 2:
        raise TrainingDataError("training needs at least 2 rows")
    if not np.all(np.isfinite(features)):
        raise TrainingDataError("training table holds non-finite feature values")
    if not np.all(np.isin(labels, (0, 1))):
        raise TrainingDataError("labels must be 0 or 1")
    labels = labels.astype(np.int64)
    if np.unique(labels).size < 2:
        raise TrainingDataError("training labels hold a single class")
    return features, labels


def sample_weights(labels: np.ndarray, scale_pos_weight: float) -> np.ndarray:
    return np.where(labels == 1, scale_pos_weight, 1.0)


def log_loss(labels: np.ndarray, probabilities: np.ndarray, weights: Optional[np.ndarray] = None) -> float:
    """Weighted mean binary logistic loss"""
    p = np.clip(probabilities, _PROBABILITY_FLOOR, 1.0 - _PROBABILITY_FLOOR)
    losses = -(labels * np.log(p) + (1 - labels) * np.log(1.0 - p))
    if weights is None:
        return float(losses.mean())
    return float(np.sum(weights * losses) / np.sum(weights))


class _TreeBuilder:
    """Grows one regression tree from per-row gradients and hessians"""

    def __init__(self, features: np.ndarray, grad: np.ndarray, hess: np.ndarray,
                 columns: np.ndarray, config: GbtConfig):
        self.features = features
        self.grad = grad
        self.hess = hess
        self.columns = columns
        self.config = config
        self.nodes: List[TreeNode] = []

    def _score(self, g, h):
        """Structure score: soft-thresholded gradient squared over regularized hessian"""
        alpha, lam = self.config.reg_alpha, self.config.reg_lambda
        shrunk = np.sign(g) * np.maximum(np.abs(g) - alpha, 0.0)
        denominator = h + lam
        return np.divide(shrunk * shrunk, denominator,
                         out=np.zeros_like(denominator, dtype=np.float64), where=denominator > 0)

    def _leaf_weight(self, g: float, h: float) -> float:
        denominator = h + self.config.reg_lambda
        if denominator <= 0:
            return 0.0
        return -soft_threshold(g, self.config.reg_alpha) / denominator * self.config.learning_rate

    def _best_split(self, rows: np.ndarray):
        g_total = float(self.grad[rows].sum())
        h_total = float(self.hess[rows].sum())
        parent = float(self._score(np.array([g_total]), np.array([h_total]))[0])
        best = None
        best_gain = 0.0

        for j in self.columns:
            values = self.features[rows, j]
            order = np.argsort(values, kind='mergesort')
            xs = values[order]
            gl = np.cumsum(self.grad[rows][order])[:-1]
            hl = np.cumsum(self.hess[rows][order])[:-1]
            gr = g_total - gl
            hr = h_total - hl

            valid = (xs[1:] > xs[:-1]) & (hl >= self.config.min_child_weight) \
                & (hr >= self.config.min_child_weight)
            if not valid.any():
                continue
            gain = 0.5 * (self._score(gl, hl) + self._score(gr, hr) - parent) - self.config.gamma
            gain = np.where(valid, gain, -np.inf)
            i = int(np.argmax(gain))
            # strict improvement keeps the lowest feature index, then lowest threshold
            if gain[i] > best_gain:
                low, high = float(xs[i]), float(xs[i + 1])
                threshold = 0.5 * (low + high)
                if not threshold > low:
                    threshold = high
                best_gain = float(gain[i])
                best = (int(j), threshold)
        return best, best_gain, g_total, h_total

    def grow(self, rows: np.ndarray, depth: int = 0) -> int:
        index = len(self.nodes)
        self.nodes.append(None)

        split, gain, g_total, h_total = (None, 0.0, float(self.grad[rows].sum()), float(self.hess[rows].sum()))
        if depth < self.config.max_depth and rows.size >= 2:
            split, gain, g_total, h_total = self._best_split(rows)

        if split is None:
            self.nodes[index] = TreeNode(leaf=self._leaf_weight(g_total, h_total), cover=h_total)
            return index

        feature, threshold = split
        goes_left = self.features[rows, feature] < threshold
        left = self.grow(rows[goes_left], depth + 1)
        right = self.grow(rows[~goes_left], depth + 1)
        self.nodes[index] = TreeNode(
            feature=feature, threshold=threshold, left=left, right=right,
            default_left=True, gain=gain, cover=h_total,
        )
        return index

    def build(self, rows: np.ndarray) -> RegressionTree:
        self.grow(rows)
        return RegressionTree(nodes=self.nodes)


def tree_outputs(tree: RegressionTree, features: np.ndarray) -> np.ndarray:
    """Leaf weight reached by each row"""
    nodes = tree.nodes
    feature = np.array([-1 if n.is_leaf else n.feature for n in nodes], dtype=np.int64)
    threshold = np.array([0.0 if n.is_leaf else n.threshold for n in nodes])
    left = np.array([-1 if n.is_leaf else n.left for n in nodes], dtype=np.int64)
    right = np.array([-1 if n.is_leaf else n.right for n in nodes], dtype=np.int64)
    leaf = np.array([n.leaf if n.is_leaf else 0.0 for n in nodes])

    position = np.zeros(len(features), dtype=np.int64)
    active = feature[position] >= 0
    while active.any():
        rows = np.flatnonzero(active)
        at = position[rows]
        goes_left = features[rows, feature[at]] < threshold[at]
        position[rows] = np.where(goes_left, left[at], right[at])
        active = feature[position] >= 0
    return leaf[position]


def decision_function(model: GbtModel, features: np.ndarray, n_trees: Optional[int] = None) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features.reshape(1, -1)
    if model.feature_count and features.shape[1] != model.feature_count:
        raise FeatureMismatchError(
            f"rows have {features.shape[1]} features, model expects {model.feature_count}"
        )
    margin = np.full(len(features), model.base_score)
    for tree in model.trees[:n_trees]:
        margin += tree_outputs(tree, features)
    return margin


def predict_proba_batch(model: GbtModel, features) -> np.ndarray:
    """Positive-class probability per row"""
    return expit(decision_function(model, features))


def predict_proba(model: GbtModel, row: Sequence[float]) -> float:
    """
    Positive-class probability of one feature row

    Raises:
        FeatureMismatchError: row length differs from the model's feature count
    """
    row = np.asarray(row, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(row)):
        raise ValueError("feature row holds non-finite values")
    return float(predict_proba_batch(model, row.reshape(1, -1))[0])


def train(features, labels, config: Optional[GbtConfig] = None,
          feature_names: Optional[Sequence[str]] = None) -> GbtModel:
    """
    Fit a boosted tree ensemble on binary labels

    Args:
        features: (n_rows, n_features) finite values
        labels: 0/1 per row, both classes present
        config: hyperparameters; the model is a pure function of data, config and seed
        feature_names: column names stored in the model

    Returns:
        GbtModel

    Raises:
        TrainingDataError: empty, single-class or non-finite training data
    """
    config = config or GbtConfig()
    features, labels = _check_training_data(features, labels)
    n_rows, n_features = features.shape
    names = list(feature_names) if feature_names is not None else [f"f{j}" for j in range(n_features)]
    if len(names) != n_features:
        raise TrainingDataError(f"{len(names)} feature names for {n_features} columns")

    weights = sample_weights(labels, config.scale_pos_weight)
    prevalence = float(np.sum(weights * labels) / np.sum(weights))
    base_score = float(np.log(prevalence / (1.0 - prevalence)))

    rng = np.random.default_rng(config.seed)
    margin = np.full(n_rows, base_score)
    trees: List[RegressionTree] = []
    all_rows = np.arange(n_rows)
    all_columns = np.arange(n_features)
    column_count = max(1, int(round(config.colsample_bytree * n_features)))

    for round_index in range(config.n_estimators):
        p = expit(margin)
        grad = (p - labels) * weights
        hess = p * (1.0 - p) * weights

        rows = all_rows
        if config.subsample < 1.0:
            rows = np.flatnonzero(rng.random(n_rows) < config.subsample)
            if rows.size == 0:
                rows = all_rows
        columns = all_columns
        if column_count < n_features:
            columns = np.sort(rng.choice(n_features, size=column_count, replace=False))

        tree = _TreeBuilder(features, grad, hess, columns, config).build(rows)
        trees.append(tree)
        margin += tree_outputs(tree, features)

        if logger.isEnabledFor(logging.DEBUG):
            loss = log_loss(labels, expit(margin), weights)
            logger.debug(f"Round {round_index + 1}: {len(tree.nodes)} nodes, training loss {loss:.6f}")

    logger.info(
        f"Trained {len(trees)} trees on {n_rows} rows x {n_features} features "
        f"(depth<={config.max_depth}, lr={config.learning_rate})"
    )
    return GbtModel(
        base_score=base_score,
        learning_rate=config.learning_rate,
        feature_names=names,
        config=config,
        trees=trees,
    )


def staged_log_loss(model: GbtModel, features, labels) -> List[float]:
    """Weighted training loss after 0, 1, ..., len(trees) trees"""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    weights = sample_weights(labels, model.config.scale_pos_weight)
    margin = np.full(len(features), model.base_score)
    losses = [log_loss(labels, expit(margin), weights)]
    for tree in model.trees:
        margin += tree_outputs(tree, features)
        losses.append(log_loss(labels, expit(margin), weights))
    return losses


def feature_importance(model: GbtModel) -> FeatureImportance:
    """Cumulative split gain and split count per feature, highest gain first"""
    gains = np.zeros(model.feature_count)
    counts = np.zeros(model.feature_count, dtype=np.int64)
    for tree in model.trees:
        for node in tree.internal_nodes():
            gains[node.feature] += node.gain
            counts[node.feature] += 1

    order = sorted(range(model.feature_count), key=lambda j: (-gains[j], j))
    return FeatureImportance(entries=[
        ImportanceEntry(feature=model.feature_names[j], gain=float(gains[j]), split_count=int(counts[j]))
        for j in order
    ])
