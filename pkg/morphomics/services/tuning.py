# morphomics/services/tuning.py
"""
Hyperparameter tuning and stratified splitting

`tune` holds out a stratified validation fraction, fits every candidate
config with the tuning round count and keeps the one with the lowest
validation logistic loss. Candidates come from a sampler; the default is a
seeded random search over SearchSpace.
"""

import logging
from typing import Iterable, List, Optional, Protocol, Tuple

import numpy as np

from morphomics.entities.gbt import GbtConfig, SearchSpace
from morphomics.exceptions import SingleClassError, TrainingDataError
from morphomics.services.classifier import log_loss, predict_proba_batch, sample_weights, train

logger = logging.getLogger(__name__)

MAX_SPLIT_ATTEMPTS = 10
DEFAULT_BUDGET = 100


def stratified_split(labels, test_fraction: float, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded split that keeps the class ratio on both sides

    Args:
        labels: 0/1 per row
        test_fraction: share of each class sent to the held-out side
        seed: permutation seed

    Returns:
        (train_indices, test_indices), each sorted ascending
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction must lie in (0, 1), got {test_fraction}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for label in (0, 1):
        members = np.flatnonzero(labels == label)
        shuffled = rng.permutation(members)
        n_test = int(round(test_fraction * len(members)))
        test_parts.append(shuffled[:n_test])
        train_parts.append(shuffled[n_test:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


class CandidateSampler(Protocol):
    """Source of candidate configs for `tune`"""

    def candidates(self, budget: int, scale_pos_weight: float, seed: int) -> Iterable[GbtConfig]:
        ...


class RandomSearchSampler:
    """Uniform draws from SearchSpace; reg_alpha picked from its discrete list"""

    def __init__(self, space: Optional[SearchSpace] = None):
        self.space = space or SearchSpace()

    def candidates(self, budget: int, scale_pos_weight: float, seed: int) -> List[GbtConfig]:
        space = self.space
        rng = np.random.default_rng(seed)
        configs = []
        for index in range(budget):
            configs.append(GbtConfig(
                max_depth=int(rng.integers(space.max_depth[0], space.max_depth[1] + 1)),
                gamma=float(rng.uniform(*space.gamma)),
                reg_alpha=float(space.reg_alpha[rng.integers(len(space.reg_alpha))]),
                reg_lambda=float(rng.uniform(*space.reg_lambda)),
                colsample_bytree=float(rng.uniform(*space.colsample_bytree)),
                min_child_weight=float(rng.uniform(*space.min_child_weight)),
                subsample=float(rng.uniform(*space.subsample)),
                n_estimators=space.n_estimators,
                learning_rate=space.learning_rate,
                scale_pos_weight=scale_pos_weight,
                seed=seed + index,
            ))
        return configs


class FixedCandidates:
    """Explicit candidate list, tried in order"""

    def __init__(self, configs: Iterable[GbtConfig]):
        self.configs = list(configs)

    def candidates(self, budget: int, scale_pos_weight: float, seed: int) -> List[GbtConfig]:
        return self.configs[:budget]


def _validation_split(labels: np.ndarray, valid_fraction: float, seed: int):
    for attempt in range(MAX_SPLIT_ATTEMPTS):
        train_rows, valid_rows = stratified_split(labels, valid_fraction, seed + attempt)
        if np.unique(labels[valid_rows]).size == 2 and np.unique(labels[train_rows]).size == 2:
            return train_rows, valid_rows
        logger.warning(f"Validation split attempt {attempt + 1} lacks a class, re-drawing")
    raise SingleClassError(f"no split with both classes on each side after {MAX_SPLIT_ATTEMPTS} attempts")


def tune(features, labels, budget: int = DEFAULT_BUDGET, valid_fraction: float = 0.2,
         sampler: Optional[CandidateSampler] = None, scale_pos_weight: float = 1.0,
         seed: int = 0, feature_names=None) -> GbtConfig:
    """
    Pick the candidate config with the lowest validation logistic loss

    Ties keep the earlier candidate. The returned config still carries the
    tuning learning rate and round count; callers switch to the final-fit
    values with GbtConfig.for_final_fit.

    Raises:
        SingleClassError: no stratified split keeps both classes on each side
    """
    if budget < 1:
        raise ValueError(f"tuning budget must be at least 1, got {budget}")
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or len(features) != len(labels):
        raise TrainingDataError("features and labels disagree in row count")

    sampler = sampler or RandomSearchSampler()
    train_rows, valid_rows = _validation_split(labels, valid_fraction, seed)
    valid_labels = labels[valid_rows]
    valid_weights = sample_weights(valid_labels, scale_pos_weight)

    best_config, best_loss = None, np.inf
    for index, config in enumerate(sampler.candidates(budget, scale_pos_weight, seed)):
        model = train(features[train_rows], labels[train_rows], config, feature_names)
        probabilities = predict_proba_batch(model, features[valid_rows])
        loss = log_loss(valid_labels, probabilities, valid_weights)
        logger.debug(f"Candidate {index + 1}: depth={config.max_depth} gamma={config.gamma:.3f} loss={loss:.6f}")
        if loss < best_loss:
            best_config, best_loss = config, loss

    if best_config is None:
        raise ValueError("sampler produced no candidate config")
    logger.info(f"Tuning kept config with validation loss {best_loss:.6f}")
    return best_config
