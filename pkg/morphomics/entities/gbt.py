# morphomics/entities/gbt.py
"""
Gradient boosted tree configuration, model and importance entities
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MODEL_FORMAT_VERSION = 1

# reg_alpha grid explored by the tuner
REG_ALPHA_CHOICES: Tuple[float, ...] = (
    1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1, 0.5, 0.7,
    1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 80.0, 100.0,
)

TUNING_ESTIMATORS = 180
FINAL_LEARNING_RATE = 0.01
FINAL_ESTIMATORS = 1000


class GbtConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_depth: int = Field(default=6, ge=1, le=18)
    gamma: float = Field(default=0.0, ge=0, le=9)
    reg_alpha: float = Field(default=1e-5, ge=0, le=100)
    reg_lambda: float = Field(default=1.0, ge=0, le=1)
    colsample_bytree: float = Field(default=1.0, gt=0, le=1)
    min_child_weight: float = Field(default=1.0, ge=0, le=10)
    subsample: float = Field(default=1.0, gt=0, le=1)
    n_estimators: int = Field(default=100, ge=0)
    learning_rate: float = Field(default=0.3, gt=0)
    scale_pos_weight: float = Field(default=1.0, gt=0)
    seed: int = 0

    def for_final_fit(self, learning_rate: float = FINAL_LEARNING_RATE,
                      n_estimators: int = FINAL_ESTIMATORS) -> "GbtConfig":
        return self.model_copy(update={'learning_rate': learning_rate, 'n_estimators': n_estimators})


class SearchSpace(BaseModel):
    """Ranges explored by the tuner"""
    model_config = ConfigDict(frozen=True)

    max_depth: Tuple[int, int] = (3, 18)
    gamma: Tuple[float, float] = (0.0, 9.0)
    reg_alpha: Tuple[float, ...] = REG_ALPHA_CHOICES
    reg_lambda: Tuple[float, float] = (0.0, 1.0)
    colsample_bytree: Tuple[float, float] = (0.5, 1.0)
    min_child_weight: Tuple[float, float] = (0.0, 10.0)
    subsample: Tuple[float, float] = (0.5, 1.0)
    n_estimators: int = TUNING_ESTIMATORS
    learning_rate: float = 0.3

    @field_validator('max_depth', 'gamma', 'reg_lambda', 'colsample_bytree',
                     'min_child_weight', 'subsample')
    @classmethod
    def check_range(cls, value):
        low, high = value
        if low > high:
            raise ValueError(f"range lower bound {low} exceeds upper bound {high}")
        return value


class TreeNode(BaseModel):
    """Internal node when `feature` is set, leaf otherwise"""
    feature: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional[int] = None
    right: Optional[int] = None
    default_left: bool = True
    gain: float = 0.0
    cover: float = 0.0
    leaf: Optional[float] = None

    @model_validator(mode='after')
    def check_kind(self):
        internal = self.feature is not None
        if internal and (self.threshold is None or self.left is None or self.right is None):
            raise ValueError("internal node needs threshold, left and right")
        if not internal and self.leaf is None:
            raise ValueError("leaf node needs a leaf weight")
        return self

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


class RegressionTree(BaseModel):
    """Flat node list; node 0 is the root"""
    nodes: List[TreeNode]

    def depth(self) -> int:
        deepest, stack = 0, [(0, 0)]
        while stack:
            index, level = stack.pop()
            node = self.nodes[index]
            if node.is_leaf:
                deepest = max(deepest, level)
            else:
                stack.append((node.left, level + 1))
                stack.append((node.right, level + 1))
        return deepest

    def internal_nodes(self) -> List[TreeNode]:
        return [node for node in self.nodes if not node.is_leaf]


class GbtModel(BaseModel):
    version: int = MODEL_FORMAT_VERSION
    base_score: float = 0.0
    learning_rate: float = 0.3
    feature_names: List[str] = Field(default_factory=list)
    config: GbtConfig = Field(default_factory=GbtConfig)
    trees: List[RegressionTree] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_trees(self):
        n_features = len(self.feature_names)
        for tree in self.trees:
            for node in tree.internal_nodes():
                if n_features and node.feature >= n_features:
                    raise ValueError(f"node splits on feature {node.feature} of {n_features}")
        return self

    @property
    def feature_count(self) -> int:
        return len(self.feature_names)


class ImportanceEntry(BaseModel):
    feature: str
    gain: float = Field(ge=0)
    split_count: int = Field(ge=0)


class FeatureImportance(BaseModel):
    """Per-feature cumulative split gain and usage count, sorted by gain"""
    entries: List[ImportanceEntry]

    @property
    def total_gain(self) -> float:
        return sum(entry.gain for entry in self.entries)

    def gain_share(self, feature: str) -> float:
        total = self.total_gain
        for entry in self.entries:
            if entry.feature == feature:
                return entry.gain / total if total > 0 else 0.0
        raise KeyError(feature)

    def ranking(self) -> List[str]:
        return [entry.feature for entry in self.entries]
