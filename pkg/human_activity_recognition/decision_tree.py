"""
CART trees stored as flat node arrays.

Split search sorts each candidate feature once per node and scores every boundary between
distinct values with cumulative sums. Gini and squared error share the same score: with T
the weighted target rows (one-hot class weights for Gini, w * y for squared error), the best
split maximizes sum(T_left)^2 / w_left + sum(T_right)^2 / w_right.
"""
from typing import Optional

import numpy as np

from .classical_classifier import ClassicalClassifier, register_classifier

CRITERIA = ("gini", "mse")


class CARTTree:
    def __init__(
            self,
            criterion: str = "gini",
            max_depth: Optional[int] = None,
            min_samples_split: int = 2,
            max_features: Optional[int] = None,
            rng: np.random.Generator = None):
        if criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got '{criterion}'")

        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = max(2, int(min_samples_split))
        self.max_features = max_features
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.feature = np.zeros(0, dtype=np.int64)
        self.threshold = np.zeros(0)
        self.left = np.zeros(0, dtype=np.int64)
        self.right = np.zeros(0, dtype=np.int64)
        self.value = np.zeros((0, 1))

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)

        for node in range(self.node_count):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1

        return int(depths.max(initial=0))

    def _targets(self, y: np.ndarray, weights: np.ndarray, num_classes: int) -> np.ndarray:
        if self.criterion == "gini":
            targets = np.zeros((len(y), num_classes))
            targets[np.arange(len(y)), y.astype(np.int64)] = weights
            return targets

        return (weights * y)[:, np.newaxis]

    def _leaf_value(self, targets: np.ndarray, weights: np.ndarray) -> np.ndarray:
        total = targets.sum(axis=0)
        weight = weights.sum()

        return total / weight if weight > 0 else total

    def _is_pure(self, y: np.ndarray) -> bool:
        return bool(np.all(y == y[0]))

    def _best_split(self, X: np.ndarray, targets: np.ndarray, weights: np.ndarray, features: np.ndarray):
        best = (-np.inf, None, None)

        for feature in features:
            order = np.argsort(X[:, feature], kind="stable")
            xs = X[order, feature]
            valid = xs[:-1] < xs[1:]

            if not valid.any():
                continue

            left_targets = np.cumsum(targets[order], axis=0)[:-1]
            left_weights = np.cumsum(weights[order])[:-1]
            right_targets = targets.sum(axis=0) - left_targets
            right_weights = weights.sum() - left_weights

            with np.errstate(divide="ignore", invalid="ignore"):
                score = (
                    (left_targets ** 2).sum(axis=1) / left_weights
                    + (right_targets ** 2).sum(axis=1) / right_weights
                )

            score = np.where(valid & (left_weights > 0) & (right_weights > 0), score, -np.inf)
            position = int(np.argmax(score))

            if score[position] > best[0]:
                threshold = 0.5 * (xs[position] + xs[position + 1])

                # midpoint of adjacent floats can round up to the right value
                if threshold >= xs[position + 1]:
                    threshold = xs[position]

                best = (score[position], int(feature), float(threshold))

        return best[1], best[2]

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: np.ndarray = None, num_classes: int = None) -> "CARTTree":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        weights = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)

        if self.criterion == "gini" and num_classes is None:
            num_classes = int(y.max()) + 1

        targets = self._targets(y, weights, num_classes)
        n_features = X.shape[1]
        feature, threshold, left, right, value = [], [], [], [], []
        stack = [(np.arange(len(y)), 0, None, None)]

        while stack:
            rows, depth, parent, side = stack.pop()
            node = len(feature)

            if parent is not None:
                (left if side == "left" else right)[parent] = node

            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(self._leaf_value(targets[rows], weights[rows]))

            if (
                len(rows) < self.min_samples_split
                or (self.max_depth is not None and depth >= self.max_depth)
                or (self.criterion == "gini" and self._is_pure(y[rows]))
                or (self.criterion == "mse" and np.ptp(y[rows]) == 0)
            ):
                continue

            if self.max_features is not None and self.max_features < n_features:
                candidates = self.rng.choice(n_features, self.max_features, replace=False)
            else:
                candidates = np.arange(n_features)

            split_feature, split_threshold = self._best_split(X[rows], targets[rows], weights[rows], candidates)

            # search the remaining features when the sampled ones cannot split
            if split_feature is None and len(candidates) < n_features:
                remaining = np.setdiff1d(np.arange(n_features), candidates)
                split_feature, split_threshold = self._best_split(X[rows], targets[rows], weights[rows], remaining)

            if split_feature is None:
                continue

            feature[node] = split_feature
            threshold[node] = split_threshold
            goes_left = X[rows, split_feature] <= split_threshold
            stack.append((rows[~goes_left], depth + 1, node, "right"))
            stack.append((rows[goes_left], depth + 1, node, "left"))

        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold, dtype=np.float64)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.value = np.array(value, dtype=np.float64)

        return self

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row."""
        X = np.asarray(X, dtype=np.float64)
        nodes = np.zeros(len(X), dtype=np.int64)
        active = self.feature[nodes] >= 0

        while active.any():
            rows = np.flatnonzero(active)
            current = nodes[rows]
            goes_left = X[rows, self.feature[current]] <= self.threshold[current]
            nodes[rows] = np.where(goes_left, self.left[current], self.right[current])
            active = self.feature[nodes] >= 0

        return nodes

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, document: dict) -> "CARTTree":
        tree = cls(criterion=document["criterion"])
        tree.feature = np.array(document["feature"], dtype=np.int64)
        tree.threshold = np.array(document["threshold"], dtype=np.float64)
        tree.left = np.array(document["left"], dtype=np.int64)
        tree.right = np.array(document["right"], dtype=np.int64)
        tree.value = np.array(document["value"], dtype=np.float64).reshape(len(tree.feature), -1)

        return tree


@register_classifier("dt")
class DecisionTreeClassifier(ClassicalClassifier):
    """Single CART tree with Gini impurity; unlimited depth by default."""

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        self.tree = CARTTree(
            criterion="gini",
            max_depth=self.hyperparameters["max_depth"],
            min_samples_split=self.hyperparameters["min_samples_split"],
            rng=np.random.default_rng(self.seed),
        ).fit(features, labels, num_classes=self.num_classes)

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        return self.tree.predict_value(features)

    def state(self) -> dict:
        return {"tree": self.tree.to_dict()}

    def load_state(self, state: dict) -> None:
        self.tree = CARTTree.from_dict(state["tree"])
