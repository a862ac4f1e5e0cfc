import logging

import colored_logging as cl
import numpy as np
from scipy import special

from .classical_classifier import ClassicalClassifier, register_classifier
from .decision_tree import CARTTree

logger = logging.getLogger(__name__)


def resolve_max_features(max_features, n_features: int):
    if max_features is None:
        return None
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(np.log2(n_features)))
    if isinstance(max_features, float):
        return max(1, int(max_features * n_features))

    return int(max_features)


@register_classifier("rf")
class RandomForestClassifier(ClassicalClassifier):
    """Bootstrap-aggregated Gini CART trees with per-node feature subsampling; averages leaf distributions."""

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        rng = np.random.default_rng(self.seed)
        n = len(labels)
        max_features = resolve_max_features(self.hyperparameters["max_features"], features.shape[1])
        self.trees = []

        for _ in range(self.hyperparameters["trees"]):
            tree_rng = np.random.default_rng(rng.integers(2 ** 63))

            if self.hyperparameters["bootstrap"]:
                counts = np.bincount(tree_rng.integers(0, n, size=n), minlength=n).astype(np.float64)
                rows = np.flatnonzero(counts)
            else:
                counts = np.ones(n)
                rows = np.arange(n)

            tree = CARTTree(
                criterion="gini",
                max_depth=self.hyperparameters["max_depth"],
                max_features=max_features,
                rng=tree_rng,
            )
            self.trees.append(tree.fit(features[rows], labels[rows], sample_weight=counts[rows], num_classes=self.num_classes))

        logger.debug(f"random forest: {len(self.trees)} trees, mean depth {np.mean([tree.depth for tree in self.trees]):.1f}")

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict_value(features) for tree in self.trees], axis=0)

    def state(self) -> dict:
        return {"trees": [tree.to_dict() for tree in self.trees]}

    def load_state(self, state: dict) -> None:
        self.trees = [CARTTree.from_dict(tree) for tree in state["trees"]]


@register_classifier("adaboost")
class AdaBoostClassifier(ClassicalClassifier):
    """
    Multi-class SAMME over depth-1 Gini stumps.
    Each stump votes for its leaf's majority class with weight log((1 - err) / err) + log(Z - 1).
    """

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        Z = self.num_classes
        rng = np.random.default_rng(self.seed)
        weights = np.full(len(labels), 1.0 / len(labels))
        self.stumps = []
        self.alphas = []

        for round_index in range(self.hyperparameters["rounds"]):
            stump = CARTTree(criterion="gini", max_depth=1, rng=rng).fit(features, labels, sample_weight=weights, num_classes=Z)
            wrong = stump.predict_value(features).argmax(axis=1) != labels
            error = float(weights[wrong].sum() / weights.sum())

            if error <= 0:
                self.stumps.append(stump)
                self.alphas.append(1.0)
                break

            if error >= 1.0 - 1.0 / Z:
                if not self.stumps:
                    self.stumps.append(stump)
                    self.alphas.append(1.0)

                logger.debug(f"AdaBoost stopped after {round_index} rounds: weak learner error {error:.3f}")
                break

            alpha = np.log((1.0 - error) / error) + np.log(Z - 1.0)
            self.stumps.append(stump)
            self.alphas.append(float(alpha))
            weights = weights * np.exp(alpha * wrong)
            weights /= weights.sum()

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        votes = np.zeros((len(features), self.num_classes))

        for stump, alpha in zip(self.stumps, self.alphas):
            votes[np.arange(len(features)), stump.predict_value(features).argmax(axis=1)] += alpha

        return votes / sum(self.alphas)

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        return special.softmax(self.decision_function(features) * (self.num_classes - 1), axis=1)

    def state(self) -> dict:
        return {"stumps": [stump.to_dict() for stump in self.stumps], "alphas": list(self.alphas)}

    def load_state(self, state: dict) -> None:
        self.stumps = [CARTTree.from_dict(stump) for stump in state["stumps"]]
        self.alphas = list(state["alphas"])


@register_classifier("gbdt")
class GradientBoostingClassifier(ClassicalClassifier):
    """
    One-vs-rest gradient boosting of the logistic loss.
    Every round fits a depth-3 regression tree per class to the residuals y - p and replaces
    its leaf values with the Newton step sum(residual) / sum(p (1 - p)).
    """

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        rng = np.random.default_rng(self.seed)
        Z = self.num_classes
        learning_rate = self.hyperparameters["learning_rate"]
        targets = (labels[:, np.newaxis] == np.arange(Z)).astype(np.float64)
        prior = np.clip(targets.mean(axis=0), 1e-6, 1 - 1e-6)
        self.initial = np.log(prior / (1.0 - prior))
        scores = np.tile(self.initial, (len(labels), 1))
        self.trees = [[] for _ in range(Z)]

        for _ in range(self.hyperparameters["rounds"]):
            probabilities = special.expit(scores)

            for class_index in range(Z):
                residual = targets[:, class_index] - probabilities[:, class_index]
                hessian = probabilities[:, class_index] * (1.0 - probabilities[:, class_index])
                tree = CARTTree(criterion="mse", max_depth=self.hyperparameters["max_depth"], rng=rng).fit(features, residual)
                leaves = tree.apply(features)
                numerator = np.bincount(leaves, weights=residual, minlength=tree.node_count)
                denominator = np.bincount(leaves, weights=hessian, minlength=tree.node_count)
                tree.value = (numerator / np.maximum(denominator, 1e-12))[:, np.newaxis]
                scores[:, class_index] += learning_rate * tree.value[leaves, 0]
                self.trees[class_index].append(tree)

        logger.debug(f"gradient boosting: {cl.val(len(self.trees[0]))} rounds x {cl.val(Z)} classes")

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        learning_rate = self.hyperparameters["learning_rate"]
        scores = np.tile(self.initial, (len(features), 1))

        for class_index, trees in enumerate(self.trees):
            for tree in trees:
                scores[:, class_index] += learning_rate * tree.predict_value(features)[:, 0]

        return scores

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        probabilities = special.expit(self.decision_function(features))

        return probabilities / probabilities.sum(axis=1, keepdims=True)

    def state(self) -> dict:
        return {
            "initial": self.initial.tolist(),
            "trees": [[tree.to_dict() for tree in trees] for trees in self.trees],
        }

    def load_state(self, state: dict) -> None:
        self.initial = np.array(state["initial"], dtype=np.float64)
        self.trees = [[CARTTree.from_dict(tree) for tree in trees] for trees in state["trees"]]
