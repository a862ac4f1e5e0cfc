"""
Classifiers trained by gradient steps on standardized statistical features:
softmax regression, a linear one-vs-rest SVM and a two-hidden-layer perceptron.
"""
import logging
from dataclasses import dataclass
from typing import List

import colored_logging as cl
import numpy as np
from scipy import special

from .adam import AdamState, adam_step
from .classical_classifier import ClassicalClassifier, register_classifier
from .layers import Linear, Module, ModuleList
from .tensor import Parameter, Tensor, backward, no_grad
from .tensor_ops import getitem, linear, log_softmax, neg, reduce_mean, relu

logger = logging.getLogger(__name__)


@dataclass
class Standardizer:
    """Per-feature z-scoring fitted on the training rows; constant features keep unit scale."""
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "Standardizer":
        scale = features.std(axis=0)
        scale[scale == 0] = 1.0

        return cls(mean=features.mean(axis=0), scale=scale)

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.scale

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, document: dict) -> "Standardizer":
        return cls(mean=np.array(document["mean"], dtype=np.float64), scale=np.array(document["scale"], dtype=np.float64))


def cross_entropy_of_logits(logits: Tensor, labels: np.ndarray) -> Tensor:
    picked = getitem(log_softmax(logits, axis=1), (np.arange(len(labels)), labels))

    return neg(reduce_mean(picked))


@register_classifier("lr")
class SoftmaxRegression(ClassicalClassifier):
    """Multinomial logistic regression, zero-initialized, full-batch Adam on the mean cross-entropy."""

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        self.standardizer = Standardizer.fit(features)
        X = self.standardizer.transform(features)
        self.weight = Parameter(np.zeros((X.shape[1], self.num_classes)))
        self.bias = Parameter(np.zeros(self.num_classes))
        state = AdamState(learning_rate=self.hyperparameters["learning_rate"])
        params = [("weight", self.weight), ("bias", self.bias)]

        for iteration in range(self.hyperparameters["iterations"]):
            self.weight.grad = None
            self.bias.grad = None
            loss = cross_entropy_of_logits(linear(X, self.weight, self.bias), labels)
            backward(loss)
            adam_step(params, {"weight": self.weight.grad, "bias": self.bias.grad}, state)

        logger.debug(f"softmax regression final training loss {cl.val(f'{loss.item():.4f}')}")

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        return self.standardizer.transform(features) @ self.weight.values + self.bias.values

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        return special.softmax(self.decision_function(features), axis=1)

    def state(self) -> dict:
        return {
            "standardizer": self.standardizer.to_dict(),
            "weight": self.weight.values.tolist(),
            "bias": self.bias.values.tolist(),
        }

    def load_state(self, state: dict) -> None:
        self.standardizer = Standardizer.from_dict(state["standardizer"])
        self.weight = Parameter(state["weight"])
        self.bias = Parameter(state["bias"])


@register_classifier("svm")
class LinearSVM(ClassicalClassifier):
    """
    Linear-kernel SVM, one binary hinge problem per class against the rest.

    Full-batch subgradient descent on  lambda/2 ||w||^2 + mean(max(0, 1 - y (w.x + b)))
    with step lr / sqrt(t); the iterates of the second half are averaged.
    """

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        self.standardizer = Standardizer.fit(features)
        X = self.standardizer.transform(features)
        N, F = X.shape
        Z = self.num_classes
        regularization = self.hyperparameters["regularization"]
        learning_rate = self.hyperparameters["learning_rate"]
        iterations = self.hyperparameters["iterations"]
        signs = np.where(labels[:, np.newaxis] == np.arange(Z), 1.0, -1.0)

        weight = np.zeros((F, Z))
        bias = np.zeros(Z)
        weight_average = np.zeros((F, Z))
        bias_average = np.zeros(Z)

        burn_in = iterations // 2

        for t in range(1, iterations + 1):
            margins = signs * (X @ weight + bias)
            violating = (margins < 1.0) * signs
            grad_weight = regularization * weight - X.T @ violating / N
            grad_bias = -violating.sum(axis=0) / N
            step = learning_rate / np.sqrt(t)
            weight -= step * grad_weight
            bias -= step * grad_bias

            if t > burn_in:
                count = t - burn_in
                weight_average += (weight - weight_average) / count
                bias_average += (bias - bias_average) / count

        self.weight = weight_average
        self.bias = bias_average

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        return self.standardizer.transform(features) @ self.weight + self.bias

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        return special.softmax(self.decision_function(features), axis=1)

    def state(self) -> dict:
        return {
            "standardizer": self.standardizer.to_dict(),
            "weight": self.weight.tolist(),
            "bias": self.bias.tolist(),
        }

    def load_state(self, state: dict) -> None:
        self.standardizer = Standardizer.from_dict(state["standardizer"])
        self.weight = np.array(state["weight"], dtype=np.float64)
        self.bias = np.array(state["bias"], dtype=np.float64)


class Perceptron(Module):
    def __init__(self, widths: List[int], rng: np.random.Generator):
        super().__init__()
        self.layers = ModuleList([Linear(a, b, rng) for a, b in zip(widths[:-1], widths[1:])])

    def __call__(self, x: Tensor) -> Tensor:
        layers = list(self.layers)

        for layer in layers[:-1]:
            x = relu(layer(x))

        return layers[-1](x)


@register_classifier("mlp")
class MLPClassifier(ClassicalClassifier):
    """ReLU perceptron with two hidden layers over statistical features, mini-batch Adam."""

    def num_parameters(self) -> int:
        return self.network.num_parameters() if hasattr(self, "network") else 0

    def _widths(self, n_features: int) -> List[int]:
        return [n_features] + list(self.hyperparameters["hidden"]) + [self.num_classes]

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        rng = np.random.default_rng(self.seed)
        self.standardizer = Standardizer.fit(features)
        X = self.standardizer.transform(features)
        self.network = Perceptron(self._widths(X.shape[1]), rng)
        state = AdamState(learning_rate=self.hyperparameters["learning_rate"])
        batch_size = self.hyperparameters["batch_size"]

        for epoch in range(self.hyperparameters["epochs"]):
            order = rng.permutation(len(labels))
            total = 0.0

            for start in range(0, len(order), batch_size):
                rows = order[start:start + batch_size]
                self.network.zero_grad()
                loss = cross_entropy_of_logits(self.network(Tensor(X[rows])), labels[rows])
                backward(loss)
                adam_step(self.network.named_parameters(), self.network.gradients(), state)
                total += loss.item() * len(rows)

            logger.debug(f"MLP epoch {epoch + 1} training loss {total / len(labels):.4f}")

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        with no_grad():
            logits = self.network(Tensor(self.standardizer.transform(features))).values

        return special.softmax(logits, axis=1)

    def state(self) -> dict:
        return {
            "standardizer": self.standardizer.to_dict(),
            "widths": self._widths(len(self.standardizer.mean)),
            "parameters": {name: values.tolist() for name, values in self.network.state_dict().items()},
        }

    def load_state(self, state: dict) -> None:
        self.standardizer = Standardizer.from_dict(state["standardizer"])
        self.network = Perceptron(state["widths"], np.random.default_rng(0))
        self.network.load_state_dict({name: np.array(values) for name, values in state["parameters"].items()})
