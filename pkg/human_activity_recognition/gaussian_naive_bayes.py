import numpy as np
from scipy.special import logsumexp

from .classical_classifier import ClassicalClassifier, register_classifier


@register_classifier("gaussian_nb")
class GaussianNaiveBayes(ClassicalClassifier):
    """
    Closed-form per-class Gaussians with independent features.
    Every variance is widened by var_smoothing times the largest feature variance.
    """

    def _fit(self, features: np.ndarray, labels: np.ndarray) -> None:
        Z = self.num_classes
        F = features.shape[1]
        epsilon = self.hyperparameters["var_smoothing"] * float(features.var(axis=0).max())
        self.means = np.zeros((Z, F))
        self.variances = np.ones((Z, F))
        counts = np.bincount(labels, minlength=Z).astype(np.float64)

        for class_index in range(Z):
            rows = features[labels == class_index]

            if len(rows) == 0:
                continue

            self.means[class_index] = rows.mean(axis=0)
            self.variances[class_index] = rows.var(axis=0)

        self.variances = self.variances + max(epsilon, 1e-300)

        with np.errstate(divide="ignore"):
            self.log_priors = np.log(counts / counts.sum())

    def joint_log_likelihood(self, features: np.ndarray) -> np.ndarray:
        """log P(class) + sum_f log N(x_f; mean, variance) for every row and class [N x Z]."""
        log_normalizer = -0.5 * np.log(2.0 * np.pi * self.variances).sum(axis=1)
        squared = ((features[:, np.newaxis, :] - self.means[np.newaxis]) ** 2 / self.variances[np.newaxis]).sum(axis=2)

        return self.log_priors + log_normalizer - 0.5 * squared

    def _predict_proba(self, features: np.ndarray) -> np.ndarray:
        joint = self.joint_log_likelihood(features)

        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))

    def state(self) -> dict:
        return {
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "log_priors": [float(value) for value in self.log_priors],
        }

    def load_state(self, state: dict) -> None:
        self.means = np.array(state["means"], dtype=np.float64)
        self.variances = np.array(state["variances"], dtype=np.float64)
        self.log_priors = np.array(state["log_priors"], dtype=np.float64)
