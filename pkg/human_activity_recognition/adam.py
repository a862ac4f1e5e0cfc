from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

import numpy as np

from .constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, DEFAULT_LEARNING_RATE
from .exceptions import ShapeMismatch
from .tensor import Tensor


@dataclass
class AdamState:
    """Moments are keyed by parameter name and shaped like their parameters."""
    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    epsilon: float = ADAM_EPSILON
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
        params: Iterable[Tuple[str, Tensor]],
        grads: Dict[str, np.ndarray],
        state: AdamState) -> Dict[str, Tensor]:
    """
    One bias-corrected Adam update applied in place to the parameter values.

    Args:
        params: (name, tensor) pairs, e.g. `module.named_parameters()`.
        grads: gradient per parameter name; parameters without a gradient are left untouched.
        state: moments and step counter, updated in place.

    Returns:
        Dict[str, Tensor]: the parameters by name.
    """
    params = dict(params)
    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step

    for name, param in params.items():
        grad = grads.get(name)

        if grad is None:
            continue

        if grad.shape != param.shape:
            raise ShapeMismatch(f"gradient of {name} has shape {grad.shape}, parameter has {param.shape}")

        m = state.first_moment.get(name)
        v = state.second_moment.get(name)

        if m is None:
            m = np.zeros_like(param.values)
            v = np.zeros_like(param.values)

        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad ** 2
        state.first_moment[name] = m
        state.second_moment[name] = v

        param.values -= state.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)

    return params
