import logging
from typing import Callable, List, Sequence

import numpy as np

from .tensor import Tensor, backward, no_grad

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max|a - n| / max(max|a|, max|n|, 1e-8)"""
    scale = max(np.max(np.abs(analytic), initial=0.0), np.max(np.abs(numeric), initial=0.0), 1e-8)

    return float(np.max(np.abs(analytic - numeric), initial=0.0) / scale)


def numeric_gradient(fn: Callable[[], Tensor], tensor: Tensor, h: float = DEFAULT_STEP) -> np.ndarray:
    """Central differences of the scalar `fn()` with respect to every entry of `tensor`."""
    gradient = np.zeros_like(tensor.values)

    with no_grad():
        for index in np.ndindex(tensor.shape):
            original = tensor.values[index]
            tensor.values[index] = original + h
            upper = fn().item()
            tensor.values[index] = original - h
            lower = fn().item()
            tensor.values[index] = original
            gradient[index] = (upper - lower) / (2.0 * h)

    return gradient


def gradient_check(fn: Callable[[], Tensor], tensors: Sequence[Tensor], h: float = DEFAULT_STEP) -> List[float]:
    """
    Compare reverse-mode gradients of the scalar `fn()` against central differences.

    Returns:
        List[float]: relative error per tensor, in the given order.
    """
    for tensor in tensors:
        tensor.grad = None

    backward(fn())
    errors = []

    for tensor in tensors:
        analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.values)
        errors.append(relative_error(analytic, numeric_gradient(fn, tensor, h)))

    logger.debug(f"gradient check relative errors: {errors}")

    return errors
