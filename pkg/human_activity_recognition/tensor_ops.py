"""
Differentiable primitives. Each function computes its forward values with numpy and
registers the matching backward rule through `make_node`.
"""
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit, logsumexp

from .exceptions import ShapeMismatch
from .tensor import Tensor, as_tensor, make_node

Operand = Union[Tensor, np.ndarray, float, int]


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad


def _broadcast_shape(name: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeMismatch(f"{name}: shapes {a.shape} and {b.shape} do not broadcast")


def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    return make_node(
        a.values + b.values,
        (a, b),
        lambda grad: (unbroadcast(grad, a.shape), unbroadcast(grad, b.shape)),
    )


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    return make_node(
        a.values - b.values,
        (a, b),
        lambda grad: (unbroadcast(grad, a.shape), unbroadcast(-grad, b.shape)),
    )


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    return make_node(
        a.values * b.values,
        (a, b),
        lambda grad: (unbroadcast(grad * b.values, a.shape), unbroadcast(grad * a.values, b.shape)),
    )


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("div", a, b)
    quotient = a.values / b.values

    return make_node(
        quotient,
        (a, b),
        lambda grad: (unbroadcast(grad / b.values, a.shape), unbroadcast(-grad * quotient / b.values, b.shape)),
    )


def neg(a: Operand) -> Tensor:
    a = as_tensor(a)

    return make_node(-a.values, (a,), lambda grad: (-grad,))


def exp(a: Operand) -> Tensor:
    a = as_tensor(a)
    values = np.exp(a.values)

    return make_node(values, (a,), lambda grad: (grad * values,))


def log(a: Operand) -> Tensor:
    a = as_tensor(a)

    return make_node(np.log(a.values), (a,), lambda grad: (grad / a.values,))


def relu(a: Operand) -> Tensor:
    a = as_tensor(a)
    active = a.values > 0

    return make_node(np.where(active, a.values, 0.0), (a,), lambda grad: (grad * active,))


def sigmoid(a: Operand) -> Tensor:
    a = as_tensor(a)
    values = expit(a.values)

    return make_node(values, (a,), lambda grad: (grad * values * (1.0 - values),))


def tanh(a: Operand) -> Tensor:
    a = as_tensor(a)
    values = np.tanh(a.values)

    return make_node(values, (a,), lambda grad: (grad * (1.0 - values ** 2),))


def clip_min(a: Operand, floor: float) -> Tensor:
    """max(a, floor); the gradient passes only where a > floor. NaN entries stay NaN."""
    a = as_tensor(a)
    above = a.values > floor

    return make_node(np.maximum(a.values, floor), (a,), lambda grad: (grad * above,))


def softmax(a: Operand, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    shifted = a.values - a.values.max(axis=axis, keepdims=True)
    values = np.exp(shifted)
    values /= values.sum(axis=axis, keepdims=True)

    def backward_rule(grad):
        return (values * (grad - (grad * values).sum(axis=axis, keepdims=True)),)

    return make_node(values, (a,), backward_rule)


def log_softmax(a: Operand, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    values = a.values - logsumexp(a.values, axis=axis, keepdims=True)
    probabilities = np.exp(values)

    def backward_rule(grad):
        return (grad - probabilities * grad.sum(axis=axis, keepdims=True),)

    return make_node(values, (a,), backward_rule)


def masked_log_softmax(a: Operand, mask: np.ndarray, axis: int = -1) -> Tensor:
    """
    Log-softmax over the entries where `mask` is True; masked-out entries are
    excluded from the normalizer and their output (and gradient) is 0.
    """
    a = as_tensor(a)
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), a.shape)

    with np.errstate(invalid="ignore", over="ignore"):
        normalizer = logsumexp(np.where(mask, a.values, -np.inf), axis=axis, keepdims=True)
        values = np.where(mask, a.values - normalizer, 0.0)
        probabilities = np.where(mask, np.exp(values), 0.0)

    def backward_rule(grad):
        grad = np.where(mask, grad, 0.0)
        return (grad - probabilities * grad.sum(axis=axis, keepdims=True),)

    return make_node(values, (a,), backward_rule)


def _normalize_axis(axis, ndim: int) -> Optional[Tuple[int, ...]]:
    if axis is None:
        return None

    if isinstance(axis, int):
        axis = (axis,)

    return tuple(sorted(item % ndim for item in axis))


def reduce_sum(a: Operand, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _normalize_axis(axis, a.ndim)
    values = a.values.sum(axis=axes, keepdims=keepdims)

    def backward_rule(grad):
        if not keepdims and axes is not None:
            grad = np.expand_dims(grad, axes)

        return (np.broadcast_to(grad, a.shape).copy(),)

    return make_node(values, (a,), backward_rule)


def reduce_mean(a: Operand, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _normalize_axis(axis, a.ndim)
    count = a.size if axes is None else int(np.prod([a.shape[item] for item in axes]))

    return mul(reduce_sum(a, axis=axes, keepdims=keepdims), 1.0 / count)


def reshape(a: Operand, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)

    try:
        values = a.values.reshape(shape)
    except ValueError:
        raise ShapeMismatch(f"cannot reshape {a.shape} to {tuple(shape)}")

    return make_node(values, (a,), lambda grad: (grad.reshape(a.shape),))


def transpose(a: Operand, axes: Optional[Sequence[int]] = None) -> Tensor:
    a = as_tensor(a)

    if axes is None:
        axes = tuple(reversed(range(a.ndim)))

    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    return make_node(np.transpose(a.values, axes), (a,), lambda grad: (np.transpose(grad, inverse),))


def swap_last(a: Operand) -> Tensor:
    a = as_tensor(a)
    axes = list(range(a.ndim))
    axes[-2], axes[-1] = axes[-1], axes[-2]

    return transpose(a, axes)


def _is_fancy(index) -> bool:
    items = index if isinstance(index, tuple) else (index,)

    return any(isinstance(item, (list, np.ndarray)) for item in items)


def getitem(a: Operand, index) -> Tensor:
    a = as_tensor(a)
    values = a.values[index]
    fancy = _is_fancy(index)

    def backward_rule(grad):
        full = np.zeros_like(a.values)

        if fancy:
            np.add.at(full, index, grad)
        else:
            full[index] = grad

        return (full,)

    return make_node(np.array(values, copy=True), (a,), backward_rule)


def concat(tensors: Sequence[Operand], axis: int = -1) -> Tensor:
    tensors = [as_tensor(item) for item in tensors]

    try:
        values = np.concatenate([item.values for item in tensors], axis=axis)
    except ValueError:
        raise ShapeMismatch(f"cannot concatenate shapes {[item.shape for item in tensors]} along axis {axis}")

    boundaries = np.cumsum([item.shape[axis] for item in tensors])[:-1]

    return make_node(values, tensors, lambda grad: tuple(np.split(grad, boundaries, axis=axis)))


def stack(tensors: Sequence[Operand], axis: int = 0) -> Tensor:
    tensors = [as_tensor(item) for item in tensors]

    try:
        values = np.stack([item.values for item in tensors], axis=axis)
    except ValueError:
        raise ShapeMismatch(f"cannot stack shapes {[item.shape for item in tensors]}")

    def backward_rule(grad):
        return tuple(np.take(grad, position, axis=axis) for position in range(len(tensors)))

    return make_node(values, tensors, backward_rule)


def matmul(a: Operand, b: Operand) -> Tensor:
    """Matrix product over the last two axes with numpy batch broadcasting."""
    a, b = as_tensor(a), as_tensor(b)

    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatch(f"matmul: shapes {a.shape} and {b.shape} are not aligned")

    try:
        values = np.matmul(a.values, b.values)
    except ValueError:
        raise ShapeMismatch(f"matmul: batch shapes of {a.shape} and {b.shape} do not broadcast")

    def backward_rule(grad):
        grad_a = np.matmul(grad, np.swapaxes(b.values, -1, -2))
        grad_b = np.matmul(np.swapaxes(a.values, -1, -2), grad)

        return unbroadcast(grad_a, a.shape), unbroadcast(grad_b, b.shape)

    return make_node(values, (a, b), backward_rule)


def linear(x: Operand, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """x @ W + b with W shaped [in x out]."""
    output = matmul(x, weight)

    return output if bias is None else add(output, bias)


def euclidean_distance(a: Operand, b: Operand, axis: int = -1) -> Tensor:
    """||a - b|| along `axis`; the subgradient at zero distance is 0."""
    a, b = as_tensor(a), as_tensor(b)

    if a.shape != b.shape:
        raise ShapeMismatch(f"euclidean_distance: shapes {a.shape} and {b.shape} differ")

    difference = a.values - b.values
    distance = np.sqrt((difference ** 2).sum(axis=axis))

    def backward_rule(grad):
        safe = np.where(distance > 0, distance, 1.0)
        scale = np.where(distance > 0, grad / safe, 0.0)
        grad_a = difference * np.expand_dims(scale, axis)

        return grad_a, -grad_a

    return make_node(distance, (a, b), backward_rule)


def l2_normalize(a: Operand, axis: int = -1, epsilon: float = 1e-12) -> Tensor:
    a = as_tensor(a)
    norm = np.sqrt((a.values ** 2).sum(axis=axis, keepdims=True))
    denominator = np.maximum(norm, epsilon)
    values = a.values / denominator

    def backward_rule(grad):
        projected = grad - values * (grad * values).sum(axis=axis, keepdims=True)
        return (np.where(norm > epsilon, projected, grad) / denominator,)

    return make_node(values, (a,), backward_rule)


def layer_norm(a: Operand, gamma: Tensor, beta: Tensor, epsilon: float = 1e-5) -> Tensor:
    """Normalize over the last axis, then scale by gamma and shift by beta."""
    a = as_tensor(a)
    width = a.shape[-1]
    mean = a.values.mean(axis=-1, keepdims=True)
    centered = a.values - mean
    inverse_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + epsilon)
    normalized = centered * inverse_std
    values = normalized * gamma.values + beta.values

    def backward_rule(grad):
        grad_normalized = grad * gamma.values
        grad_a = inverse_std / width * (
            width * grad_normalized
            - grad_normalized.sum(axis=-1, keepdims=True)
            - normalized * (grad_normalized * normalized).sum(axis=-1, keepdims=True)
        )
        grad_gamma = unbroadcast(grad * normalized, gamma.shape)
        grad_beta = unbroadcast(grad, beta.shape)

        return grad_a, grad_gamma, grad_beta

    return make_node(values, (a, gamma, beta), backward_rule)


def dropout(a: Operand, rate: float, rng: np.random.Generator = None, training: bool = False) -> Tensor:
    """Inverted dropout; identity unless training with a positive rate."""
    a = as_tensor(a)

    if not training or rate <= 0:
        return a

    if rng is None:
        rng = np.random.default_rng()

    keep = (rng.random(a.shape) >= rate) / (1.0 - rate)

    return mul(a, keep)


def conv1d(x: Operand, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """
    Stride-1 cross-correlation with same padding.

    Shapes: x [N, C_in, L], weight [C_out, C_in, k], bias [C_out] -> [N, C_out, L].
    The input is padded with (k - 1) // 2 zeros on the left and the rest on the right.
    """
    x = as_tensor(x)

    if x.ndim != 3 or weight.ndim != 3 or x.shape[1] != weight.shape[1]:
        raise ShapeMismatch(f"conv1d: input {x.shape} and kernel {weight.shape} are incompatible")

    N, _, L = x.shape
    C_out, _, k = weight.shape
    pad_left = (k - 1) // 2
    padded = np.pad(x.values, ((0, 0), (0, 0), (pad_left, k - 1 - pad_left)))
    values = np.zeros((N, C_out, L))

    for offset in range(k):
        values += np.matmul(weight.values[:, :, offset], padded[:, :, offset:offset + L])

    if bias is not None:
        values += bias.values[np.newaxis, :, np.newaxis]

    def backward_rule(grad):
        grad_padded = np.zeros_like(padded)
        grad_weight = np.zeros_like(weight.values)

        for offset in range(k):
            window = padded[:, :, offset:offset + L]
            grad_weight[:, :, offset] = np.tensordot(grad, window, axes=([0, 2], [0, 2]))
            grad_padded[:, :, offset:offset + L] += np.matmul(weight.values[:, :, offset].T, grad)

        grads = [grad_padded[:, :, pad_left:pad_left + L], grad_weight]

        if bias is not None:
            grads.append(grad.sum(axis=(0, 2)))

        return tuple(grads)

    parents = (x, weight) if bias is None else (x, weight, bias)

    return make_node(values, parents, backward_rule)


def conv2d(x: Operand, weight: Tensor, bias: Optional[Tensor] = None, stride: int = 1) -> Tensor:
    """
    Cross-correlation with k // 2 zero padding on every side.

    Shapes: x [N, C_in, H, W], weight [C_out, C_in, kh, kw] -> [N, C_out, H', W'] with
    H' = (H + 2 (kh // 2) - kh) // stride + 1.
    """
    x = as_tensor(x)

    if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[1]:
        raise ShapeMismatch(f"conv2d: input {x.shape} and kernel {weight.shape} are incompatible")

    N, _, H, W = x.shape
    C_out, _, kh, kw = weight.shape
    ph, pw = kh // 2, kw // 2
    padded = np.pad(x.values, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    H_out = (H + 2 * ph - kh) // stride + 1
    W_out = (W + 2 * pw - kw) // stride + 1

    if H_out < 1 or W_out < 1:
        raise ShapeMismatch(f"conv2d: input {x.shape} is smaller than kernel {weight.shape}")

    def window(row: int, column: int) -> Tuple[slice, slice, slice, slice]:
        return (
            slice(None),
            slice(None),
            slice(row, row + stride * (H_out - 1) + 1, stride),
            slice(column, column + stride * (W_out - 1) + 1, stride),
        )

    values = np.zeros((N, H_out, W_out, C_out))

    for row in range(kh):
        for column in range(kw):
            values += np.tensordot(padded[window(row, column)], weight.values[:, :, row, column], axes=([1], [1]))

    values = np.ascontiguousarray(np.transpose(values, (0, 3, 1, 2)))

    if bias is not None:
        values += bias.values[np.newaxis, :, np.newaxis, np.newaxis]

    def backward_rule(grad):
        grad_padded = np.zeros_like(padded)
        grad_weight = np.zeros_like(weight.values)

        for row in range(kh):
            for column in range(kw):
                index = window(row, column)
                grad_weight[:, :, row, column] = np.tensordot(grad, padded[index], axes=([0, 2, 3], [0, 2, 3]))
                # [N, H', W', C_in] -> [N, C_in, H', W']
                grad_window = np.tensordot(grad, weight.values[:, :, row, column], axes=([1], [0]))
                grad_padded[index] += np.transpose(grad_window, (0, 3, 1, 2))

        grads = [grad_padded[:, :, ph:ph + H, pw:pw + W], grad_weight]

        if bias is not None:
            grads.append(grad.sum(axis=(0, 2, 3)))

        return tuple(grads)

    parents = (x, weight) if bias is None else (x, weight, bias)

    return make_node(values, parents, backward_rule)


def max_pool(a: Operand, size: int = 2) -> Tensor:
    """Non-overlapping max over windows of `size` along the last axis (remainder dropped)."""
    a = as_tensor(a)
    length = a.shape[-1] // size

    if length < 1:
        raise ShapeMismatch(f"max_pool: last axis of {a.shape} is shorter than the pool size {size}")

    windows = a.values[..., :length * size].reshape(a.shape[:-1] + (length, size))
    positions = windows.argmax(axis=-1)
    values = np.take_along_axis(windows, positions[..., np.newaxis], axis=-1)[..., 0]

    def backward_rule(grad):
        grad_windows = np.zeros_like(windows)
        np.put_along_axis(grad_windows, positions[..., np.newaxis], grad[..., np.newaxis], axis=-1)
        full = np.zeros_like(a.values)
        full[..., :length * size] = grad_windows.reshape(a.shape[:-1] + (length * size,))

        return (full,)

    return make_node(values, (a,), backward_rule)


def unstack(a: Operand, axis: int = 0) -> List[Tensor]:
    a = as_tensor(a)

    return [getitem(a, (slice(None),) * (axis % a.ndim) + (position,)) for position in range(a.shape[axis])]
