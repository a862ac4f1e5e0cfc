from typing import List, Tuple

import numpy as np

from .tensor import Tensor
from .tensor_ops import add, concat, matmul, mul, sigmoid, tanh


def lstm_cell(x: Tensor, h: Tensor, c: Tensor, W_x: Tensor, W_h: Tensor, b: Tensor) -> Tuple[Tensor, Tensor]:
    """
    One LSTM step. Gate blocks of the [4 H] pre-activation are ordered input, forget, cell, output:

        i = sigmoid(.), f = sigmoid(.), g = tanh(.), o = sigmoid(.)
        c' = f * c + i * g
        h' = o * tanh(c')
    """
    hidden = h.shape[-1]
    gates = add(add(matmul(x, W_x), matmul(h, W_h)), b)

    i = sigmoid(gates[:, :hidden])
    f = sigmoid(gates[:, hidden:2 * hidden])
    g = tanh(gates[:, 2 * hidden:3 * hidden])
    o = sigmoid(gates[:, 3 * hidden:])

    c_next = add(mul(f, c), mul(i, g))
    h_next = mul(o, tanh(c_next))

    return h_next, c_next


def lstm(
        steps: List[Tensor],
        W_x: Tensor,
        W_h: Tensor,
        b: Tensor,
        reverse: bool = False) -> Tuple[List[Tensor], Tensor]:
    """
    Unroll over a list of [B x in] step inputs from zero state.

    Returns:
        (outputs, final): hidden state per step in the original time order, and the
        state after the last processed step (the first step when `reverse`).
    """
    batch = steps[0].shape[0]
    hidden = W_h.shape[0]
    h = Tensor(np.zeros((batch, hidden)))
    c = Tensor(np.zeros((batch, hidden)))
    order = range(len(steps) - 1, -1, -1) if reverse else range(len(steps))
    outputs = [None] * len(steps)

    for t in order:
        h, c = lstm_cell(steps[t], h, c, W_x, W_h, b)
        outputs[t] = h

    return outputs, h


def bilstm(
        steps: List[Tensor],
        forward_weights: Tuple[Tensor, Tensor, Tensor],
        backward_weights: Tuple[Tensor, Tensor, Tensor]) -> Tuple[List[Tensor], Tensor]:
    """
    Forward and reversed LSTMs over the same steps.

    Returns:
        (outputs, final): per-step [B x 2H] concatenations, and the concatenation of the
        forward final state with the backward final state.
    """
    forward_outputs, forward_final = lstm(steps, *forward_weights)
    backward_outputs, backward_final = lstm(steps, *backward_weights, reverse=True)
    outputs = [concat([a, b], axis=-1) for a, b in zip(forward_outputs, backward_outputs)]

    return outputs, concat([forward_final, backward_final], axis=-1)
