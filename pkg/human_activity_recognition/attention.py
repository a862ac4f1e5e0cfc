from typing import List

import numpy as np

from .layers import LayerNorm, Linear, Module, uniform_init
from .tensor import Parameter, Tensor
from .tensor_ops import add, matmul, mul, reduce_sum, relu, reshape, softmax, stack, swap_last, tanh, transpose


class MultiHeadAttention(Module):
    """Scaled dot-product self-attention with `heads` heads over [B x S x d]."""

    def __init__(self, width: int, heads: int, rng: np.random.Generator):
        super().__init__()

        if width % heads != 0:
            raise ValueError(f"attention width {width} is not divisible by {heads} heads")

        self.width = width
        self.heads = heads
        self.query = Linear(width, width, rng)
        self.key = Linear(width, width, rng)
        self.value = Linear(width, width, rng)
        self.output = Linear(width, width, rng)

    def _split(self, x: Tensor) -> Tensor:
        B, S, _ = x.shape
        # [B, S, d] -> [B, H, S, d / H]
        return transpose(reshape(x, (B, S, self.heads, self.width // self.heads)), (0, 2, 1, 3))

    def __call__(self, x: Tensor) -> Tensor:
        B, S, _ = x.shape
        q = self._split(self.query(x))
        k = self._split(self.key(x))
        v = self._split(self.value(x))
        scores = mul(matmul(q, swap_last(k)), 1.0 / np.sqrt(self.width // self.heads))
        context = matmul(softmax(scores, axis=-1), v)
        context = reshape(transpose(context, (0, 2, 1, 3)), (B, S, self.width))

        return self.output(context)


class TransformerLayer(Module):
    """Post-norm encoder layer: x + attention -> norm -> x + feed-forward -> norm."""

    def __init__(self, width: int, heads: int, feed_forward: int, rng: np.random.Generator):
        super().__init__()
        self.attention = MultiHeadAttention(width, heads, rng)
        self.norm1 = LayerNorm(width)
        self.expand = Linear(width, feed_forward, rng)
        self.contract = Linear(feed_forward, width, rng)
        self.norm2 = LayerNorm(width)

    def __call__(self, x: Tensor) -> Tensor:
        x = self.norm1(add(x, self.attention(x)))

        return self.norm2(add(x, self.contract(relu(self.expand(x)))))


class AdditiveAttention(Module):
    """
    score_t = v . tanh(W h_t + b), alpha = softmax over time, context = sum_t alpha_t h_t
    """

    def __init__(self, hidden: int, attention_width: int, rng: np.random.Generator):
        super().__init__()
        self.projection = Linear(hidden, attention_width, rng)
        self.v = Parameter(uniform_init(rng, (attention_width, 1), attention_width))

    def __call__(self, outputs: List[Tensor]) -> Tensor:
        H = stack(outputs, axis=1)
        B, S, _ = H.shape
        scores = reshape(matmul(tanh(self.projection(H)), self.v), (B, S))
        alpha = reshape(softmax(scores, axis=1), (B, S, 1))

        return reduce_sum(mul(alpha, H), axis=1)
