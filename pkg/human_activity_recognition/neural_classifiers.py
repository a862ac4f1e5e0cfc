"""
The seven neural architectures. Each one is an encoder mapping the representations it
consumes to a flat feature vector, followed by the shared fully connected head

    features -> 256 -> ReLU -> 128 -> ReLU (embedding) -> Z logits
"""
from typing import Dict, List, Tuple, Type

import numpy as np

from .attention import AdditiveAttention, TransformerLayer
from .exceptions import ShapeMismatch
from .feature_store import FeatureBatch
from .layers import Conv1D, Conv2D, Linear, LSTMLayer, Module, ModuleList, uniform_init
from .LSTM_cells import bilstm
from .model_spec import ModelSpec
from .tensor import Parameter, Tensor
from .tensor_ops import add, concat, max_pool, reduce_mean, relu, reshape, transpose, unstack

NEURAL_CLASSIFIERS: Dict[str, Type["NeuralClassifier"]] = {}


def register_network(kind: str):
    def decorator(cls):
        cls.kind = kind
        NEURAL_CLASSIFIERS[kind] = cls
        return cls

    return decorator


class NeuralClassifier(Module):
    kind = None

    def __init__(self, spec: ModelSpec, rng: np.random.Generator):
        super().__init__()
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "hyperparameters", spec.hyperparameters)
        object.__setattr__(self, "num_classes", spec.num_classes)
        self.build_encoder(spec, rng)
        widths = [self.feature_width] + list(self.hyperparameters["head"])
        self.head = ModuleList([Linear(a, b, rng) for a, b in zip(widths[:-1], widths[1:])])
        self.output = Linear(widths[-1], spec.num_classes, rng)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind!r}, parameters={self.num_parameters()})"

    @property
    def embedding_width(self) -> int:
        return list(self.hyperparameters["head"])[-1]

    def build_encoder(self, spec: ModelSpec, rng: np.random.Generator) -> None:
        raise NotImplementedError

    def encode(self, batch: FeatureBatch) -> Tensor:
        raise NotImplementedError

    def _temporal(self, batch: FeatureBatch) -> Tensor:
        values = batch.representation("temporal")
        shape = self.spec.input_shape

        if values.ndim != 3 or values.shape[1:] != (shape.window_size, shape.channels):
            raise ShapeMismatch(
                f"{self.kind} expects temporal batches [B x {shape.window_size} x {shape.channels}], got {values.shape}"
            )

        return Tensor(values)

    def _statistical(self, batch: FeatureBatch) -> Tensor:
        values = batch.representation("statistical")

        if values.ndim != 2 or values.shape[1] != 4 * self.spec.input_shape.channels:
            raise ShapeMismatch(f"{self.kind} expects statistical batches [B x {4 * self.spec.input_shape.channels}], got {values.shape}")

        return Tensor(values)

    def _spectral(self, batch: FeatureBatch) -> Tensor:
        values = batch.representation("spectral")
        shape = self.spec.input_shape
        expected = (shape.scales, shape.window_size, shape.channels)

        if values.ndim != 4 or values.shape[1:] != expected:
            raise ShapeMismatch(f"{self.kind} expects spectral batches [B x {' x '.join(map(str, expected))}], got {values.shape}")

        # [B, K, S, C] -> [B, C, K, S]: channels become image planes
        return transpose(Tensor(values), (0, 3, 1, 2))

    def embed(self, batch: FeatureBatch) -> Tensor:
        """Penultimate activations [B x 128]."""
        x = self.encode(batch)

        for layer in self.head:
            x = relu(layer(x))

        return x

    def logits_and_embedding(self, batch: FeatureBatch) -> Tuple[Tensor, Tensor]:
        embedding = self.embed(batch)

        return self.output(embedding), embedding

    def __call__(self, batch: FeatureBatch) -> Tensor:
        return self.logits_and_embedding(batch)[0]


@register_network("lstm")
class LSTMNetwork(NeuralClassifier):
    """One LSTM layer; the final hidden state feeds the head."""

    def build_encoder(self, spec, rng):
        self.lstm = LSTMLayer(spec.input_shape.channels, self.hyperparameters["hidden"], rng)
        object.__setattr__(self, "feature_width", self.hyperparameters["hidden"])

    def encode(self, batch):
        _, final = self.lstm(unstack(self._temporal(batch), axis=1))

        return final


@register_network("bilstm")
class BiLSTMNetwork(NeuralClassifier):
    """Stacked bidirectional layers; the last layer's forward and backward final states are concatenated."""

    def build_encoder(self, spec, rng):
        hidden = self.hyperparameters["hidden"]
        widths = [spec.input_shape.channels] + [2 * hidden] * (self.hyperparameters["layers"] - 1)
        self.forward_layers = ModuleList([LSTMLayer(width, hidden, rng) for width in widths])
        self.backward_layers = ModuleList([LSTMLayer(width, hidden, rng) for width in widths])
        object.__setattr__(self, "feature_width", 2 * hidden)

    def encode(self, batch):
        steps = unstack(self._temporal(batch), axis=1)

        for forward_layer, backward_layer in zip(self.forward_layers, self.backward_layers):
            steps, final = bilstm(steps, forward_layer.weights, backward_layer.weights)

        return final


@register_network("lstm_attention")
class LSTMAttentionNetwork(NeuralClassifier):
    """Stacked LSTM layers with additive attention pooling over every output step of the last layer."""

    def build_encoder(self, spec, rng):
        hidden = self.hyperparameters["hidden"]
        widths = [spec.input_shape.channels] + [hidden] * (self.hyperparameters["layers"] - 1)
        self.lstm_layers = ModuleList([LSTMLayer(width, hidden, rng) for width in widths])
        self.attention = AdditiveAttention(hidden, self.hyperparameters["attention_width"], rng)
        object.__setattr__(self, "feature_width", hidden)

    def encode(self, batch):
        steps = unstack(self._temporal(batch), axis=1)

        for layer in self.lstm_layers:
            steps, _ = layer(steps)

        return self.attention(steps)


@register_network("cnn1d")
class CNN1DNetwork(NeuralClassifier):
    """Two same-padded 1D convolutions with ReLU, max pooling by `pool`, flattened."""

    def build_encoder(self, spec, rng):
        filters = list(self.hyperparameters["filters"])
        kernel_size = self.hyperparameters["kernel_size"]
        widths = [spec.input_shape.channels] + filters
        self.convolutions = ModuleList([Conv1D(a, b, kernel_size, rng) for a, b in zip(widths[:-1], widths[1:])])
        pooled = spec.input_shape.window_size // self.hyperparameters["pool"]

        if pooled < 1:
            raise ShapeMismatch(f"window of {spec.input_shape.window_size} samples is shorter than the pool size")

        object.__setattr__(self, "feature_width", filters[-1] * pooled)

    def encode(self, batch):
        # [B, S, C] -> [B, C, S]
        x = transpose(self._temporal(batch), (0, 2, 1))

        for convolution in self.convolutions:
            x = relu(convolution(x))

        x = max_pool(x, self.hyperparameters["pool"])

        return reshape(x, (x.shape[0], self.feature_width))


@register_network("transformer")
class TransformerNetwork(NeuralClassifier):
    """
    Per-step linear embedding plus learned positional embeddings, post-norm encoder
    layers, mean over time.
    """

    def build_encoder(self, spec, rng):
        width = self.hyperparameters["width"]
        self.embedding = Linear(spec.input_shape.channels, width, rng)
        self.position = Parameter(uniform_init(rng, (spec.input_shape.window_size, width), width))
        self.layers = ModuleList([
            TransformerLayer(width, self.hyperparameters["heads"], self.hyperparameters["feed_forward"], rng)
            for _ in range(self.hyperparameters["layers"])
        ])
        object.__setattr__(self, "feature_width", width)

    def encode(self, batch):
        x = add(self.embedding(self._temporal(batch)), self.position)

        for layer in self.layers:
            x = layer(x)

        return reduce_mean(x, axis=1)


class ResidualBlock(Module):
    """relu(conv -> relu -> conv  +  shortcut); the shortcut is a strided 1x1 projection when the shape changes."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, stride: int, rng: np.random.Generator):
        super().__init__()
        self.first = Conv2D(in_channels, out_channels, kernel_size, rng, stride=stride)
        self.second = Conv2D(out_channels, out_channels, kernel_size, rng)
        self.projection = None

        if stride != 1 or in_channels != out_channels:
            self.projection = Conv2D(in_channels, out_channels, 1, rng, stride=stride)

    def __call__(self, x: Tensor) -> Tensor:
        inner = self.second(relu(self.first(x)))
        shortcut = x if self.projection is None else self.projection(x)

        if inner.shape != shortcut.shape:
            raise ShapeMismatch(f"residual branch {inner.shape} does not match shortcut {shortcut.shape}")

        return relu(add(inner, shortcut))


@register_network("resnet")
class ResNetwork(NeuralClassifier):
    """Scalogram image network: stem convolution, residual stages, global average pool."""

    def build_encoder(self, spec, rng):
        channels = list(self.hyperparameters["channels"])
        strides = list(self.hyperparameters["strides"])
        kernel_size = self.hyperparameters["kernel_size"]

        if len(channels) != len(strides):
            raise ShapeMismatch(f"{len(channels)} residual stages but {len(strides)} strides")

        self.stem = Conv2D(spec.input_shape.channels, channels[0], kernel_size, rng)
        widths = [channels[0]] + channels
        self.blocks = ModuleList([
            ResidualBlock(a, b, kernel_size, stride, rng)
            for a, b, stride in zip(widths[:-1], widths[1:], strides)
        ])
        object.__setattr__(self, "feature_width", channels[-1])

    def encode(self, batch):
        x = relu(self.stem(self._spectral(batch)))

        for block in self.blocks:
            x = block(x)

        return reduce_mean(x, axis=(2, 3))


@register_network("mrnet")
class MRNetwork(NeuralClassifier):
    """
    Three sub-networks, one per representation, concatenated before the head:
    temporal LSTM final state, dense layer over statistics, strided convolutions over the scalogram.
    """

    def build_encoder(self, spec, rng):
        conv_channels = list(self.hyperparameters["conv_channels"])
        conv_strides = list(self.hyperparameters["conv_strides"])
        kernel_size = self.hyperparameters["kernel_size"]
        self.lstm = LSTMLayer(spec.input_shape.channels, self.hyperparameters["lstm_hidden"], rng)
        self.dense = Linear(4 * spec.input_shape.channels, self.hyperparameters["dense"], rng)
        widths = [spec.input_shape.channels] + conv_channels
        self.convolutions = ModuleList([
            Conv2D(a, b, kernel_size, rng, stride=stride)
            for a, b, stride in zip(widths[:-1], widths[1:], conv_strides)
        ])
        object.__setattr__(
            self,
            "feature_width",
            self.hyperparameters["lstm_hidden"] + self.hyperparameters["dense"] + conv_channels[-1],
        )

    def branches(self, batch: FeatureBatch) -> List[Tensor]:
        _, temporal = self.lstm(unstack(self._temporal(batch), axis=1))
        statistical = relu(self.dense(self._statistical(batch)))
        spectral = self._spectral(batch)

        for convolution in self.convolutions:
            spectral = relu(convolution(spectral))

        return [temporal, statistical, reduce_mean(spectral, axis=(2, 3))]

    def encode(self, batch):
        return concat(self.branches(batch), axis=1)


def build_network(spec: ModelSpec, seed: int = 0) -> NeuralClassifier:
    spec.validate()

    return NEURAL_CLASSIFIERS[spec.kind](spec, np.random.default_rng(seed))
