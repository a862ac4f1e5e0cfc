from collections import OrderedDict
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from .exceptions import CheckpointError, ShapeMismatch
from .LSTM_cells import lstm
from .tensor import Parameter, Tensor
from .tensor_ops import conv1d, conv2d, layer_norm, linear


def uniform_init(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> np.ndarray:
    """uniform(-sqrt(1 / fan_in), +sqrt(1 / fan_in))"""
    bound = np.sqrt(1.0 / fan_in)

    return rng.uniform(-bound, bound, size=shape)


class Module:
    """
    Container of named parameters and sub-modules.
    Parameter names are dotted attribute paths in assignment order.
    """

    def __init__(self):
        object.__setattr__(self, "_parameters", OrderedDict())
        object.__setattr__(self, "_modules", OrderedDict())
        object.__setattr__(self, "training", True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value

        object.__setattr__(self, name, value)

    def named_parameters(self, prefix: str = "") -> List[Tuple[str, Parameter]]:
        named = [(f"{prefix}{name}", param) for name, param in self._parameters.items()]

        for name, module in self._modules.items():
            named.extend(module.named_parameters(prefix=f"{prefix}{name}."))

        return named

    def parameters(self) -> List[Parameter]:
        return [param for _, param in self.named_parameters()]

    def num_parameters(self) -> int:
        return int(sum(param.size for param in self.parameters()))

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.grad = None

    def gradients(self) -> Dict[str, np.ndarray]:
        return {name: param.grad for name, param in self.named_parameters() if param.grad is not None}

    def train(self, mode: bool = True) -> "Module":
        object.__setattr__(self, "training", mode)

        for module in self._modules.values():
            module.train(mode)

        return self

    def eval(self) -> "Module":
        return self.train(False)

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((name, param.values.copy()) for name, param in self.named_parameters())

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        named = dict(self.named_parameters())
        missing = [name for name in named if name not in state]
        unexpected = [name for name in state if name not in named]

        if missing or unexpected:
            raise CheckpointError(f"parameter names differ: missing {missing}, unexpected {unexpected}")

        for name, param in named.items():
            values = np.asarray(state[name], dtype=np.float64)

            if values.shape != param.shape:
                raise ShapeMismatch(f"parameter {name} has shape {param.shape}, state has {values.shape}")

            param.values[...] = values


class ModuleList(Module):
    def __init__(self, modules: Sequence[Module] = ()):
        super().__init__()

        for index, module in enumerate(modules):
            setattr(self, str(index), module)

    def __iter__(self) -> Iterator[Module]:
        return iter(self._modules.values())

    def __len__(self) -> int:
        return len(self._modules)

    def __getitem__(self, index: int) -> Module:
        return list(self._modules.values())[index]


class Linear(Module):
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, bias: bool = True):
        super().__init__()
        self.weight = Parameter(uniform_init(rng, (in_features, out_features), in_features))
        self.bias = Parameter(np.zeros(out_features)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)


class Conv1D(Module):
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: np.random.Generator):
        super().__init__()
        fan_in = in_channels * kernel_size
        self.weight = Parameter(uniform_init(rng, (out_channels, in_channels, kernel_size), fan_in))
        self.bias = Parameter(np.zeros(out_channels))

    def __call__(self, x: Tensor) -> Tensor:
        return conv1d(x, self.weight, self.bias)


class Conv2D(Module):
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, rng: np.random.Generator, stride: int = 1):
        super().__init__()
        fan_in = in_channels * kernel_size * kernel_size
        self.stride = stride
        self.weight = Parameter(uniform_init(rng, (out_channels, in_channels, kernel_size, kernel_size), fan_in))
        self.bias = Parameter(np.zeros(out_channels))

    def __call__(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, stride=self.stride)


class LayerNorm(Module):
    def __init__(self, width: int):
        super().__init__()
        self.gamma = Parameter(np.ones(width))
        self.beta = Parameter(np.zeros(width))

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gamma, self.beta)


class LSTMLayer(Module):
    """
    Single-direction LSTM. W_x is [in x 4H], W_h is [H x 4H], b is [4H] with the
    forget-gate block initialized to 1.
    """

    def __init__(self, in_features: int, hidden: int, rng: np.random.Generator):
        super().__init__()
        self.hidden = hidden
        self.W_x = Parameter(uniform_init(rng, (in_features, 4 * hidden), in_features))
        self.W_h = Parameter(uniform_init(rng, (hidden, 4 * hidden), hidden))
        b = np.zeros(4 * hidden)
        b[hidden:2 * hidden] = 1.0
        self.b = Parameter(b)

    @property
    def weights(self) -> Tuple[Parameter, Parameter, Parameter]:
        return self.W_x, self.W_h, self.b

    def __call__(self, steps: List[Tensor], reverse: bool = False) -> Tuple[List[Tensor], Tensor]:
        return lstm(steps, self.W_x, self.W_h, self.b, reverse=reverse)
