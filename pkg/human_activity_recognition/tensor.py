"""
Reverse-mode automatic differentiation over numpy arrays.

Every operation returns a new `Tensor` holding its float64 values, the tensors it was
computed from and a backward rule mapping the output gradient to one gradient per input.
`backward(loss)` walks the recorded graph once in reverse topological order and then
releases it.
"""
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import AutodiffError

_state = threading.local()


def grad_enabled() -> bool:
    return getattr(_state, "enabled", True)


@contextmanager
def no_grad():
    """Operations inside the block record no graph (evaluation, finite differences)."""
    previous = grad_enabled()
    _state.enabled = False

    try:
        yield
    finally:
        _state.enabled = previous


class Tensor:
    __slots__ = ("values", "requires_grad", "grad", "name", "_parents", "_backward", "_released")

    def __init__(self, values, requires_grad: bool = False, name: str = None):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[Callable] = None
        self._released = False

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def is_leaf(self) -> bool:
        return self._backward is None and not self._released

    def __len__(self) -> int:
        return self.shape[0]

    def item(self) -> float:
        return float(self.values.reshape(-1)[0]) if self.size == 1 else float(self.values)

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.values)

    def backward(self) -> List["Tensor"]:
        return backward(self)

    def __add__(self, other):
        return tensor_ops.add(self, other)

    def __radd__(self, other):
        return tensor_ops.add(other, self)

    def __sub__(self, other):
        return tensor_ops.sub(self, other)

    def __rsub__(self, other):
        return tensor_ops.sub(other, self)

    def __mul__(self, other):
        return tensor_ops.mul(self, other)

    def __rmul__(self, other):
        return tensor_ops.mul(other, self)

    def __truediv__(self, other):
        return tensor_ops.div(self, other)

    def __rtruediv__(self, other):
        return tensor_ops.div(other, self)

    def __neg__(self):
        return tensor_ops.neg(self)

    def __matmul__(self, other):
        return tensor_ops.matmul(self, other)

    def __getitem__(self, index):
        return tensor_ops.getitem(self, index)

    def sum(self, axis=None, keepdims: bool = False):
        return tensor_ops.reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        return tensor_ops.reduce_mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])

        return tensor_ops.reshape(self, shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])

        return tensor_ops.transpose(self, axes or None)

    def exp(self):
        return tensor_ops.exp(self)

    def log(self):
        return tensor_ops.log(self)

    def relu(self):
        return tensor_ops.relu(self)


class Parameter(Tensor):
    """Trainable leaf tensor."""
    __slots__ = ()

    def __init__(self, values, name: str = None):
        super().__init__(np.array(values, dtype=np.float64), requires_grad=True, name=name)


def as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value

    return Tensor(value)


def make_node(values: np.ndarray, parents: Sequence[Tensor], backward_rule: Callable) -> Tensor:
    """
    Output of an operation. `backward_rule(grad)` returns one gradient (or None) per parent.
    No graph is recorded under `no_grad` or when no parent requires gradients.
    """
    parents = tuple(parents)
    requires_grad = grad_enabled() and any(parent.requires_grad for parent in parents)
    output = Tensor(values, requires_grad=requires_grad)

    if requires_grad:
        output._parents = parents
        output._backward = backward_rule

    return output


@dataclass
class Graph:
    """Nodes reachable from a loss, parents before children."""
    nodes: List[Tensor] = field(default_factory=list)

    @classmethod
    def from_loss(cls, loss: Tensor) -> "Graph":
        order = []
        visited = set()
        stack = [(loss, False)]

        while stack:
            node, expanded = stack.pop()

            if expanded:
                order.append(node)
                continue

            if id(node) in visited:
                continue

            visited.add(id(node))
            stack.append((node, True))

            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))

        return cls(nodes=order)

    @property
    def leaves(self) -> List[Tensor]:
        return [node for node in self.nodes if node.is_leaf]

    def release(self) -> None:
        for node in self.nodes:
            if not node.is_leaf:
                node._backward = None
                node._parents = ()
                node._released = True


def backward(loss: Tensor) -> List[Tensor]:
    """
    Accumulate d(loss)/d(leaf) into `.grad` of every leaf that requires gradients.

    Returns:
        List[Tensor]: the leaves that received gradients.

    Raises:
        AutodiffError: if the loss is not a scalar, does not depend on any trainable tensor,
            or its graph was already consumed by an earlier call.
    """
    if loss.size != 1:
        raise AutodiffError(f"backward needs a scalar loss, got shape {loss.shape}")

    if loss._released:
        raise AutodiffError("the graph of this loss was already released by an earlier backward call; recompute the forward pass")

    if not loss.requires_grad:
        raise AutodiffError("loss does not depend on any tensor that requires gradients")

    graph = Graph.from_loss(loss)
    pending = {id(loss): np.ones_like(loss.values)}

    for node in reversed(graph.nodes):
        grad = pending.pop(id(node), None)

        if grad is None:
            continue

        if node._released:
            raise AutodiffError("graph contains a tensor from an already released graph")

        if node.is_leaf:
            node.grad = grad.copy() if node.grad is None else node.grad + grad
            continue

        parent_grads = node._backward(grad)

        for parent, parent_grad in zip(node._parents, parent_grads):
            if parent_grad is None or not parent.requires_grad:
                continue

            if parent_grad.shape != parent.shape:
                raise AutodiffError(f"gradient shape {parent_grad.shape} does not match tensor shape {parent.shape}")

            key = id(parent)
            pending[key] = parent_grad if key not in pending else pending[key] + parent_grad

    leaves = graph.leaves
    graph.release()

    return leaves


from . import tensor_ops  # noqa: E402
