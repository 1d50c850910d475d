from typing import Any, Callable, Iterable, Sequence

import numpy as np

from core.errors import DimensionError, NonScalarLossError, NumericalError

DTYPES: dict[str, type[np.floating[Any]]] = {"f32": np.float32, "f64": np.float64}

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]


def resolve_dtype(name: str) -> type[np.floating[Any]]:
    """
    Maps a dtype tag ("f32" or "f64") to the numpy type.

    Raises:
        DimensionError: If the tag is unknown.
    """
    try:
        return DTYPES[name]
    except KeyError as error:
        raise DimensionError(f"unknown dtype tag: {name}") from error


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """
    Sums a broadcast gradient back down to the shape of the operand it flowed from.

    Args:
        grad (np.ndarray): The gradient in the broadcast result shape.
        shape (tuple[int, ...]): The operand shape.

    Returns:
        np.ndarray: The gradient with the operand shape.
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis = 0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis = axis, keepdims = True)
    return grad


class Tensor:
    """
    A dense array with an optional record of the operation that produced it, for reverse-mode differentiation.

    Leaves created with trainable=True own a gradient slot and are the only values an optimizer updates.
    Every other value only carries gradients transiently during backward().

    Attributes:
        data (np.ndarray): Row-major dense values.
        trainable (bool): Whether this leaf is a tunable parameter.
        requires_grad (bool): Whether any trainable leaf is upstream of this value.
        grad (np.ndarray | None): Accumulated gradient; only populated on trainable leaves.
        name (str | None): Optional parameter name.
    """
    __slots__ = ("data", "trainable", "requires_grad", "grad", "name", "_parents", "_backward")

    def __init__(
        self,
        data: Any,
        trainable: bool = False,
        name: str | None = None,
        parents: tuple["Tensor", ...] = (),
        backward: BackwardFn | None = None
    ) -> None:
        array = np.asarray(data)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float64)
        if not np.isfinite(array).all():
            raise NumericalError(f"non-finite values produced{f' in {name}' if name else ''}")
        self.data: np.ndarray = array
        self.trainable = trainable
        self.name = name
        self.requires_grad = trainable or any(parent.requires_grad for parent in parents)
        self._parents = parents if self.requires_grad else ()
        self._backward = backward if self.requires_grad else None
        self.grad: np.ndarray | None = np.zeros_like(array) if trainable else None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype[Any]:
        return self.data.dtype

    @property
    def size(self) -> int:
        return int(self.data.size)

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, trainable={self.trainable}{label})"

    def __len__(self) -> int:
        return self.shape[0]

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        if self.trainable:
            self.grad = np.zeros_like(self.data)

    def lift(self, value: Any) -> "Tensor":
        """Wraps a constant as a non-trainable tensor with this tensor's dtype."""
        if isinstance(value, Tensor):
            return value
        return Tensor(np.asarray(value, dtype = self.dtype))

    def __add__(self, other: Any) -> "Tensor":
        other = self.lift(other)
        left, right = self, other
        try:
            out = left.data + right.data
        except ValueError as error:
            raise DimensionError(f"cannot add shapes {left.shape} and {right.shape}") from error

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            return (
                unbroadcast(grad, left.shape) if left.requires_grad else None,
                unbroadcast(grad, right.shape) if right.requires_grad else None
            )

        return Tensor(out, parents = (left, right), backward = backward)

    def __radd__(self, other: Any) -> "Tensor":
        return self.lift(other) + self

    def __neg__(self) -> "Tensor":
        source = self

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            return (-grad,)

        return Tensor(-source.data, parents = (source,), backward = backward)

    def __sub__(self, other: Any) -> "Tensor":
        return self + (-self.lift(other))

    def __rsub__(self, other: Any) -> "Tensor":
        return self.lift(other) + (-self)

    def __mul__(self, other: Any) -> "Tensor":
        other = self.lift(other)
        left, right = self, other
        try:
            out = left.data * right.data
        except ValueError as error:
            raise DimensionError(f"cannot multiply shapes {left.shape} and {right.shape}") from error

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            return (
                unbroadcast(grad * right.data, left.shape) if left.requires_grad else None,
                unbroadcast(grad * left.data, right.shape) if right.requires_grad else None
            )

        return Tensor(out, parents = (left, right), backward = backward)

    def __rmul__(self, other: Any) -> "Tensor":
        return self.lift(other) * self

    def __truediv__(self, other: float) -> "Tensor":
        return self * (1.0 / other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __getitem__(self, index: Any) -> "Tensor":
        source = self
        out = source.data[index]

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            full = np.zeros_like(source.data)
            np.add.at(full, index, grad)
            return (full,)

        return Tensor(out, parents = (source,), backward = backward)

    @property
    def T(self) -> "Tensor":
        return self.transpose()

    def transpose(self, *axes: int) -> "Tensor":
        source = self
        axes = tuple(axis % source.data.ndim for axis in axes)
        order = axes if axes else tuple(reversed(range(source.data.ndim)))
        if len(axes) == 2 and source.data.ndim > 2:
            full = list(range(source.data.ndim))
            full[axes[0]], full[axes[1]] = full[axes[1]], full[axes[0]]
            order = tuple(full)
        inverse = tuple(np.argsort(order))

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            return (grad.transpose(inverse),)

        return Tensor(source.data.transpose(order), parents = (source,), backward = backward)

    def reshape(self, *shape: int) -> "Tensor":
        source = self
        try:
            out = source.data.reshape(shape)
        except ValueError as error:
            raise DimensionError(f"cannot reshape {source.shape} to {shape}") from error

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            return (grad.reshape(source.shape),)

        return Tensor(out, parents = (source,), backward = backward)

    def sum(self, axis: int | None = None, keepdims: bool = False) -> "Tensor":
        source = self
        out = source.data.sum(axis = axis, keepdims = keepdims)

        def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            return (np.broadcast_to(grad, source.shape).copy(),)

        return Tensor(out, parents = (source,), backward = backward)

    def mean(self, axis: int | None = None, keepdims: bool = False) -> "Tensor":
        count = self.size if axis is None else self.shape[axis]
        return self.sum(axis = axis, keepdims = keepdims) * (1.0 / max(count, 1))

    def backward(self) -> None:
        backward(self)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    Matrix product of two tensors of rank >= 2 with numpy batch broadcasting.

    Raises:
        DimensionError: If the inner dimensions disagree or a rank is below 2.
    """
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise DimensionError(f"matmul needs rank >= 2 operands, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul inner dimensions disagree: {a.shape} x {b.shape}")
    try:
        out = np.matmul(a.data, b.data)
    except ValueError as error:
        raise DimensionError(f"matmul batch dimensions disagree: {a.shape} x {b.shape}") from error

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        grad_a = unbroadcast(np.matmul(grad, np.swapaxes(b.data, -1, -2)), a.shape) if a.requires_grad else None
        grad_b = unbroadcast(np.matmul(np.swapaxes(a.data, -1, -2), grad), b.shape) if b.requires_grad else None
        return grad_a, grad_b

    return Tensor(out, parents = (a, b), backward = backward)


def topological_order(root: Tensor) -> list[Tensor]:
    """Returns the values upstream of root that require gradients, parents before children."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
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
    return order


def backward(loss: Tensor) -> None:
    """
    Populates gradients on every trainable ancestor of a scalar loss.
    Gradients accumulate into trainable leaves; intermediate gradients are discarded once consumed.

    Args:
        loss (Tensor): A scalar value.

    Raises:
        NonScalarLossError: If loss has more than one element.
    """
    if loss.size != 1:
        raise NonScalarLossError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(topological_order(loss)):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        if node.trainable:
            node.grad = grad.astype(node.dtype) if node.grad is None else node.grad + grad
        if node._backward is None:
            continue
        for parent, parent_grad in zip(node._parents, node._backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = grads[key] + parent_grad if key in grads else parent_grad


def parameters(tensors: Iterable[Tensor]) -> list[Tensor]:
    """Filters an iterable down to its trainable leaves."""
    return [tensor for tensor in tensors if tensor.trainable]
