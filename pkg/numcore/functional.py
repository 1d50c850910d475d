from typing import Sequence

import numpy as np

from core.errors import DimensionError, EmptyInputError, TargetIndexError
from numcore.tensor import Tensor, matmul

MASK_VALUE = -1e9


def _normalize_axis(axis: int, ndim: int) -> int:
    if not -ndim <= axis < ndim:
        raise DimensionError(f"axis {axis} is invalid for rank {ndim}")
    return axis % ndim


def softmax(z: Tensor, axis: int = -1) -> Tensor:
    """
    Max-subtracted softmax along one axis.

    Raises:
        DimensionError: If the axis is invalid.
        EmptyInputError: If the axis has length zero.
    """
    axis = _normalize_axis(axis, z.data.ndim)
    if z.shape[axis] == 0:
        raise EmptyInputError("softmax over an empty axis")
    shifted = z.data - z.data.max(axis = axis, keepdims = True)
    exps = np.exp(shifted)
    out = exps / exps.sum(axis = axis, keepdims = True)

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        return (out * (grad - (grad * out).sum(axis = axis, keepdims = True)),)

    return Tensor(out, parents = (z,), backward = backward)


def log_softmax(z: Tensor, axis: int = -1) -> Tensor:
    """Numerically stable log of softmax along one axis."""
    axis = _normalize_axis(axis, z.data.ndim)
    if z.shape[axis] == 0:
        raise EmptyInputError("log_softmax over an empty axis")
    shifted = z.data - z.data.max(axis = axis, keepdims = True)
    log_norm = np.log(np.exp(shifted).sum(axis = axis, keepdims = True))
    out = shifted - log_norm
    probs = np.exp(out)

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        return (grad - probs * grad.sum(axis = axis, keepdims = True),)

    return Tensor(out, parents = (z,), backward = backward)


def cross_entropy(logits: Tensor, target: int | Sequence[int] | np.ndarray, reduction: str = "mean") -> Tensor:
    """
    Softmax cross-entropy: -log softmax(logits)[target].

    Args:
        logits (Tensor): A vector of class scores, or a matrix with one row per target.
        target: A class index for a vector, or one index per row for a matrix.
        reduction (str): "mean" or "sum" over rows. Defaults to "mean".

    Raises:
        TargetIndexError: If a target lies outside the logits width.
        DimensionError: If the number of targets does not match the number of rows.
    """
    single = logits.data.ndim == 1
    matrix = logits.data[None, :] if single else logits.data
    if matrix.ndim != 2:
        raise DimensionError(f"cross_entropy needs a vector or a matrix, got {logits.shape}")
    targets = np.atleast_1d(np.asarray(target, dtype = np.int64))
    rows, width = matrix.shape
    if targets.shape != (rows,):
        raise DimensionError(f"{targets.shape[0]} targets for {rows} rows")
    if width == 0:
        raise EmptyInputError("cross_entropy over zero classes")
    if ((targets < 0) | (targets >= width)).any():
        raise TargetIndexError(f"target outside [0, {width})")
    shifted = matrix - matrix.max(axis = 1, keepdims = True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis = 1, keepdims = True))
    picked = -log_probs[np.arange(rows), targets]
    scale = 1.0 / rows if reduction == "mean" else 1.0
    out = np.asarray(picked.sum() * scale, dtype = logits.dtype)

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        local = np.exp(log_probs)
        local[np.arange(rows), targets] -= 1.0
        local = local * (grad * scale)
        return (local[0] if single else local,)

    return Tensor(out, parents = (logits,), backward = backward)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        return (grad * mask,)

    return Tensor(x.data * mask, parents = (x,), backward = backward)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Layer normalization over the last axis with a fused backward."""
    if x.shape[-1] != gamma.shape[-1] or gamma.shape != beta.shape:
        raise DimensionError(f"layer_norm width mismatch: {x.shape} vs {gamma.shape}/{beta.shape}")
    mean = x.data.mean(axis = -1, keepdims = True)
    centered = x.data - mean
    sigma = np.sqrt((centered * centered).mean(axis = -1, keepdims = True) + eps)
    normalized = centered / sigma
    out = normalized * gamma.data + beta.data

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        grad_x = None
        if x.requires_grad:
            scaled = grad * gamma.data
            grad_x = (
                scaled
                - scaled.mean(axis = -1, keepdims = True)
                - normalized * (scaled * normalized).mean(axis = -1, keepdims = True)
            ) / sigma
        reduce_axes = tuple(range(grad.ndim - 1))
        grad_gamma = (grad * normalized).sum(axis = reduce_axes) if gamma.requires_grad else None
        grad_beta = grad.sum(axis = reduce_axes) if beta.requires_grad else None
        return grad_x, grad_gamma, grad_beta

    return Tensor(out, parents = (x, gamma, beta), backward = backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """
    Concatenates tensors along an axis. Zero-length members are allowed.

    Raises:
        DimensionError: If the non-concatenated dimensions disagree.
    """
    if not tensors:
        raise DimensionError("concat of an empty list")
    if len(tensors) == 1:
        return tensors[0]
    try:
        out = np.concatenate([tensor.data for tensor in tensors], axis = axis)
    except ValueError as error:
        shapes = [tensor.shape for tensor in tensors]
        raise DimensionError(f"cannot concatenate shapes {shapes}") from error
    boundaries = np.cumsum([tensor.shape[axis] for tensor in tensors])[:-1]

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        return tuple(np.split(grad, boundaries, axis = axis))

    return Tensor(out, parents = tuple(tensors), backward = backward)


def embedding(table: Tensor, ids: Sequence[int] | np.ndarray) -> Tensor:
    """Gathers rows of an embedding table; the backward scatters into the table."""
    index = np.asarray(ids, dtype = np.int64).reshape(-1)
    out = table.data[index]

    def backward(grad: np.ndarray) -> Sequence[np.ndarray | None]:
        full = np.zeros_like(table.data)
        np.add.at(full, index, grad)
        return (full,)

    return Tensor(out, parents = (table,), backward = backward)


def dropout(x: Tensor, rate: float, rng: np.random.Generator | None) -> Tensor:
    """Inverted dropout; the identity when rate is 0 or no generator is given (eval mode)."""
    if rate <= 0.0 or rng is None:
        return x
    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * Tensor(keep)


def linear(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """x @ weight (+ bias), with weight laid out as (in, out)."""
    out = matmul(x, weight)
    return out if bias is None else out + bias


def scaled_dot_product_attention(q: Tensor, k: Tensor, v: Tensor, mask: np.ndarray | None = None) -> tuple[Tensor, Tensor]:
    """
    softmax(Q K^T / sqrt(d_k) + mask) V over the last two axes.

    Args:
        q (Tensor): (..., T_q, d_k) queries.
        k (Tensor): (..., T_k, d_k) keys.
        v (Tensor): (..., T_k, d_v) values.
        mask (np.ndarray | None): Additive mask broadcastable to (..., T_q, T_k); MASK_VALUE blocks a key.

    Returns:
        tuple[Tensor, Tensor]: The attended output (..., T_q, d_v) and the attention weights (..., T_q, T_k).

    Raises:
        DimensionError: If d_k or the key/value counts disagree, or the mask does not fit the scores.
    """
    if q.shape[-1] != k.shape[-1]:
        raise DimensionError(f"query width {q.shape[-1]} != key width {k.shape[-1]}")
    if k.shape[-2] != v.shape[-2]:
        raise DimensionError(f"{k.shape[-2]} keys for {v.shape[-2]} values")
    scores = matmul(q, k.transpose(-1, -2)) * (1.0 / np.sqrt(q.shape[-1]))
    if mask is not None:
        try:
            np.broadcast_shapes(mask.shape, scores.shape)
        except ValueError as error:
            raise DimensionError(f"mask shape {mask.shape} does not fit scores {scores.shape}") from error
        scores = scores + Tensor(mask.astype(scores.dtype))
    weights = softmax(scores, axis = -1)
    return matmul(weights, v), weights
