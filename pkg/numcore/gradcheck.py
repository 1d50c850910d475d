from typing import Callable, Sequence

import numpy as np

from numcore.tensor import Tensor, backward


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a|| + ||n||, 1e-12)."""
    scale = max(float(np.linalg.norm(analytic) + np.linalg.norm(numeric)), 1e-12)
    return float(np.linalg.norm(analytic - numeric)) / scale


def numerical_gradient(fn: Callable[[], Tensor], tensor: Tensor, step: float = 1e-6) -> np.ndarray:
    """
    Central finite differences of a scalar function with respect to one tensor, perturbing it in place.

    Args:
        fn (Callable[[], Tensor]): Rebuilds the scalar loss from the current tensor values.
        tensor (Tensor): The value to perturb; should be f64.
        step (float): Perturbation size.

    Returns:
        np.ndarray: The estimated gradient.
    """
    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    for position in range(flat.size):
        original = flat[position]
        flat[position] = original + step
        upper = float(fn().data)
        flat[position] = original - step
        lower = float(fn().data)
        flat[position] = original
        grad.reshape(-1)[position] = (upper - lower) / (2 * step)
    return grad


def check_gradients(fn: Callable[[], Tensor], inputs: Sequence[Tensor], step: float = 1e-6) -> float:
    """
    Compares reverse-mode gradients of fn against finite differences for every input.

    Returns:
        float: The largest relative error over all inputs.
    """
    for tensor in inputs:
        tensor.zero_grad()
    backward(fn())
    worst = 0.0
    for tensor in inputs:
        analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        worst = max(worst, relative_error(analytic, numerical_gradient(fn, tensor, step)))
    return worst
