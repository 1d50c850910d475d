from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import ConfigError, DimensionError
from numcore.tensor import Tensor

DEFAULT_BETAS = (0.9, 0.98)
DEFAULT_LEARNING_RATE = 5e-3
DEFAULT_EPSILON = 1e-8


class AdamState(BaseModel):
    """
    Per-parameter Adam moments plus the shared step counter.

    Attributes:
        learning_rate (float): Step size, > 0.
        beta1 (float): First-moment decay in (0, 1).
        beta2 (float): Second-moment decay in (0, 1).
        epsilon (float): Denominator floor.
        step (int): Number of updates applied so far.
        first_moments (list[np.ndarray]): One m per parameter.
        second_moments (list[np.ndarray]): One v per parameter.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    learning_rate: float = Field(description = "Step size.", default = DEFAULT_LEARNING_RATE, gt = 0)
    beta1: float = Field(description = "First-moment decay.", default = DEFAULT_BETAS[0], gt = 0, lt = 1)
    beta2: float = Field(description = "Second-moment decay.", default = DEFAULT_BETAS[1], gt = 0, lt = 1)
    epsilon: float = Field(description = "Denominator floor.", default = DEFAULT_EPSILON, gt = 0)
    step: int = Field(description = "Number of updates applied so far.", default = 0, ge = 0)
    first_moments: list[np.ndarray] = Field(description = "First moments, one per parameter.", default_factory = list)
    second_moments: list[np.ndarray] = Field(description = "Second moments, one per parameter.", default_factory = list)


def adam_step(params: Sequence[Tensor], grads: Sequence[np.ndarray], state: AdamState) -> AdamState:
    """
    Applies one bias-corrected Adam update in place. Non-trainable values are left untouched.

    Args:
        params (Sequence[Tensor]): Parameters to update.
        grads (Sequence[np.ndarray]): Gradients, same shapes as params.
        state (AdamState): Moments from the previous step; lazily created on the first call.

    Returns:
        AdamState: The same state object, advanced by one step.

    Raises:
        DimensionError: If a gradient shape differs from its parameter shape or counts disagree.
    """
    if len(params) != len(grads):
        raise DimensionError(f"{len(grads)} gradients for {len(params)} parameters")
    if not state.first_moments:
        state.first_moments = [np.zeros_like(param.data) for param in params]
        state.second_moments = [np.zeros_like(param.data) for param in params]
    if len(state.first_moments) != len(params):
        raise DimensionError("optimizer state was built for a different parameter list")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for index, (param, grad) in enumerate(zip(params, grads)):
        if grad.shape != param.shape:
            raise DimensionError(f"gradient shape {grad.shape} != parameter shape {param.shape}")
        if not param.trainable:
            continue
        first = state.first_moments[index]
        second = state.second_moments[index]
        first *= state.beta1
        first += (1.0 - state.beta1) * grad
        second *= state.beta2
        second += (1.0 - state.beta2) * grad * grad
        update = state.learning_rate * (first / correction1) / (np.sqrt(second / correction2) + state.epsilon)
        param.data = (param.data - update).astype(param.dtype)
    return state


class Adam():
    """
    Adam optimizer over a fixed list of trainable tensors, reading gradients from their grad slots.

    Methods:
        step() -> None: Applies one update from the current gradients.
        zero_grad() -> None: Clears the gradients of all parameters.
    """

    def __init__(
        self,
        params: Sequence[Tensor],
        learning_rate: float = DEFAULT_LEARNING_RATE,
        betas: tuple[float, float] = DEFAULT_BETAS,
        epsilon: float = DEFAULT_EPSILON
    ) -> None:
        if learning_rate <= 0:
            raise ConfigError(f"learning rate must be positive, got {learning_rate}")
        self.params = [param for param in params if param.trainable]
        self.state = AdamState(
            learning_rate = learning_rate,
            beta1 = betas[0],
            beta2 = betas[1],
            epsilon = epsilon
        )

    def step(self) -> None:
        grads = [param.grad if param.grad is not None else np.zeros_like(param.data) for param in self.params]
        adam_step(self.params, grads, self.state)

    def zero_grad(self) -> None:
        for param in self.params:
            param.zero_grad()
