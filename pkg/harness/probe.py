from typing import Literal, Sequence
from typing_extensions import override

import numpy as np
from pydantic import Field

from core.action_schema import ActionSchema
from core.errors import ConfigError, InsufficientDataError
from core.log import get_logger
from numcore.adam import Adam
from numcore.functional import cross_entropy, linear
from numcore.tensor import Tensor
from schemas.example import Example
from schemas.task_spec import TaskSpec
from unitlm.model import UnitLM

logger = get_logger(__name__)

PROBE_LEARNING_RATE = 5e-3


class ProbeResult(ActionSchema):
    """
    Attributes:
        accuracy (float): Held-out accuracy.
        parameter_count (int): |Y| x d + |Y|.
        degenerate (bool): True when the training set has a single class.
    """
    accuracy: float = Field(description = "Held-out accuracy.")
    parameter_count: int = Field(description = "Trainable parameters of the probe.")
    degenerate: bool = Field(description = "Training set has a single class.", default = False)

    @classmethod
    @override
    def description(cls) -> str:
        return "Held-out accuracy and size of a linear probe on frozen features."


def pooled_features(lm: UnitLM, examples: Sequence[Example], source: Literal["embeddings", "states"] = "embeddings") -> np.ndarray:
    """Mean-pooled frozen input embeddings (or final hidden states) per utterance, N x d."""
    rows = []
    for example in examples:
        if not example.units:
            raise InsufficientDataError("cannot pool features of an empty utterance")
        states = lm.embed_units(example.units) if source == "embeddings" else lm.source_states(example.units)
        rows.append(states.data.mean(axis = 0))
    return np.asarray(rows, dtype = np.float64)


def linear_probe_baseline(
    lm: UnitLM,
    task: TaskSpec,
    train_set: Sequence[Example],
    test_set: Sequence[Example],
    steps: int = 500,
    seed: int = 0,
    source: Literal["embeddings", "states"] = "embeddings"
) -> ProbeResult:
    """
    Full-batch softmax regression on standardized mean-pooled features of the frozen backbone.

    Raises:
        ConfigError: If the task is not single-label classification.
        InsufficientDataError: If the training set is empty.
    """
    if task.kind != "classification" or task.label_slots != 1:
        raise ConfigError("the linear probe needs a single-label classification task")
    if not train_set:
        raise InsufficientDataError("the linear probe needs training examples")
    n_classes, width = len(task.labels), lm.config.embed_dim
    parameter_count = n_classes * width + n_classes
    index = task.label_index
    train_targets = np.asarray([index[example.labels[0]] for example in train_set])
    if len(set(train_targets.tolist())) == 1:
        return ProbeResult(accuracy = 1.0, parameter_count = parameter_count, degenerate = True)

    train_features = pooled_features(lm, train_set, source)
    mean, scale = train_features.mean(axis = 0), train_features.std(axis = 0) + 1e-8
    rng = np.random.default_rng(seed)
    weight = Tensor(rng.normal(0.0, 0.01, size = (width, n_classes)), trainable = True, name = "probe.weight")
    bias = Tensor(np.zeros(n_classes), trainable = True, name = "probe.bias")
    optimizer = Adam([weight, bias], learning_rate = PROBE_LEARNING_RATE)
    inputs = Tensor((train_features - mean) / scale)
    for step in range(steps):
        optimizer.zero_grad()
        loss = cross_entropy(linear(inputs, weight, bias), train_targets)
        loss.backward()
        optimizer.step()
        if (step + 1) % 100 == 0:
            logger.debug("linear_probe step=%d loss=%.4f", step + 1, float(loss.data))

    if not test_set:
        return ProbeResult(accuracy = 0.0, parameter_count = parameter_count)
    test_features = (pooled_features(lm, test_set, source) - mean) / scale
    predicted = (test_features @ weight.data + bias.data).argmax(axis = 1)
    expected = np.asarray([index[example.labels[0]] for example in test_set])
    return ProbeResult(accuracy = float((predicted == expected).mean()), parameter_count = parameter_count)
