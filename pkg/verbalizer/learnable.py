from typing import Sequence
from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import ConfigError, CorruptCheckpointError, DimensionError, EmptyInputError
from numcore.functional import softmax
from numcore.tensor import Tensor, matmul, resolve_dtype
from unitlm.container import encode_container
from verbalizer.fixed import VERB_TAG, FixedVerbalizer, load_fixed, load_verbalizer_blob, save_fixed

DEFAULT_TEMPERATURE = 0.01


class LearnableVerbalizer(ActionSchema):
    """
    A trainable |Y| x |V| matrix W mapping LM logits to class logits, and back to class embeddings through a
    temperature softmax over the vocabulary.

    Attributes:
        labels (list[str]): The label set Y in class-index order.
        weight (Tensor): W, |Y| x |V|, trainable.
        temperature (float): tau > 0.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    labels: list[str] = Field(description = "The label set Y in class-index order.")
    weight: Tensor = Field(description = "W, |Y| x |V|.")
    temperature: float = Field(description = "Softmax temperature tau.", default = DEFAULT_TEMPERATURE, gt = 0)

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    def parameters(self) -> list[Tensor]:
        return [self.weight]

    def class_embeddings(self, embeddings: Tensor) -> Tensor:
        return class_embedding(self.weight, self.temperature, embeddings)

    @classmethod
    def create(cls, labels: Sequence[str], vocab_size: int, temperature: float = DEFAULT_TEMPERATURE, dtype: str = "f32") -> "LearnableVerbalizer":
        """A zero-initialized verbalizer: uninformative class logits and uniform-mean class embeddings."""
        weight = Tensor(np.zeros((len(labels), vocab_size), dtype = resolve_dtype(dtype)), trainable = True, name = "verbalizer")
        return cls(labels = list(labels), weight = weight, temperature = temperature)

    @classmethod
    @override
    def description(cls) -> str:
        return "A learnable linear verbalizer with temperature-softmax class embeddings."


def transform_logits(weight: Tensor, logits: Tensor) -> Tensor:
    """
    z_hat = W z for a |V| vector, or Z W^T row-wise for a matrix of logits.

    Raises:
        DimensionError: If the logits width is not |V|.
    """
    if logits.shape[-1] != weight.shape[1]:
        raise DimensionError(f"logits width {logits.shape[-1]} != verbalizer width {weight.shape[1]}")
    if len(logits.shape) == 1:
        return matmul(logits.reshape(1, logits.shape[0]), weight.T).reshape(weight.shape[0])
    return matmul(logits, weight.T)


def predict_label(scores: Tensor | np.ndarray) -> int:
    """
    Argmax over class scores; ties go to the lowest class index.

    Raises:
        EmptyInputError: If there are no classes.
    """
    values = scores.data if isinstance(scores, Tensor) else np.asarray(scores)
    if values.size == 0:
        raise EmptyInputError("cannot predict a label from zero classes")
    return int(np.argmax(values))


def class_embedding(weight: Tensor, temperature: float, embeddings: Tensor) -> Tensor:
    """
    e_hat(y) = sum_i softmax(W_y / tau)_i e(u_i) for every class y, as a |Y| x d matrix.

    Raises:
        ConfigError: If tau is not positive.
        DimensionError: If W's width differs from the number of embedding rows.
    """
    if temperature <= 0:
        raise ConfigError(f"temperature must be positive, got {temperature}")
    if weight.shape[1] != embeddings.shape[0]:
        raise DimensionError(f"verbalizer width {weight.shape[1]} != vocabulary size {embeddings.shape[0]}")
    return matmul(softmax(weight * (1.0 / temperature), axis = 1), embeddings)


def save_verbalizer(verbalizer: FixedVerbalizer | LearnableVerbalizer) -> bytes:
    """SPUL container tagged VERB for either verbalizer kind."""
    if isinstance(verbalizer, FixedVerbalizer):
        return save_fixed(verbalizer)
    config = {"kind": "learnable", "labels": verbalizer.labels, "temperature": verbalizer.temperature}
    return encode_container(VERB_TAG, config, {"weight": verbalizer.weight.data})


def load_verbalizer(blob: bytes) -> FixedVerbalizer | LearnableVerbalizer:
    """
    Raises:
        CorruptCheckpointError: If the container is damaged or does not hold a verbalizer.
    """
    config, records = load_verbalizer_blob(blob)
    if config["kind"] == "fixed":
        return load_fixed(config, records)
    if "weight" not in records or records["weight"].shape[0] != len(config["labels"]):
        raise CorruptCheckpointError("learnable verbalizer weight does not match its labels")
    weight = Tensor(records["weight"], trainable = True, name = "verbalizer")
    return LearnableVerbalizer(labels = config["labels"], weight = weight, temperature = config["temperature"])
