from typing import Iterator
from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import BackboneMismatchError, ConfigError, CorruptCheckpointError, DimensionError
from numcore.functional import concat
from numcore.tensor import Tensor, matmul, resolve_dtype
from schemas.lm_config import LMConfig
from unitlm.container import decode_container, encode_container

INIT_STD = 0.02
PROMPT_TAG = "PROMPT"


def stack_names(config: LMConfig) -> list[str]:
    return ["encoder", "decoder"] if config.variant == "encoder_decoder" else ["decoder"]


class PromptSet(ActionSchema):
    """
    The trainable prompt vectors steering a frozen backbone.

    Input prompts p^I (l x d) are prepended to the first-layer input of every stack. Deep prompts p^K and p^V
    (l x d each) are prepended to the keys and values of every self-attention layer of every stack.

    Attributes:
        length (int): Prompt length l shared by every prompt tensor.
        embed_dim (int): Width d.
        use_input (bool): Whether input prompts are applied.
        use_deep (bool): Whether deep prompts are applied.
        input_prompts (dict[str, Tensor]): p^I per stack name.
        key_prompts (dict[str, Tensor]): p^K per "stack.layer".
        value_prompts (dict[str, Tensor]): p^V per "stack.layer".
        backbone_hash (int | None): Content hash of the backbone these prompts were tuned against.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    length: int = Field(description = "Prompt length l.", ge = 0)
    embed_dim: int = Field(description = "Width d.", ge = 1)
    use_input: bool = Field(description = "Apply input prompts.", default = True)
    use_deep: bool = Field(description = "Apply deep prompts.", default = True)
    input_prompts: dict[str, Tensor] = Field(description = "p^I per stack.", default_factory = dict)
    key_prompts: dict[str, Tensor] = Field(description = "p^K per stack.layer.", default_factory = dict)
    value_prompts: dict[str, Tensor] = Field(description = "p^V per stack.layer.", default_factory = dict)
    backbone_hash: int | None = Field(description = "Hash of the backbone the prompts were tuned against.", default = None)

    def input_prompt(self, stack: str) -> Tensor | None:
        return self.input_prompts.get(stack) if self.use_input else None

    def deep_prompt(self, stack: str, layer: int) -> tuple[Tensor, Tensor] | None:
        if not self.use_deep:
            return None
        key = f"{stack}.{layer}"
        if key not in self.key_prompts:
            return None
        return self.key_prompts[key], self.value_prompts[key]

    def named_tensors(self) -> Iterator[tuple[str, Tensor]]:
        """Active prompt tensors in a fixed order: input prompts, then key/value prompts layer by layer."""
        if self.use_input:
            for stack, tensor in self.input_prompts.items():
                yield f"input.{stack}", tensor
        if self.use_deep:
            for key in self.key_prompts:
                yield f"key.{key}", self.key_prompts[key]
                yield f"value.{key}", self.value_prompts[key]

    def parameters(self) -> list[Tensor]:
        return [tensor for _, tensor in self.named_tensors()]

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: tensor.data.copy() for name, tensor in self.named_tensors()}

    def restore(self, snapshot: dict[str, np.ndarray]) -> None:
        for name, tensor in self.named_tensors():
            tensor.data = snapshot[name].copy()

    @classmethod
    @override
    def description(cls) -> str:
        return "Trainable input and deep prompt vectors for a frozen unit language model."


def init_prompts(
    config: LMConfig,
    length: int,
    seed: int,
    use_input: bool = True,
    use_deep: bool = True
) -> PromptSet:
    """
    Draws every prompt entry i.i.d. from normal(0, 0.02^2), deterministically under seed.

    Args:
        config (LMConfig): Backbone shape; decides stacks, layers, width and dtype.
        length (int): Prompt length l >= 0; l = 0 gives an empty set.
        seed (int): Initialization seed.
        use_input (bool): Create input prompts.
        use_deep (bool): Create deep prompts.

    Raises:
        ConfigError: If length is negative.
    """
    if length < 0:
        raise ConfigError(f"prompt length must be non-negative, got {length}")
    dtype = resolve_dtype(config.dtype)
    rng = np.random.default_rng(seed)
    prompts = PromptSet(length = length, embed_dim = config.embed_dim, use_input = use_input, use_deep = use_deep)
    if length == 0:
        return prompts

    def draw(name: str) -> Tensor:
        values = rng.normal(0.0, INIT_STD, size = (length, config.embed_dim)).astype(dtype)
        return Tensor(values, trainable = True, name = name)

    for stack in stack_names(config):
        if use_input:
            prompts.input_prompts[stack] = draw(f"input.{stack}")
        if use_deep:
            for layer in range(config.n_layers):
                prompts.key_prompts[f"{stack}.{layer}"] = draw(f"key.{stack}.{layer}")
                prompts.value_prompts[f"{stack}.{layer}"] = draw(f"value.{stack}.{layer}")
    return prompts


def apply_input_prompts(sequence: Tensor, prompt: Tensor | None) -> Tensor:
    """
    Concat(p^I, sequence): the output has l + T rows, the first l equal to p^I.

    Raises:
        DimensionError: If the widths differ.
    """
    if prompt is None or prompt.shape[0] == 0:
        return sequence
    if prompt.shape[1] != sequence.shape[1]:
        raise DimensionError(f"prompt width {prompt.shape[1]} != sequence width {sequence.shape[1]}")
    return concat([prompt, sequence], axis = 0)


def apply_deep_prompts(
    hidden: Tensor,
    key_prompt: Tensor | None,
    value_prompt: Tensor | None,
    key_weight: Tensor,
    value_weight: Tensor
) -> tuple[Tensor, Tensor]:
    """
    K = Concat(p^K, h) W_K and V = Concat(p^V, h) W_V. Queries are untouched, so the attention output keeps T rows
    while normalizing over T + l keys.

    Raises:
        DimensionError: If prompt and hidden widths or prompt lengths disagree.
    """
    if key_prompt is None or value_prompt is None or key_prompt.shape[0] == 0:
        return matmul(hidden, key_weight), matmul(hidden, value_weight)
    if key_prompt.shape != value_prompt.shape:
        raise DimensionError(f"key prompt {key_prompt.shape} and value prompt {value_prompt.shape} differ")
    if key_prompt.shape[1] != hidden.shape[1]:
        raise DimensionError(f"prompt width {key_prompt.shape[1]} != hidden width {hidden.shape[1]}")
    keys = matmul(concat([key_prompt, hidden], axis = 0), key_weight)
    values = matmul(concat([value_prompt, hidden], axis = 0), value_weight)
    return keys, values


def save_prompts(prompts: PromptSet) -> bytes:
    """SPUL container tagged PROMPT; records every prompt tensor and the backbone hash."""
    config = prompts.model_dump(include = {"length", "embed_dim", "use_input", "use_deep", "backbone_hash"})
    records = {f"input.{stack}": tensor.data for stack, tensor in prompts.input_prompts.items()}
    for key in prompts.key_prompts:
        records[f"key.{key}"] = prompts.key_prompts[key].data
        records[f"value.{key}"] = prompts.value_prompts[key].data
    return encode_container(PROMPT_TAG, config, records)


def load_prompts(blob: bytes, backbone_hash: int | None = None) -> PromptSet:
    """
    Raises:
        CorruptCheckpointError: If the container is damaged.
        BackboneMismatchError: If backbone_hash is given and differs from the hash the prompts were tuned against.
    """
    _, config, records = decode_container(blob, PROMPT_TAG)
    if backbone_hash is not None and config.get("backbone_hash") not in (None, backbone_hash):
        raise BackboneMismatchError(
            f"prompts were tuned against backbone {config['backbone_hash']:#018x}, not {backbone_hash:#018x}"
        )
    prompts = PromptSet.model_validate(config)
    for name, array in records.items():
        kind, _, key = name.partition(".")
        tensor = Tensor(array, trainable = True, name = name)
        if kind == "input":
            prompts.input_prompts[key] = tensor
        elif kind == "key":
            prompts.key_prompts[key] = tensor
        elif kind == "value":
            prompts.value_prompts[key] = tensor
        else:
            raise CorruptCheckpointError(f"unexpected prompt record {name}")
    if set(prompts.key_prompts) != set(prompts.value_prompts):
        raise CorruptCheckpointError("key and value prompts do not pair up")
    return prompts
