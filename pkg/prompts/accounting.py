from typing import Literal
from typing_extensions import override

from pydantic import Field

from core.action_schema import ActionSchema
from core.errors import ConfigError
from prompts.prompt_set import PromptSet
from schemas.lm_config import LMConfig
from schemas.task_spec import TaskKind
from verbalizer.fixed import FixedVerbalizer
from verbalizer.learnable import LearnableVerbalizer

# (variant, task kind) -> prompt length l
DEFAULT_PROMPT_LENGTHS: dict[tuple[str, str], int] = {
    ("decoder_only", "classification"): 5,
    ("decoder_only", "sequence"): 180,
    ("decoder_only", "generation"): 180,
    ("decoder_only", "translation"): 180,
    ("encoder_decoder", "classification"): 3,
    ("encoder_decoder", "sequence"): 50,
    ("encoder_decoder", "generation"): 200,
    ("encoder_decoder", "translation"): 200,
}


class TrainableCount(ActionSchema):
    """
    Trainable scalars of a prompted setup.

    Attributes:
        input_prompts (int): stacks x l x d.
        deep_prompts (int): self-attention layers x 2 x l x d.
        verbalizer (int): |Y| x |V| for a learnable verbalizer, else 0.
    """
    input_prompts: int = Field(description = "Input prompt scalars.", default = 0)
    deep_prompts: int = Field(description = "Deep prompt scalars.", default = 0)
    verbalizer: int = Field(description = "Learnable verbalizer scalars.", default = 0)

    @property
    def prompts(self) -> int:
        return self.input_prompts + self.deep_prompts

    @property
    def total(self) -> int:
        return self.prompts + self.verbalizer

    @classmethod
    @override
    def description(cls) -> str:
        return "Trainable parameter count, split into prompts and verbalizer."


def default_prompt_length(variant: Literal["decoder_only", "encoder_decoder"], kind: TaskKind) -> int:
    return DEFAULT_PROMPT_LENGTHS[(variant, kind)]


def count_for_config(
    config: LMConfig,
    length: int,
    use_input: bool = True,
    use_deep: bool = True,
    n_labels: int = 0
) -> TrainableCount:
    """
    The closed-form count for a backbone shape, no tensors allocated:
    stacks x l x d + layers x 2 x l x d (+ |Y| x |V| with a learnable verbalizer of n_labels classes).

    Raises:
        ConfigError: If length is negative.
    """
    if length < 0:
        raise ConfigError(f"prompt length must be non-negative, got {length}")
    width = length * config.embed_dim
    return TrainableCount(
        input_prompts = config.n_stacks * width if use_input else 0,
        deep_prompts = config.n_self_attention_layers * 2 * width if use_deep else 0,
        verbalizer = n_labels * config.vocab_size
    )


def count_trainable(prompts: PromptSet, verbalizer: FixedVerbalizer | LearnableVerbalizer | None = None) -> TrainableCount:
    """Counts the scalars actually held by a prompt set and, when learnable, the verbalizer matrix."""
    return TrainableCount(
        input_prompts = sum(tensor.size for tensor in prompts.input_prompts.values()) if prompts.use_input else 0,
        deep_prompts = sum(tensor.size for tensor in (*prompts.key_prompts.values(), *prompts.value_prompts.values())) if prompts.use_deep else 0,
        verbalizer = verbalizer.weight.size if isinstance(verbalizer, LearnableVerbalizer) else 0
    )
