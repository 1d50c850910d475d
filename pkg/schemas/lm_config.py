from typing import Literal
from typing_extensions import Self, override

from pydantic import Field, model_validator

from core.action_schema import ActionSchema

RESERVED_TOKENS = ("pad", "sep", "eos", "mask", "bos")


class LMConfig(ActionSchema):
    """
    Shape and training switches of a unit language model.
    Defaults are the desk-scale backbone: 2 layers per stack, d=64, 4 heads, FFN 256, 100 units + 5 reserved ids.

    Attributes:
        variant (Literal["decoder_only", "encoder_decoder"]): Backbone family.
        n_layers (int): Transformer layers per stack.
        n_heads (int): Attention heads.
        embed_dim (int): Model width d.
        ffn_dim (int): Feed-forward width.
        n_units (int): Quantizer units; reserved ids follow them.
        max_positions (int): Longest sequence, prompts included.
        dropout (float): Dropout rate during pretraining.
        dtype (Literal["f32", "f64"]): Parameter dtype.
        seed (int): Parameter initialization seed.
    """
    variant: Literal["decoder_only", "encoder_decoder"] = Field(description = "Backbone family.", default = "decoder_only")
    n_layers: int = Field(description = "Transformer layers per stack.", default = 2, ge = 1)
    n_heads: int = Field(description = "Attention heads.", default = 4, ge = 1)
    embed_dim: int = Field(description = "Model width d.", default = 64, ge = 1)
    ffn_dim: int = Field(description = "Feed-forward width.", default = 256, ge = 1)
    n_units: int = Field(description = "Quantizer units; reserved ids follow them.", default = 100, ge = 1)
    max_positions: int = Field(description = "Longest sequence, prompts included.", default = 256, ge = 2)
    dropout: float = Field(description = "Dropout rate during pretraining.", default = 0.1, ge = 0, lt = 1)
    dtype: Literal["f32", "f64"] = Field(description = "Parameter dtype.", default = "f32")
    seed: int = Field(description = "Parameter initialization seed.", default = 0)

    @model_validator(mode = "after")
    def check_heads(self) -> Self:
        if self.embed_dim % self.n_heads:
            raise ValueError(f"embed_dim {self.embed_dim} is not divisible by n_heads {self.n_heads}")
        return self

    @property
    def vocab_size(self) -> int:
        return self.n_units + len(RESERVED_TOKENS)

    @property
    def n_stacks(self) -> int:
        return 2 if self.variant == "encoder_decoder" else 1

    @property
    def n_self_attention_layers(self) -> int:
        return self.n_layers * self.n_stacks

    @classmethod
    @override
    def description(cls) -> str:
        return "Shape and training switches of a unit language model."


class NoiseSpec(ActionSchema):
    """
    Span corruption for denoising pretraining: spans are replaced by a single mask id each.

    Attributes:
        mask_ratio (float): Fraction of units covered by masked spans, in [0, 1).
        min_spans (int): Fewest spans per sequence.
        max_spans (int): Most spans per sequence.
    """
    mask_ratio: float = Field(description = "Fraction of units covered by masked spans.", default = 0.3, ge = 0, lt = 1)
    min_spans: int = Field(description = "Fewest spans per sequence.", default = 1, ge = 1)
    max_spans: int = Field(description = "Most spans per sequence.", default = 3, ge = 1)

    @model_validator(mode = "after")
    def check_spans(self) -> Self:
        if self.min_spans > self.max_spans:
            raise ValueError("min_spans exceeds max_spans")
        return self

    @classmethod
    @override
    def description(cls) -> str:
        return "Span corruption settings for denoising pretraining."
