from typing import Sequence

import numpy as np

from core.errors import EmptyInputError, LengthError, UsageError
from numcore.functional import concat, dropout, embedding
from numcore.tensor import Tensor, matmul, resolve_dtype
from prompts.prompt_set import PromptSet, apply_input_prompts, stack_names
from schemas.lm_config import LMConfig
from unitlm.container import array_payload, fnv1a64
from unitlm.layers import Params, causal_mask, init_layer, norm, transformer_layer
from unitlm.vocabulary import Vocabulary

EMBED_STD = 0.02


def init_parameters(config: LMConfig) -> Params:
    """Draws every backbone parameter deterministically from config.seed."""
    rng = np.random.default_rng(config.seed)
    dtype = resolve_dtype(config.dtype)
    params: Params = {
        "embed": Tensor(rng.normal(0.0, EMBED_STD, size = (config.vocab_size, config.embed_dim)).astype(dtype), trainable = True, name = "embed"),
        "positions": Tensor(rng.normal(0.0, EMBED_STD, size = (config.max_positions, config.embed_dim)).astype(dtype), trainable = True, name = "positions")
    }
    encoder_decoder = config.variant == "encoder_decoder"
    for stack in stack_names(config):
        cross = encoder_decoder and stack == "decoder"
        for layer in range(config.n_layers):
            params.update(init_layer(rng, f"{stack}.{layer}", config.embed_dim, config.ffn_dim, config.n_layers, dtype, cross))
        for name, value in (("gamma", np.ones(config.embed_dim, dtype = dtype)), ("beta", np.zeros(config.embed_dim, dtype = dtype))):
            params[f"{stack}.ln_final.{name}"] = Tensor(value, trainable = True, name = f"{stack}.ln_final.{name}")
    return params


class UnitLM():
    """
    A transformer language model over discrete units, either decoder-only or encoder-decoder.

    Pre-norm layers, bias-free attention projections, learned absolute positions and an output projection tied to
    the input embeddings. Prompt vectors are accepted on every forward pass; once frozen, only prompts (and an
    optional verbalizer) receive gradients.

    Attributes:
        config (LMConfig): Shape of the model.
        vocab (Vocabulary): Unit and reserved ids.
        params (dict[str, Tensor]): Named parameters.
        frozen (bool): Whether the backbone is excluded from training.
    """

    def __init__(self, config: LMConfig, params: Params | None = None) -> None:
        self.config = config
        self.vocab = Vocabulary(config.n_units)
        self.params = params if params is not None else init_parameters(config)
        self.frozen = False
        self.loss_history: list[float] = []

    @property
    def encoder_decoder(self) -> bool:
        return self.config.variant == "encoder_decoder"

    @property
    def embeddings(self) -> Tensor:
        return self.params["embed"]

    def parameters(self) -> list[Tensor]:
        return list(self.params.values())

    def freeze(self) -> None:
        for tensor in self.params.values():
            tensor.trainable = False
            tensor.requires_grad = False
            tensor.grad = None
        self.frozen = True

    def unfreeze(self) -> None:
        for tensor in self.params.values():
            tensor.trainable = True
            tensor.requires_grad = True
            tensor.grad = np.zeros_like(tensor.data)
        self.frozen = False

    def content_hash(self) -> int:
        """FNV-1a 64 over every parameter payload in name order."""
        return fnv1a64(array_payload(self.params[name].data) for name in sorted(self.params))

    def count_parameters(self) -> int:
        return sum(tensor.size for tensor in self.params.values())

    def embed_units(self, units: Sequence[int]) -> Tensor:
        self.vocab.check(units)
        return embedding(self.embeddings, list(units))

    def add_positions(self, x: Tensor, start: int = 0) -> Tensor:
        if start + x.shape[0] > self.config.max_positions:
            raise LengthError(f"{start + x.shape[0]} positions exceed max_positions {self.config.max_positions}")
        return x + embedding(self.params["positions"], np.arange(start, start + x.shape[0]))

    def project(self, hidden: Tensor) -> Tensor:
        """Tied output projection: logits = h e^T."""
        return matmul(hidden, self.embeddings.T)

    def check_length(self, rows: int, prompts: PromptSet | None) -> None:
        total = rows + (prompts.length if prompts is not None else 0)
        if total > self.config.max_positions:
            raise LengthError(f"sequence of {total} positions (prompts included) exceeds {self.config.max_positions}")

    def run_stack(
        self,
        stack: str,
        x: Tensor,
        prompts: PromptSet | None = None,
        memory: Tensor | None = None,
        causal: bool = True,
        keep_prompt_rows: bool = False,
        rng: np.random.Generator | None = None
    ) -> Tensor:
        """Runs one stack over already-embedded rows; input prompts are prepended, deep prompts enter every layer."""
        input_prompt = prompts.input_prompt(stack) if prompts is not None else None
        x = apply_input_prompts(x, input_prompt)
        n_input_rows = input_prompt.shape[0] if input_prompt is not None else 0
        x = dropout(x, self.config.dropout, rng)
        rows = x.shape[0]
        for layer in range(self.config.n_layers):
            deep = prompts.deep_prompt(stack, layer) if prompts is not None else None
            n_deep = deep[0].shape[0] if deep is not None else 0
            mask = causal_mask(rows, rows, n_deep) if causal else None
            x = transformer_layer(
                self.params,
                f"{stack}.{layer}",
                x,
                self.config.n_heads,
                mask,
                deep_prompt = deep,
                memory = memory,
                dropout_rate = self.config.dropout,
                rng = rng
            )
        x = norm(self.params, f"{stack}.ln_final", x)
        if n_input_rows and not keep_prompt_rows:
            x = x[n_input_rows:]
        return x

    def embed_source(self, source: Sequence[int]) -> Tensor:
        """g1 = e(u) + pos."""
        return self.add_positions(self.embed_units(source))

    def encode(self, source: Sequence[int], prompts: PromptSet | None = None, rng: np.random.Generator | None = None) -> Tensor:
        """
        Encoder memory of an encoder-decoder model, prompt rows included.

        Raises:
            EmptyInputError: If the source is empty.
            LengthError: If the source plus prompts exceed max_positions.
        """
        if not source:
            raise EmptyInputError("encoder-decoder input is empty")
        self.check_length(len(source), prompts)
        return self.run_stack("encoder", self.embed_source(source), prompts, causal = False, keep_prompt_rows = True, rng = rng)

    def decoder_rows(
        self,
        source: Sequence[int],
        prefix: Sequence[int],
        prefix_embeddings: Tensor | None = None
    ) -> Tensor:
        """
        Embedded decoder input before prompts. Decoder-only: [u^x, sep, y_1..y_n]; encoder-decoder: [bos, y_1..y_n].
        prefix_embeddings, when given, stand in for e(y) (a learnable verbalizer's class embeddings).
        """
        head = ([] if self.encoder_decoder else list(source)) + [self.vocab.bos if self.encoder_decoder else self.vocab.sep]
        parts = [self.embed_units(head)]
        if prefix_embeddings is not None:
            if prefix_embeddings.shape[0]:
                parts.append(prefix_embeddings)
        elif prefix:
            parts.append(self.embed_units(prefix))
        return self.add_positions(concat(parts, axis = 0))

    def embed_decoder_input(self, source: Sequence[int], prefix: Sequence[int] = ()) -> Tensor:
        """
        h1 = [e(u^x), e(sep), e(y_<t)] plus positions, for the decoder-only variant.

        Raises:
            UsageError: If called on an encoder-decoder model.
        """
        if self.encoder_decoder:
            raise UsageError("embed_decoder_input is defined for decoder-only models; use encode for encoder-decoder")
        return self.decoder_rows(source, prefix)

    def forward(
        self,
        source: Sequence[int],
        prefix: Sequence[int] = (),
        prompts: PromptSet | None = None,
        prefix_embeddings: Tensor | None = None,
        memory: Tensor | None = None,
        rng: np.random.Generator | None = None
    ) -> Tensor:
        """
        Logits for the next output after every prefix position.

        Args:
            source (Sequence[int]): Input units u^x.
            prefix (Sequence[int]): Output prefix y_1..y_n already decoded (or the teacher-forced target).
            prompts (PromptSet | None): Prompt vectors to apply.
            prefix_embeddings (Tensor | None): n x d rows replacing e(prefix).
            memory (Tensor | None): Precomputed encoder memory for encoder-decoder models.
            rng (np.random.Generator | None): Enables dropout when given.

        Returns:
            Tensor: (n + 1) x |V| logits; row t scores y_{t+1}.

        Raises:
            LengthError: If the sequence plus prompts exceeds max_positions.
            VocabularyError: If an id is outside the vocabulary.
        """
        n_prefix = prefix_embeddings.shape[0] if prefix_embeddings is not None else len(prefix)
        if self.encoder_decoder:
            if memory is None:
                memory = self.encode(source, prompts, rng)
            self.check_length(n_prefix + 1, prompts)
            rows = self.decoder_rows(source, prefix, prefix_embeddings)
            hidden = self.run_stack("decoder", rows, prompts, memory = memory, rng = rng)
        else:
            self.check_length(len(source) + 1 + n_prefix, prompts)
            rows = self.decoder_rows(source, prefix, prefix_embeddings)
            hidden = self.run_stack("decoder", rows, prompts, rng = rng)
            hidden = hidden[len(source):]
        return self.project(hidden)

    def forward_sequence(self, units: Sequence[int], prompts: PromptSet | None = None, rng: np.random.Generator | None = None) -> Tensor:
        """Decoder-only next-token logits over a plain unit sequence: row t scores u_{t+1}."""
        self.check_length(len(units), prompts)
        return self.project(self.run_stack("decoder", self.add_positions(self.embed_units(units)), prompts, rng = rng))

    def source_states(self, source: Sequence[int]) -> Tensor:
        """Final hidden states of the unprompted model over the source, one row per unit."""
        if self.encoder_decoder:
            return self.encode(source)
        if not source:
            raise EmptyInputError("cannot summarize an empty sequence")
        self.check_length(len(source), None)
        return self.run_stack("decoder", self.embed_source(source))
