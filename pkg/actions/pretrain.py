from typing import TYPE_CHECKING, Literal
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from harness.experiment import build_backbone
from harness.tasks import pretraining_spec, split_seeds
from schemas.experiment_config import BackboneSection, TrainConfig
from schemas.lm_config import LMConfig
from unitizer.synth import synth_corpus
from unitlm.checkpoint import save_checkpoint, write_artifact
from unitlm.pretrain import next_token_accuracy, reconstruction_accuracy

if TYPE_CHECKING:
    from core.workbench import Workbench

HELD_OUT_UTTERANCES = 50


class PretrainCommand(ActionRunner):
    variant: Literal["decoder_only", "encoder_decoder"] = Field(description = "Backbone family.", default = "decoder_only")
    n_layers: int = Field(description = "Layers per stack.", default = 2, ge = 1)
    embed_dim: int = Field(description = "Model width d.", default = 64, ge = 1)
    n_heads: int = Field(description = "Attention heads.", default = 4, ge = 1)
    dtype: Literal["f32", "f64"] = Field(description = "Parameter dtype.", default = "f32")
    corpus_size: int = Field(description = "Synthetic pretraining utterances.", default = 400, ge = 1)
    epochs: int = Field(description = "Passes over the corpus.", default = 8, ge = 0)
    learning_rate: float = Field(description = "Adam step size.", default = 3e-3, gt = 0)
    seed: int = Field(description = "Initialization, corpus and shuffling seed.", default = 0)
    output: str | None = Field(description = "Checkpoint path; backbone.spul in the cache when unset.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "pretrain"

    @classmethod
    @override
    def description(cls) -> str:
        return "Pretrains a unit language model on the synthetic grammar and saves the checkpoint."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        section = BackboneSection(
            lm = LMConfig(variant = self.variant, n_layers = self.n_layers, embed_dim = self.embed_dim, n_heads = self.n_heads, dtype = self.dtype),
            corpus_size = self.corpus_size,
            pretrain = TrainConfig(learning_rate = self.learning_rate, epochs = self.epochs)
        )
        lm = build_backbone(section, self.seed)
        held_out = [item.units for item in synth_corpus(pretraining_spec(n_units = lm.config.n_units), split_seeds(self.seed)[0], HELD_OUT_UTTERANCES)]
        if lm.encoder_decoder:
            held_out_accuracy = reconstruction_accuracy(lm, held_out, section.noise, self.seed)
        else:
            held_out_accuracy = next_token_accuracy(lm, held_out)
        path = write_artifact(self.output or workbench.artifact("backbone.spul"), save_checkpoint(lm))
        return ActionResponse(
            status_code = 200,
            message = f"Pretrained a {self.variant} backbone",
            fields = {
                "checkpoint": str(path),
                "parameters": lm.count_parameters(),
                "hash": f"{lm.content_hash():016x}",
                "loss_history": lm.loss_history,
                "held_out_accuracy": held_out_accuracy,
            }
        )
