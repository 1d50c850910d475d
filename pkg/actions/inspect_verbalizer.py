from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.errors import UsageError
from harness.tasks import split_seeds, synth_spec_for
from schemas.experiment_config import TaskName
from schemas.lm_config import RESERVED_TOKENS
from unitizer.synth import synth_corpus
from unitlm.checkpoint import read_artifact
from verbalizer.export import export_weights, symbol_agreement, unit_annotations, write_weights_csv
from verbalizer.learnable import LearnableVerbalizer, load_verbalizer

if TYPE_CHECKING:
    from core.workbench import Workbench


class InspectVerbalizerCommand(ActionRunner):
    verbalizer: str = Field(description = "Learnable verbalizer file.")
    task: TaskName = Field(description = "Suite task whose grammar annotates the units.", default = "transcription")
    top_n: int = Field(description = "Units listed per class.", default = 5, ge = 1)
    n: int = Field(description = "Utterances drawn to annotate units with latent symbols.", default = 400, ge = 1)
    seed: int = Field(description = "Seed of the annotation corpus.", default = 0)
    world_seed: int = Field(description = "World the verbalizer's task was drawn from.", default = 0)
    output: str | None = Field(description = "CSV path; verbalizer_weights.csv in the cache when unset.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "inspect-verbalizer"

    @classmethod
    @override
    def description(cls) -> str:
        return "Exports the top-weighted units of every class of a learnable verbalizer with their latent symbols."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        verbalizer = load_verbalizer(read_artifact(self.verbalizer))
        if not isinstance(verbalizer, LearnableVerbalizer):
            raise UsageError("only a learnable verbalizer has weights to inspect")
        n_units = verbalizer.weight.shape[1] - len(RESERVED_TOKENS)
        items = synth_corpus(synth_spec_for(self.task, self.world_seed, n_units), split_seeds(self.seed)[0], self.n)
        rows = export_weights(verbalizer, unit_annotations(items), self.top_n)
        path = write_weights_csv(rows, self.output or workbench.artifact("verbalizer_weights.csv"))
        return ActionResponse(
            status_code = 200,
            fields = {
                "csv": str(path),
                "symbol_agreement": symbol_agreement(rows),
                "top_units": {row.label: row.unit for row in rows if row.rank == 1},
            }
        )
