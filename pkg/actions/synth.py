from pathlib import Path
from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from harness.dataset import dataset_statistics, save_dataset
from harness.tasks import pretraining_spec, synth_spec_for
from schemas.synth_spec import SynthTask
from unitizer.feature_io import write_features
from unitizer.synth import synth_corpus

if TYPE_CHECKING:
    from core.workbench import Workbench


class SynthCommand(ActionRunner):
    task: SynthTask = Field(description = "Kind of utterances and labels to generate.", default = "classification")
    n: int = Field(description = "Number of utterances.", default = 100, ge = 0)
    seed: int = Field(description = "Sample seed.", default = 0)
    world_seed: int = Field(description = "Seed of the shared emission map and lexicon.", default = 0)
    n_units: int = Field(description = "Number of quantizer units.", default = 100, ge = 1)
    noise: float = Field(description = "Probability of replacing a frame with a random unit.", default = 0.0, ge = 0, lt = 1)
    output: str | None = Field(description = "Dataset JSONL path; <task>.jsonl in the cache when unset.", default = None)
    features: str | None = Field(description = "Also write frame features, one SPFM file per utterance, to this directory.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "synth"

    @classmethod
    @override
    def description(cls) -> str:
        return "Generates a synthetic unit dataset from the shared latent grammar."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        spec = pretraining_spec(self.world_seed, self.n_units) if self.task == "lm" else synth_spec_for(self.task, self.world_seed, self.n_units)
        update: dict[str, object] = {"noise": self.noise}
        if self.features is not None:
            update["output"] = "features"
        items = synth_corpus(spec.model_copy(update = update), self.seed, self.n)
        examples = [item.to_example() for item in items]
        path = save_dataset(examples, self.output or workbench.artifact(f"{self.task}.jsonl"))
        if self.features is not None:
            directory = Path(self.features)
            directory.mkdir(parents = True, exist_ok = True)
            for index, item in enumerate(items):
                if item.features is not None:
                    write_features(directory / f"{index:06d}.spfm", item.features)
        return ActionResponse(
            status_code = 200,
            message = f"Wrote {len(examples)} {self.task} utterances",
            fields = {"dataset": str(path), "statistics": dataset_statistics(examples).model_dump()}
        )
