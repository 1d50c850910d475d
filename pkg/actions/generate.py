from pathlib import Path
from typing import TYPE_CHECKING, Literal
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.errors import MissingArtifactError
from harness.batch import BatchItem, in_batch_infer
from harness.experiment import load_tuned
from harness.tasks import task_spec_for
from schemas.decode import DecodeConfig
from schemas.experiment_config import TaskName
from unitizer.units import check_units, read_unit_file

if TYPE_CHECKING:
    from core.workbench import Workbench


class GenerateCommand(ActionRunner):
    backbone: str = Field(description = "Backbone checkpoint.")
    task: TaskName = Field(description = "Suite task whose framing is applied to every input.")
    source: str = Field(description = "Unit file, one input utterance per line.", alias = "in")
    out: str | None = Field(description = "JSONL results, one line per input; generate.jsonl in the cache when unset.", default = None)
    prompts: str | None = Field(description = "Tuned prompts; the bare backbone when unset.", default = None)
    verbalizer: str | None = Field(description = "Verbalizer; required for classification and sequence tasks.", default = None)
    strategy: Literal["greedy", "beam"] = Field(description = "Search strategy.", default = "beam")
    beam: int = Field(description = "Beam size.", default = 5, ge = 1)
    max_len: int = Field(description = "Most output steps, eos included.", default = 64, ge = 1)
    alpha: float = Field(description = "Length normalization exponent.", default = 0.0, ge = 0, le = 1)
    conditional_ratio: float = Field(description = "Seed fraction r for continuation.", default = 0.5, gt = 0, lt = 1)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "generate"

    @classmethod
    @override
    def description(cls) -> str:
        return "Runs a prompted frozen backbone over a unit file in a task's framing and writes one JSON result per line."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        if not Path(self.source).is_file():
            raise MissingArtifactError(f"unit file not found: {self.source}")
        utterances = read_unit_file(self.source)
        lm, prompts, verbalizer = load_tuned(self.backbone, self.prompts, self.verbalizer)
        for units in utterances:
            check_units(units, lm.config.n_units)
        task = task_spec_for(self.task, self.conditional_ratio)
        config = DecodeConfig(strategy = self.strategy, beam = self.beam, max_length = self.max_len, alpha = self.alpha)
        items = [BatchItem(task = task, prompts = prompts, verbalizer = verbalizer, units = units) for units in utterances]
        outputs = in_batch_infer(lm, items, config, workbench.workers)

        path = Path(self.out) if self.out is not None else workbench.artifact("generate.jsonl")
        path.parent.mkdir(parents = True, exist_ok = True)
        with path.open("w", encoding = "utf-8") as handle:
            for output in outputs:
                handle.write(output.model_dump_json() + "\n")
        return ActionResponse(
            status_code = 200,
            message = f"Wrote {len(outputs)} {self.task} results",
            fields = {"task": self.task, "results": str(path), "inputs": len(outputs)}
        )
