from typing import TYPE_CHECKING, Literal
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from harness.dataset import bind_dataset, load_dataset
from harness.experiment import evaluate_task, load_tuned
from harness.tasks import build_splits
from schemas.decode import DecodeConfig
from schemas.experiment_config import TaskName

if TYPE_CHECKING:
    from core.workbench import Workbench


class EvalCommand(ActionRunner):
    checkpoint: str = Field(description = "Backbone checkpoint.")
    prompts: str | None = Field(description = "Tuned prompts; the bare backbone when unset.", default = None)
    verbalizer: str | None = Field(description = "Verbalizer; required for classification and sequence tasks.", default = None)
    task: TaskName = Field(description = "Suite task.", default = "classification")
    test: str | None = Field(description = "JSONL test set; generated from the suite when unset.", default = None)
    n_test: int = Field(description = "Generated test examples.", default = 160, ge = 1)
    seed: int = Field(description = "Master seed the test split is derived from.", default = 0)
    conditional_ratio: float = Field(description = "Seed fraction r for continuation.", default = 0.5, gt = 0, lt = 1)
    strategy: Literal["greedy", "beam"] = Field(description = "Search strategy.", default = "beam")
    beam: int = Field(description = "Beam size.", default = 5, ge = 1)
    max_length: int = Field(description = "Most output steps, eos included.", default = 64, ge = 1)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "eval"

    @classmethod
    @override
    def description(cls) -> str:
        return "Evaluates saved prompts on a suite task's test split."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        lm, prompts, verbalizer = load_tuned(self.checkpoint, self.prompts, self.verbalizer)
        splits = build_splits(
            self.task,
            self.seed,
            0,
            0,
            self.n_test if self.test is None else 0,
            n_units = lm.config.n_units,
            conditional_ratio = self.conditional_ratio
        )
        examples = splits.test if self.test is None else bind_dataset(load_dataset(self.test), splits.task, lm.config.n_units)
        decode = DecodeConfig(strategy = self.strategy, beam = self.beam, max_length = self.max_length)
        metrics = evaluate_task(lm, prompts, verbalizer, splits.task, examples, decode, workbench.workers)
        return ActionResponse(status_code = 200, fields = {"task": self.task, "examples": len(examples), "metrics": metrics})
