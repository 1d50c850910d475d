from collections import Counter
from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from harness.dataset import load_dataset, save_dataset
from harness.fewshot import DEFAULT_SHOTS, class_key, fewshot_subsample

if TYPE_CHECKING:
    from core.workbench import Workbench


class FewshotCommand(ActionRunner):
    dataset: str = Field(description = "JSONL dataset to subsample.")
    k: int = Field(description = "Examples per class.", default = DEFAULT_SHOTS, ge = 1)
    seed: int = Field(description = "Sampling seed.", default = 0)
    output: str | None = Field(description = "Output JSONL; fewshot.jsonl in the cache when unset.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "fewshot"

    @classmethod
    @override
    def description(cls) -> str:
        return "Keeps exactly k examples per class of a dataset."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        subset = fewshot_subsample(load_dataset(self.dataset), self.k, self.seed)
        path = save_dataset(subset, self.output or workbench.artifact("fewshot.jsonl"))
        counts = Counter(class_key(example) for example in subset)
        return ActionResponse(
            status_code = 200,
            message = f"Kept {len(subset)} examples",
            fields = {"dataset": str(path), "classes": dict(sorted(counts.items()))}
        )
