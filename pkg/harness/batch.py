from concurrent.futures import ThreadPoolExecutor
from typing import Sequence
from typing_extensions import override

from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import BackboneMismatchError
from decode.framing import Verbalizer, run_task
from prompts.prompt_set import PromptSet
from schemas.decode import DecodeConfig, TaskOutput
from schemas.task_spec import TaskSpec
from unitlm.model import UnitLM


class BatchItem(ActionSchema):
    """
    One request of a mixed-task batch: the task, its own prompts and verbalizer, and the input units.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    task: TaskSpec = Field(description = "The task to run.")
    prompts: PromptSet | None = Field(description = "Prompts tuned for the task.", default = None)
    verbalizer: Verbalizer = Field(description = "Verbalizer for the task.", default = None)
    units: list[int] = Field(description = "Input units.")

    @classmethod
    @override
    def description(cls) -> str:
        return "One item of an in-batch multi-task inference request."


def in_batch_infer(
    lm: UnitLM,
    items: Sequence[BatchItem],
    config: DecodeConfig | None = None,
    workers: int = 1
) -> list[TaskOutput]:
    """
    Runs heterogeneous tasks against one shared frozen backbone, each item with its own prompts. Outputs come back
    in item order and equal running every item alone.

    Raises:
        BackboneMismatchError: If an item's prompts were tuned against a different backbone.
    """
    if not items:
        return []
    backbone = lm.content_hash()
    for index, item in enumerate(items):
        tuned_against = item.prompts.backbone_hash if item.prompts is not None else None
        if tuned_against is not None and tuned_against != backbone:
            raise BackboneMismatchError(f"item {index} was tuned against backbone {tuned_against:#018x}, not {backbone:#018x}")

    def infer(item: BatchItem) -> TaskOutput:
        return run_task(lm, item.prompts, item.verbalizer, item.task, item.units, config)

    if workers <= 1:
        return [infer(item) for item in items]
    with ThreadPoolExecutor(max_workers = workers) as pool:
        return list(pool.map(infer, items))
