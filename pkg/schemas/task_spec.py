from typing import Literal
from typing_extensions import Self, override

from pydantic import Field, model_validator

from core.action_schema import ActionSchema

TaskKind = Literal["classification", "sequence", "generation", "translation"]


class TaskSpec(ActionSchema):
    """
    Describes a downstream task in the speech-to-unit framing.

    Attributes:
        name (str): Task name, used in reports.
        kind (TaskKind): classification, sequence, generation (continuation) or translation (unit-to-unit).
        labels (list[str]): The label set Y, in class-index order. Empty for generation and translation.
        label_slots (int): Number of labels emitted per utterance for classification (3 for intent).
        conditional_ratio (float | None): Seed fraction r for continuation; present iff kind is generation.
        metrics (list[str]): Metric names evaluated for the task.
    """
    name: str = Field(description = "Task name.", default = "task")
    kind: TaskKind = Field(description = "classification, sequence, generation or translation.")
    labels: list[str] = Field(description = "The label set Y in class-index order.", default_factory = list)
    label_slots: int = Field(description = "Labels emitted per utterance for classification.", default = 1, ge = 1)
    conditional_ratio: float | None = Field(description = "Seed fraction r for continuation.", default = None, gt = 0, lt = 1)
    metrics: list[str] = Field(description = "Metric names evaluated for the task.", default_factory = list)

    @model_validator(mode = "after")
    def check_consistency(self) -> Self:
        if (self.kind == "generation") != (self.conditional_ratio is not None):
            raise ValueError("conditional_ratio must be set exactly when kind is generation")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        if not self.emits_units and not self.labels:
            raise ValueError(f"a {self.kind} task needs a label set")
        return self

    @property
    def emits_units(self) -> bool:
        """Generation and translation decode raw units and never use a verbalizer."""
        return self.kind in ("generation", "translation")

    @property
    def label_index(self) -> dict[str, int]:
        return {label: index for index, label in enumerate(self.labels)}

    @classmethod
    @override
    def description(cls) -> str:
        return "Describes a downstream task: kind, label set, conditional ratio and metrics."
