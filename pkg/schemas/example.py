from typing import Any
from typing_extensions import override

from pydantic import Field

from core.action_schema import ActionSchema


class Example(ActionSchema):
    """
    One labeled utterance.

    Attributes:
        units (list[int]): The discrete unit sequence, optionally deduplicated.
        labels (list[str]): Ordered labels; one for classification, one per slot for multi-label
            classification, one per output step for sequence tasks, empty for generation and translation.
        target (list[int]): Target units of a translation pair; empty for every other task.
        meta (dict): Generator annotations such as the latent symbol of every unit and the class id.
    """
    units: list[int] = Field(description = "The discrete unit sequence.")
    labels: list[str] = Field(description = "Ordered labels for the utterance.", default_factory = list)
    target: list[int] = Field(description = "Target units of a translation pair.", default_factory = list)
    meta: dict[str, Any] = Field(description = "Generator annotations (latent symbols, class id).", default_factory = dict)

    @classmethod
    @override
    def description(cls) -> str:
        return "One labeled utterance: units, ordered labels and metadata."
