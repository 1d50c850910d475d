from typing import Literal
from typing_extensions import override

from pydantic import Field

from core.action_schema import ActionSchema

UNMAPPED = "<unmapped>"


class DecodeConfig(ActionSchema):
    """
    Attributes:
        strategy (Literal["greedy", "beam"]): Search strategy.
        beam (int): Beam size; greedy is beam 1.
        max_length (int): Most output steps, eos included.
        alpha (float): Length normalization exponent for finished hypotheses.
    """
    strategy: Literal["greedy", "beam"] = Field(description = "Search strategy.", default = "beam")
    beam: int = Field(description = "Beam size.", default = 5, ge = 1)
    max_length: int = Field(description = "Most output steps, eos included.", default = 64, ge = 1)
    alpha: float = Field(description = "Length normalization exponent.", default = 0.0, ge = 0, le = 1)

    @property
    def width(self) -> int:
        return 1 if self.strategy == "greedy" else self.beam

    @classmethod
    @override
    def description(cls) -> str:
        return "Decoding strategy, beam size, length cap and length normalization."


class Hypothesis(ActionSchema):
    """
    One decoded output.

    Attributes:
        units (list[int]): Output ids, eos included when finished by it. Ids are classes under a learnable verbalizer.
        score (float): Sum of the per-step log-probabilities of units.
        finished (bool): Whether decoding stopped at eos or at max length.
    """
    units: list[int] = Field(description = "Output ids.", default_factory = list)
    score: float = Field(description = "Cumulative log-probability.", default = 0.0)
    finished: bool = Field(description = "Stopped at eos or max length.", default = False)

    def normalized(self, alpha: float) -> float:
        if alpha == 0 or not self.units:
            return self.score
        return self.score / len(self.units) ** alpha

    @classmethod
    @override
    def description(cls) -> str:
        return "One decoded output with its cumulative log-probability."


class TaskOutput(ActionSchema):
    """
    Attributes:
        labels (list[str]): Verbalized labels; UNMAPPED marks a unit outside the verbalizer's image.
        units (list[int]): Raw decoded units (content only, eos stripped).
        score (float): Log-probability of the decoded hypothesis.
    """
    labels: list[str] = Field(description = "Verbalized labels.", default_factory = list)
    units: list[int] = Field(description = "Raw decoded content units.", default_factory = list)
    score: float = Field(description = "Log-probability of the decoded hypothesis.", default = 0.0)

    @classmethod
    @override
    def description(cls) -> str:
        return "The result of running a task on one utterance."
