from typing_extensions import override

from pydantic import Field

from core.action_schema import ActionSchema

REPORT_SCHEMA_VERSION = 1


class MetricsReport(ActionSchema):
    """
    The persisted outcome of one experiment. Everything except wall_clock is a deterministic function of
    (config, seed).

    Attributes:
        schema_version (int): Report format version.
        task (str): Suite task name.
        variant (str): Backbone family.
        metrics (dict[str, float]): Per-metric scalar values on the test split.
        trainable_parameters (int): Prompt scalars plus the learnable verbalizer, if any.
        prompt_parameters (int): Prompt scalars alone.
        probe_parameters (int | None): Linear-probe size for classification tasks.
        probe_accuracy (float | None): Linear-probe test accuracy for classification tasks.
        tuning_steps (int): Prompt-tuning optimizer steps taken.
        wall_clock (float): Seconds the experiment took.
        fingerprint (str): FNV-1a hash of the canonical config JSON.
        seed (int): Master seed.
    """
    schema_version: int = Field(description = "Report format version.", default = REPORT_SCHEMA_VERSION)
    task: str = Field(description = "Suite task name.")
    variant: str = Field(description = "Backbone family.")
    metrics: dict[str, float] = Field(description = "Per-metric scalar values on the test split.", default_factory = dict)
    trainable_parameters: int = Field(description = "Prompt and learnable verbalizer scalars.", default = 0)
    prompt_parameters: int = Field(description = "Prompt scalars alone.", default = 0)
    probe_parameters: int | None = Field(description = "Linear-probe parameter count.", default = None)
    probe_accuracy: float | None = Field(description = "Linear-probe test accuracy.", default = None)
    tuning_steps: int = Field(description = "Prompt-tuning optimizer steps taken.", default = 0)
    wall_clock: float = Field(description = "Seconds the experiment took.", default = 0.0)
    fingerprint: str = Field(description = "Hash of the canonical config JSON.")
    seed: int = Field(description = "Master seed.")

    def table_row(self) -> dict[str, str | int | float | None]:
        """A flat mapping for the CSV report table; metrics become metric_<name> columns."""
        row: dict[str, str | int | float | None] = {
            "task": self.task,
            "variant": self.variant,
            "seed": self.seed,
            "fingerprint": self.fingerprint,
            "trainable_parameters": self.trainable_parameters,
            "prompt_parameters": self.prompt_parameters,
            "probe_parameters": self.probe_parameters,
            "probe_accuracy": self.probe_accuracy,
            "tuning_steps": self.tuning_steps,
            "wall_clock": round(self.wall_clock, 3),
        }
        row.update({f"metric_{name}": value for name, value in sorted(self.metrics.items())})
        return row

    @classmethod
    @override
    def description(cls) -> str:
        return "Metrics, parameter counts and provenance of one experiment."
