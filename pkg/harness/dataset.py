import json
import math
from pathlib import Path
from typing import Sequence
from typing_extensions import override

from pydantic import Field, ValidationError

from core.action_schema import ActionSchema
from core.errors import ConfigError, DatasetParseError, DatasetValidationError, MissingArtifactError
from schemas.example import Example
from schemas.task_spec import TaskSpec
from unitizer.units import deduplicate

SCHEMA_VERSION = 1


class DatasetStatistics(ActionSchema):
    """
    Attributes:
        examples (int): Number of examples.
        mean_units (float): Mean unit-sequence length.
        mean_deduplicated_units (float): Mean length after collapsing repeated units.
        mean_labels (float): Mean number of labels per example.
    """
    examples: int = Field(description = "Number of examples.", default = 0)
    mean_units: float = Field(description = "Mean unit-sequence length.", default = 0.0)
    mean_deduplicated_units: float = Field(description = "Mean deduplicated length.", default = 0.0)
    mean_labels: float = Field(description = "Mean labels per example.", default = 0.0)

    @classmethod
    @override
    def description(cls) -> str:
        return "Length statistics of a dataset."


def load_dataset(path: str | Path) -> list[Example]:
    """
    Reads a JSON-lines dataset: one object per line with units, labels and meta. Blank lines are skipped.

    Raises:
        MissingArtifactError: If the file does not exist.
        DatasetParseError: If a line is not valid JSON, does not describe an example, or has a foreign schema_version.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"dataset not found: {path}")
    examples: list[Example] = []
    with path.open(encoding = "utf-8") as handle:
        for line_number, line in enumerate(handle, start = 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as error:
                raise DatasetParseError(line_number, f"invalid JSON: {error.msg}") from error
            if not isinstance(record, dict):
                raise DatasetParseError(line_number, "expected a JSON object")
            version = record.pop("schema_version", SCHEMA_VERSION)
            if version != SCHEMA_VERSION:
                raise DatasetParseError(line_number, f"unsupported schema_version {version}")
            try:
                examples.append(Example.model_validate(record))
            except ValidationError as error:
                raise DatasetParseError(line_number, str(error.errors()[0]["msg"])) from error
    return examples


def save_dataset(examples: Sequence[Example], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    with path.open("w", encoding = "utf-8") as handle:
        for example in examples:
            handle.write(json.dumps({"schema_version": SCHEMA_VERSION, **example.model_dump()}) + "\n")
    return path


def bind_dataset(examples: Sequence[Example], task: TaskSpec, vocab_size: int) -> list[Example]:
    """
    Checks a dataset against the task and vocabulary it will be used with.

    Raises:
        DatasetValidationError: On a unit outside [0, vocab_size), a label outside the task's label set, a
            classification example with the wrong number of labels, a continuation utterance too short to split, or a
            translation example without target units.
    """
    known = set(task.labels)
    for index, example in enumerate(examples):
        bad_units = [unit for unit in example.units + example.target if not 0 <= unit < vocab_size]
        if bad_units:
            raise DatasetValidationError(f"example {index}: unit {bad_units[0]} outside vocabulary of size {vocab_size}")
        if not task.emits_units:
            unknown = [label for label in example.labels if label not in known]
            if unknown:
                raise DatasetValidationError(f"example {index}: label {unknown[0]!r} is not in task {task.name}")
        if task.kind == "classification" and len(example.labels) != task.label_slots:
            raise DatasetValidationError(f"example {index}: {len(example.labels)} labels, task expects {task.label_slots}")
        if task.kind == "generation" and len(example.units) < 2:
            raise DatasetValidationError(f"example {index}: continuation needs at least two units")
        if task.kind == "translation" and not example.target:
            raise DatasetValidationError(f"example {index}: translation needs target units")
    return list(examples)


def dataset_statistics(examples: Sequence[Example]) -> DatasetStatistics:
    if not examples:
        return DatasetStatistics()
    count = len(examples)
    return DatasetStatistics(
        examples = count,
        mean_units = sum(len(example.units) for example in examples) / count,
        mean_deduplicated_units = sum(len(deduplicate(example.units)) for example in examples) / count,
        mean_labels = sum(len(example.labels) for example in examples) / count
    )


def split_continuation(units: Sequence[int], ratio: float) -> tuple[list[int], list[int]]:
    """
    Seed = the first ceil(r * len) units, target = the rest.

    Raises:
        ConfigError: If r is outside (0, 1), the utterance has fewer than two units, or either side would be empty.
    """
    if not 0 < ratio < 1:
        raise ConfigError(f"conditional ratio must lie in (0, 1), got {ratio}")
    if len(units) < 2:
        raise ConfigError(f"cannot split an utterance of {len(units)} units")
    cut = math.ceil(round(ratio * len(units), 9))
    if cut >= len(units):
        raise ConfigError(f"ratio {ratio} leaves no continuation for {len(units)} units")
    return list(units[:cut]), list(units[cut:])
