from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import ConfigError
from harness.dataset import bind_dataset
from schemas.example import Example
from schemas.experiment_config import TaskName
from schemas.synth_spec import SynthSpec
from schemas.task_spec import TaskSpec
from unitizer.synth import INTENT_SLOTS, synth_corpus, task_labels
from verbalizer.export import unit_annotations

# task name -> (kind, metrics)
SUITE: dict[str, tuple[str, list[str]]] = {
    "classification": ("classification", ["accuracy"]),
    "intent": ("classification", ["accuracy"]),
    "transcription": ("sequence", ["cer"]),
    "slot_filling": ("sequence", ["cer", "slot_f1"]),
    "continuation": ("generation", ["bleu", "auto_bleu", "log_likelihood"]),
    "translation": ("translation", ["bleu", "log_likelihood"]),
}
CONTINUATION_RATIOS = (0.25, 0.5, 0.75)


class TaskSplits(ActionSchema):
    """
    Train, validation and test sets of one suite task, with the latent-symbol annotation of every unit seen in
    training (the oracle the verbalizer export checks against).
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    task: TaskSpec = Field(description = "The task the splits are bound to.")
    train: list[Example] = Field(description = "Training examples.", default_factory = list)
    valid: list[Example] = Field(description = "Validation examples.", default_factory = list)
    test: list[Example] = Field(description = "Test examples.", default_factory = list)
    annotations: dict = Field(description = "Unit -> latent symbol counts over the training set.", default_factory = dict)

    @classmethod
    @override
    def description(cls) -> str:
        return "Train, validation and test splits of a suite task."


def synth_spec_for(name: TaskName | str, world_seed: int = 0, n_units: int = 100) -> SynthSpec:
    """
    The generator settings of a suite task. All tasks share the world of world_seed, so one pretrained backbone
    serves every task.
    """
    if name not in SUITE:
        raise ConfigError(f"unknown suite task {name!r}; expected one of {sorted(SUITE)}")
    spec = SynthSpec(task = name, world_seed = world_seed, n_units = n_units)
    if name == "continuation":
        spec = spec.model_copy(update = {"min_words": 2, "max_words": 4})
    if name == "translation":
        spec = spec.model_copy(update = {"max_words": 2})
    return spec


def pretraining_spec(world_seed: int = 0, n_units: int = 100) -> SynthSpec:
    return SynthSpec(task = "lm", world_seed = world_seed, n_units = n_units)


def task_spec_for(name: TaskName | str, conditional_ratio: float = 0.5) -> TaskSpec:
    if name not in SUITE:
        raise ConfigError(f"unknown suite task {name!r}; expected one of {sorted(SUITE)}")
    kind, metrics = SUITE[name]
    return TaskSpec(
        name = name,
        kind = kind,
        labels = task_labels(synth_spec_for(name)),
        label_slots = len(INTENT_SLOTS) if name == "intent" else 1,
        conditional_ratio = conditional_ratio if kind == "generation" else None,
        metrics = list(metrics)
    )


def split_seeds(seed: int, count: int = 3) -> list[int]:
    """Independent sample seeds derived from one master seed."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(count)]


def build_splits(
    name: TaskName | str,
    seed: int,
    n_train: int,
    n_valid: int,
    n_test: int,
    world_seed: int = 0,
    n_units: int = 100,
    conditional_ratio: float = 0.5
) -> TaskSplits:
    """
    Draws the three splits of a suite task from one world with independent seeds, bound to the task.

    Raises:
        ConfigError: On an unknown task name.
        DatasetValidationError: If a generated example does not fit the task (an inconsistent vocabulary size).
    """
    spec = synth_spec_for(name, world_seed, n_units)
    task = task_spec_for(name, conditional_ratio)
    train_seed, valid_seed, test_seed = split_seeds(seed)
    vocab_size = n_units
    train_items = synth_corpus(spec, train_seed, n_train)
    return TaskSplits(
        task = task,
        train = bind_dataset([item.to_example() for item in train_items], task, vocab_size),
        valid = bind_dataset([item.to_example() for item in synth_corpus(spec, valid_seed, n_valid)], task, vocab_size),
        test = bind_dataset([item.to_example() for item in synth_corpus(spec, test_seed, n_test)], task, vocab_size),
        annotations = unit_annotations(train_items)
    )
