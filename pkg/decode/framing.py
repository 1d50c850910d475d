from typing import Sequence

import numpy as np

from core.errors import ConfigError
from decode.search import StepScorer, beam_search
from harness.dataset import split_continuation
from numcore.functional import concat, cross_entropy, log_softmax
from numcore.tensor import Tensor
from prompts.prompt_set import PromptSet
from schemas.decode import UNMAPPED, DecodeConfig, Hypothesis, TaskOutput
from schemas.example import Example
from schemas.task_spec import TaskSpec
from unitlm.model import UnitLM
from verbalizer.fixed import FixedVerbalizer, verbalize_fixed
from verbalizer.learnable import LearnableVerbalizer, transform_logits

Verbalizer = FixedVerbalizer | LearnableVerbalizer | None


def output_space(lm: UnitLM, verbalizer: Verbalizer) -> tuple[int, int]:
    """Size of the search space and the id of eos in it: the vocabulary, or the classes plus eos."""
    if isinstance(verbalizer, LearnableVerbalizer):
        return verbalizer.n_classes + 1, verbalizer.n_classes
    return lm.vocab.size, lm.vocab.eos


def scores_from_logits(lm: UnitLM, verbalizer: Verbalizer, logits: Tensor) -> Tensor:
    """Rows of LM logits, or of class logits W z with the LM's eos logit appended as the last column."""
    if not isinstance(verbalizer, LearnableVerbalizer):
        return logits
    eos = lm.vocab.eos
    return concat([transform_logits(verbalizer.weight, logits), logits[:, eos:eos + 1]], axis = 1)


def framed_logits(
    lm: UnitLM,
    prompts: PromptSet | None,
    verbalizer: Verbalizer,
    source: Sequence[int],
    prefix: Sequence[int],
    memory: Tensor | None = None,
    class_embeddings: Tensor | None = None
) -> Tensor:
    """Scores after every prefix position; under a learnable verbalizer prefix ids are classes fed back as e_hat(y)."""
    if isinstance(verbalizer, LearnableVerbalizer):
        if class_embeddings is None:
            class_embeddings = verbalizer.class_embeddings(lm.embeddings)
        embedded = class_embeddings[list(prefix)] if len(prefix) else None
        logits = lm.forward(source, prompts = prompts, prefix_embeddings = embedded, memory = memory)
    else:
        logits = lm.forward(source, prefix, prompts = prompts, memory = memory)
    return scores_from_logits(lm, verbalizer, logits)


def step_logits(
    lm: UnitLM,
    prompts: PromptSet | None,
    verbalizer: Verbalizer,
    source: Sequence[int],
    prefix: Sequence[int],
    memory: Tensor | None = None,
    class_embeddings: Tensor | None = None
) -> Tensor:
    """
    One decoder step: z_t over |V|, or z_hat_t over |Y| + eos with a learnable verbalizer.

    Raises:
        LengthError: If the prefix would overflow max_positions.
    """
    scores = framed_logits(lm, prompts, verbalizer, source, prefix, memory, class_embeddings)
    return scores[scores.shape[0] - 1]


def make_scorer(lm: UnitLM, prompts: PromptSet | None, verbalizer: Verbalizer, source: Sequence[int]) -> StepScorer:
    """Binds one utterance; encoder memory and class embeddings are computed once and reused across steps."""
    memory = lm.encode(source, prompts) if lm.encoder_decoder else None
    class_embeddings = verbalizer.class_embeddings(lm.embeddings) if isinstance(verbalizer, LearnableVerbalizer) else None

    def score(prefix: Sequence[int]) -> np.ndarray:
        logits = step_logits(lm, prompts, verbalizer, source, prefix, memory, class_embeddings)
        return log_softmax(logits).data

    return score


def beam_decode(
    lm: UnitLM,
    prompts: PromptSet | None,
    source: Sequence[int],
    config: DecodeConfig,
    verbalizer: Verbalizer = None,
    top_k: int = 1
) -> list[Hypothesis]:
    """The top_k finished hypotheses, best first; a greedy config searches with a beam of 1."""
    _, eos = output_space(lm, verbalizer)
    return beam_search(make_scorer(lm, prompts, verbalizer, source), eos, config)[:top_k]


def greedy_decode(
    lm: UnitLM,
    prompts: PromptSet | None,
    source: Sequence[int],
    config: DecodeConfig,
    verbalizer: Verbalizer = None
) -> Hypothesis:
    _, eos = output_space(lm, verbalizer)
    return beam_search(make_scorer(lm, prompts, verbalizer, source), eos, config, 1)[0]


def hypothesis_score(lm: UnitLM, prompts: PromptSet | None, verbalizer: Verbalizer, source: Sequence[int], units: Sequence[int]) -> float:
    """Recomputes the log-probability of a decoded output step by step."""
    score = make_scorer(lm, prompts, verbalizer, source)
    return float(sum(score(units[:step])[token] for step, token in enumerate(units)))


def strip_eos(units: Sequence[int], eos: int) -> list[int]:
    return list(units[:-1]) if units and units[-1] == eos else list(units)


def verbalize(verbalizer: Verbalizer, ids: Sequence[int]) -> list[str]:
    if isinstance(verbalizer, LearnableVerbalizer):
        return [verbalizer.labels[index] if index < verbalizer.n_classes else UNMAPPED for index in ids]
    if isinstance(verbalizer, FixedVerbalizer):
        return [verbalize_fixed(verbalizer, unit) for unit in ids]
    raise ConfigError("this task needs a verbalizer")


def task_source(task: TaskSpec, units: Sequence[int]) -> list[int]:
    """The decoder's input: the seed segment for continuation, the whole utterance otherwise (translation included)."""
    if task.kind == "generation":
        return split_continuation(units, task.conditional_ratio or 0.0)[0]
    return list(units)


def run_task(
    lm: UnitLM,
    prompts: PromptSet | None,
    verbalizer: Verbalizer,
    task: TaskSpec,
    units: Sequence[int],
    config: DecodeConfig | None = None
) -> TaskOutput:
    """
    Speech-to-unit framing. Classification decodes label_slots content steps then eos and verbalizes each; missing
    steps count as UNMAPPED. Sequence tasks decode until eos and verbalize every step. Generation continues the seed
    segment and translation decodes the whole utterance into target units; both return raw units and ignore the
    verbalizer.

    Raises:
        ConfigError: On an unknown task kind, or a classification/sequence task without a verbalizer.
    """
    config = config or DecodeConfig()
    if task.kind not in ("classification", "sequence", "generation", "translation"):
        raise ConfigError(f"unknown task kind {task.kind}")
    active = None if task.emits_units else verbalizer
    if task.kind == "classification":
        config = config.model_copy(update = {"max_length": task.label_slots + 1})
    _, eos = output_space(lm, active)
    best = beam_decode(lm, prompts, task_source(task, units), config, active)[0]
    content = strip_eos(best.units, eos)
    if task.emits_units:
        return TaskOutput(units = content, score = best.score)
    labels = verbalize(active, content)
    if task.kind == "classification":
        labels = (labels + [UNMAPPED] * task.label_slots)[:task.label_slots]
    return TaskOutput(labels = labels, units = content, score = best.score)


def frame_example(lm: UnitLM, verbalizer: Verbalizer, task: TaskSpec, example: Example) -> tuple[list[int], list[int]]:
    """
    Source and teacher-forcing targets (eos included) of a training example in the output space.

    Raises:
        ConfigError: If a classification or sequence task has no verbalizer.
    """
    if task.kind == "generation":
        seed, continuation = split_continuation(example.units, task.conditional_ratio or 0.0)
        return seed, continuation + [lm.vocab.eos]
    if task.kind == "translation":
        return list(example.units), list(example.target) + [lm.vocab.eos]
    _, eos = output_space(lm, verbalizer)
    if isinstance(verbalizer, LearnableVerbalizer):
        index = {label: position for position, label in enumerate(verbalizer.labels)}
        return list(example.units), [index[label] for label in example.labels] + [eos]
    if isinstance(verbalizer, FixedVerbalizer):
        mapping = verbalizer.label_to_unit
        return list(example.units), [mapping[label] for label in example.labels] + [eos]
    raise ConfigError("this task needs a verbalizer")


def example_loss(lm: UnitLM, prompts: PromptSet | None, verbalizer: Verbalizer, task: TaskSpec, example: Example) -> Tensor:
    """Teacher-forced cross-entropy of the framed target sequence, averaged over its steps."""
    active = None if task.emits_units else verbalizer
    source, targets = frame_example(lm, active, task, example)
    scores = framed_logits(lm, prompts, active, source, targets[:-1])
    return cross_entropy(scores, targets)
