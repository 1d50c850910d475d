import csv
import json
try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib
from pathlib import Path
from time import perf_counter
from typing import Any, Mapping, Sequence
from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field, ValidationError

from core.action_schema import ActionSchema
from core.errors import ConfigError, DatasetParseError, MissingArtifactError
from core.log import get_logger
from core.workbench import DEFAULT_CACHE_DIR
from decode.framing import Verbalizer
from harness.batch import BatchItem, in_batch_infer
from harness.dataset import bind_dataset, load_dataset, split_continuation
from harness.fewshot import fewshot_subsample
from harness.metrics import accuracy, auto_bleu, bleu, corpus_error_rate, corpus_slot_f1, is_slot_marker
from harness.probe import linear_probe_baseline
from harness.tasks import TaskSplits, build_splits, pretraining_spec
from prompts.accounting import count_trainable, default_prompt_length
from prompts.prompt_set import PromptSet, init_prompts, load_prompts, save_prompts
from prompts.tuning import TuningResult, mean_loss, prompt_tune
from schemas.decode import DecodeConfig
from schemas.example import Example
from schemas.experiment_config import BackboneSection, ExperimentConfig, TaskSection
from schemas.report import MetricsReport
from schemas.task_spec import TaskSpec
from unitizer.synth import synth_corpus
from unitlm.checkpoint import load_checkpoint, read_artifact, save_checkpoint, write_artifact
from unitlm.container import fnv1a64
from unitlm.model import UnitLM
from unitlm.pretrain import pretrain_denoise, pretrain_next_token
from verbalizer.fixed import fixed_from_seed
from verbalizer.learnable import LearnableVerbalizer, load_verbalizer, save_verbalizer

logger = get_logger(__name__)

REPORT_FILE = "report.json"
BACKBONE_FILE = "backbone.spul"
PROMPTS_FILE = "prompts.spul"
VERBALIZER_FILE = "verbalizer.spul"


def apply_overrides(raw: dict[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """
    Sets dotted keys such as "train.learning_rate" in a nested mapping. Values stay as given; validation coerces.

    Raises:
        ConfigError: If a key descends into a value that is not a section.
    """
    for dotted, value in overrides.items():
        *sections, field = dotted.split(".")
        node = raw
        for section in sections:
            child = node.setdefault(section, {})
            if not isinstance(child, dict):
                raise ConfigError(f"override {dotted!r}: {section!r} is not a section")
            node = child
        node[field] = value
    return raw


def load_config(path: str | Path | None, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """
    Reads a TOML experiment config, applies command-line overrides and validates the result.
    Without a path the config is built from the overrides alone.

    Raises:
        MissingArtifactError: If the file does not exist.
        ConfigError: If the file is not valid TOML.
        ValidationError: If the merged config does not validate.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise MissingArtifactError(f"config not found: {path}")
        try:
            raw = tomllib.loads(path.read_text(encoding = "utf-8"))
        except tomllib.TOMLDecodeError as error:
            raise ConfigError(f"{path}: {error}") from error
    return ExperimentConfig.model_validate(apply_overrides(raw, overrides or {}))


def config_fingerprint(config: ExperimentConfig) -> str:
    """FNV-1a 64 of the canonical config JSON, output directory excluded."""
    canonical = json.dumps(config.model_dump(exclude = {"output"}), sort_keys = True, separators = (",", ":"))
    return f"{fnv1a64([canonical.encode('utf-8')]):016x}"


def build_backbone(section: BackboneSection, seed: int) -> UnitLM:
    """
    Loads the configured checkpoint, or pretrains a fresh backbone on the synthetic grammar: next-token prediction
    for decoder-only, span denoising for encoder-decoder.

    Raises:
        MissingArtifactError: If the checkpoint file does not exist.
    """
    if section.checkpoint is not None:
        logger.info("loading backbone from %s", section.checkpoint)
        return load_checkpoint(read_artifact(section.checkpoint))
    lm = UnitLM(section.lm.model_copy(update = {"seed": seed}))
    corpus = [item.units for item in synth_corpus(pretraining_spec(n_units = section.lm.n_units), seed, section.corpus_size)]
    logger.info("pretraining %s backbone on %d utterances", section.lm.variant, len(corpus))
    if lm.encoder_decoder:
        return pretrain_denoise(lm, corpus, section.noise, section.pretrain, seed = seed)
    return pretrain_next_token(lm, corpus, section.pretrain, seed = seed)


def load_splits(section: TaskSection, seed: int, n_units: int) -> TaskSplits:
    """
    The task's splits: generated from the suite, with any split that names a JSONL file read from it instead.

    Raises:
        MissingArtifactError: If a named dataset file does not exist.
        DatasetParseError: If a dataset file is malformed.
        DatasetValidationError: If a dataset does not fit the task.
    """
    splits = build_splits(
        section.name,
        seed,
        section.n_train if section.train is None else 0,
        section.n_valid if section.valid is None else 0,
        section.n_test if section.test is None else 0,
        n_units = n_units,
        conditional_ratio = section.conditional_ratio
    )
    for split in ("train", "valid", "test"):
        path = getattr(section, split)
        if path is not None:
            setattr(splits, split, bind_dataset(load_dataset(path), splits.task, n_units))
    return splits


def make_verbalizer(config: ExperimentConfig, lm: UnitLM, task: TaskSpec) -> Verbalizer:
    if task.emits_units:
        return None
    if config.verbalizer.kind == "learnable":
        return LearnableVerbalizer.create(task.labels, lm.vocab.size, config.verbalizer.temperature, lm.config.dtype)
    return fixed_from_seed(task.labels, lm.vocab, config.seed)


def evaluate_task(
    lm: UnitLM,
    prompts: PromptSet | None,
    verbalizer: Verbalizer,
    task: TaskSpec,
    examples: Sequence[Example],
    config: DecodeConfig | None = None,
    workers: int = 1
) -> dict[str, float]:
    """
    Decodes every example and scores the task's metrics: accuracy for classification, CER over transcript labels
    (and slot F1) for sequence tasks, BLEU, Auto-BLEU-1 and per-step target log-likelihood for continuation, BLEU
    against the target units and per-step target log-likelihood for translation.
    """
    if not examples:
        logger.warning("no examples to evaluate for task %s", task.name)
        return {}
    items = [BatchItem(task = task, prompts = prompts, verbalizer = verbalizer, units = example.units) for example in examples]
    outputs = in_batch_infer(lm, items, config, workers)
    metrics: dict[str, float] = {}
    if task.kind == "classification":
        metrics["accuracy"] = accuracy([output.labels for output in outputs], [example.labels for example in examples])
    elif task.kind == "sequence":
        def transcript(labels: Sequence[str]) -> list[str]:
            return [label for label in labels if not is_slot_marker(label)]

        metrics["cer"] = corpus_error_rate(
            [transcript(output.labels) for output in outputs],
            [transcript(example.labels) for example in examples]
        )
        if "slot_f1" in task.metrics:
            metrics["slot_f1"] = corpus_slot_f1([output.labels for output in outputs], [example.labels for example in examples])
    elif task.kind == "translation":
        metrics["bleu"] = bleu([output.units for output in outputs], [example.target for example in examples])
        metrics["log_likelihood"] = -mean_loss(lm, prompts, None, task, examples)
    else:
        ratio = task.conditional_ratio or 0.0
        targets = [split_continuation(example.units, ratio)[1] for example in examples]
        metrics["bleu"] = bleu([output.units for output in outputs], targets)
        repeated = [auto_bleu(output.units, 1) for output in outputs if output.units]
        metrics["auto_bleu"] = float(np.mean(repeated)) if repeated else 0.0
        metrics["log_likelihood"] = -mean_loss(lm, prompts, None, task, examples)
    return metrics


def output_directory(config: ExperimentConfig, cache_dir: str | Path | None = None) -> Path:
    if config.output is not None:
        return Path(config.output)
    return Path(cache_dir or DEFAULT_CACHE_DIR) / "experiments" / config_fingerprint(config)


class TunedSetup(ActionSchema):
    """
    A frozen backbone with prompts (and verbalizer) tuned for one task, plus the splits they were tuned on.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    lm: UnitLM = Field(description = "The frozen backbone.")
    splits: TaskSplits = Field(description = "The task's splits.")
    train_set: list[Example] = Field(description = "The examples actually tuned on, after few-shot subsampling.")
    tuning: TuningResult = Field(description = "Tuned prompts and verbalizer.")

    @classmethod
    @override
    def description(cls) -> str:
        return "A frozen backbone with prompts tuned for one task."


def tune_for_config(config: ExperimentConfig) -> TunedSetup:
    """
    Pretrains (or loads) and freezes the backbone, builds the task's splits, applies few-shot subsampling and
    prompt-tunes. The prompt length falls back to the backbone family's default for the task kind.

    Raises:
        MissingArtifactError: If a referenced checkpoint or dataset file is missing.
        InsufficientDataError: If few-shot subsampling finds a class with fewer than k examples.
    """
    lm = build_backbone(config.backbone, config.seed)
    lm.freeze()
    splits = load_splits(config.task, config.seed, lm.config.n_units)
    task = splits.task
    train_set = splits.train
    if config.task.fewshot_k is not None:
        train_set = fewshot_subsample(train_set, config.task.fewshot_k, config.seed)
        logger.info("few-shot training set: %d examples (k=%d)", len(train_set), config.task.fewshot_k)

    length = config.prompts.length
    if length is None:
        length = default_prompt_length(lm.config.variant, task.kind)
    prompts = init_prompts(lm.config, length, config.seed, config.prompts.input_prompts, config.prompts.deep_prompts)
    verbalizer = make_verbalizer(config, lm, task)
    tuning = prompt_tune(lm, prompts, verbalizer, task, train_set, splits.valid, config.train, config.seed)
    return TunedSetup(lm = lm, splits = splits, train_set = train_set, tuning = tuning)


def save_setup(setup: TunedSetup, directory: str | Path) -> dict[str, str]:
    """Writes the backbone, the prompts and the verbalizer; returns their paths by kind."""
    directory = Path(directory)
    paths = {
        "backbone": write_artifact(directory / BACKBONE_FILE, save_checkpoint(setup.lm)),
        "prompts": write_artifact(directory / PROMPTS_FILE, save_prompts(setup.tuning.prompts)),
    }
    if setup.tuning.verbalizer is not None:
        paths["verbalizer"] = write_artifact(directory / VERBALIZER_FILE, save_verbalizer(setup.tuning.verbalizer))
    return {kind: str(path) for kind, path in paths.items()}


def run_experiment(config: ExperimentConfig, cache_dir: str | Path | None = None, workers: int = 1) -> MetricsReport:
    """
    Pretrains (or loads) a backbone, freezes it, prompt-tunes on the task and evaluates on the test split. Writes
    the report JSON, the backbone, the prompts and the verbalizer to the output directory.

    Raises:
        MissingArtifactError: If a referenced checkpoint or dataset file is missing.
        InsufficientDataError: If few-shot subsampling finds a class with fewer than k examples.
    """
    started = perf_counter()
    fingerprint = config_fingerprint(config)
    logger.info("experiment %s task=%s seed=%d", fingerprint, config.task.name, config.seed)

    setup = tune_for_config(config)
    lm, task, tuned, test_set = setup.lm, setup.splits.task, setup.tuning, setup.splits.test
    metrics = evaluate_task(lm, tuned.prompts, tuned.verbalizer, task, test_set, config.decode, workers)

    probe = None
    if task.kind == "classification" and task.label_slots == 1 and test_set:
        probe = linear_probe_baseline(lm, task, setup.train_set, test_set, seed = config.seed)
    counts = count_trainable(tuned.prompts, tuned.verbalizer)
    report = MetricsReport(
        task = task.name,
        variant = lm.config.variant,
        metrics = metrics,
        trainable_parameters = counts.total,
        prompt_parameters = counts.prompts,
        probe_parameters = probe.parameter_count if probe is not None else None,
        probe_accuracy = probe.accuracy if probe is not None else None,
        tuning_steps = tuned.steps,
        wall_clock = perf_counter() - started,
        fingerprint = fingerprint,
        seed = config.seed
    )

    directory = output_directory(config, cache_dir)
    save_setup(setup, directory)
    write_report(report, directory / REPORT_FILE)
    logger.info("experiment %s done: %s", fingerprint, json.dumps(metrics, sort_keys = True))
    return report


def write_report(report: MetricsReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    path.write_text(report.model_dump_json(indent = 2) + "\n", encoding = "utf-8")
    return path


def read_report(path: str | Path) -> MetricsReport:
    """
    Raises:
        MissingArtifactError: If the file does not exist.
        DatasetParseError: If the file is not a report.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"report not found: {path}")
    try:
        return MetricsReport.model_validate_json(path.read_text(encoding = "utf-8"))
    except ValidationError as error:
        raise DatasetParseError(1, f"{path} is not a report: {error.errors()[0]['msg']}") from error


def write_report_table(reports: Sequence[MetricsReport], path: str | Path) -> Path:
    """One CSV row per report; metric columns are the union over all reports, empty where a report lacks one."""
    rows = [report.table_row() for report in reports]
    columns: list[str] = []
    for row in rows:
        columns.extend(column for column in row if column not in columns)
    path = Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    with path.open("w", newline = "", encoding = "utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames = columns, restval = "")
        writer.writeheader()
        writer.writerows(rows)
    return path


def load_tuned(
    checkpoint: str | Path,
    prompts: str | Path | None = None,
    verbalizer: str | Path | None = None
) -> tuple[UnitLM, PromptSet | None, Verbalizer]:
    """
    Loads a frozen backbone with saved prompts and verbalizer.

    Raises:
        MissingArtifactError: If a path does not exist.
        BackboneMismatchError: If the prompts were tuned against a different backbone.
    """
    lm = load_checkpoint(read_artifact(checkpoint))
    lm.freeze()
    prompt_set = load_prompts(read_artifact(prompts), lm.content_hash()) if prompts is not None else None
    verbalizer_model = load_verbalizer(read_artifact(verbalizer)) if verbalizer is not None else None
    return lm, prompt_set, verbalizer_model
