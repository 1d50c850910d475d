from typing import Literal
from typing_extensions import Self, override

from pydantic import Field, model_validator

from core.action_schema import ActionSchema
from schemas.decode import DecodeConfig
from schemas.lm_config import LMConfig, NoiseSpec

TaskName = Literal["classification", "intent", "transcription", "slot_filling", "continuation", "translation"]


class TrainConfig(ActionSchema):
    """
    Optimizer and loop settings shared by pretraining, prompt tuning and the linear probe.

    Attributes:
        learning_rate (float): Adam step size.
        beta1 (float): First-moment decay.
        beta2 (float): Second-moment decay.
        epsilon (float): Adam denominator floor.
        batch_size (int): Examples per optimizer step.
        max_steps (int): Optimizer steps for prompt tuning; epochs bound pretraining instead.
        epochs (int): Passes over the corpus for pretraining and the probe.
        eval_every (int): Steps between validation evaluations.
        patience (int): Evaluations without improvement before stopping early.
        log_every (int): Steps between INFO log lines.
    """
    learning_rate: float = Field(description = "Adam step size.", default = 5e-3, gt = 0)
    beta1: float = Field(description = "First-moment decay.", default = 0.9, ge = 0, lt = 1)
    beta2: float = Field(description = "Second-moment decay.", default = 0.98, ge = 0, lt = 1)
    epsilon: float = Field(description = "Adam denominator floor.", default = 1e-8, gt = 0)
    batch_size: int = Field(description = "Examples per optimizer step.", default = 8, ge = 1)
    max_steps: int = Field(description = "Optimizer steps for prompt tuning.", default = 2000, ge = 0)
    epochs: int = Field(description = "Passes over the corpus for pretraining and the probe.", default = 10, ge = 0)
    eval_every: int = Field(description = "Steps between validation evaluations.", default = 100, ge = 1)
    patience: int = Field(description = "Evaluations without improvement before stopping.", default = 5, ge = 1)
    log_every: int = Field(description = "Steps between INFO log lines.", default = 100, ge = 1)

    @classmethod
    @override
    def description(cls) -> str:
        return "Optimizer and loop settings."


class BackboneSection(ActionSchema):
    """
    Which backbone to use: a saved checkpoint, or a fresh one pretrained on the synthetic grammar.

    Attributes:
        checkpoint (str | None): Path of a SPUL LM checkpoint; when unset the backbone is pretrained.
        lm (LMConfig): Shape of a freshly pretrained backbone.
        corpus_size (int): Synthetic utterances used for pretraining.
        noise (NoiseSpec): Span corruption for encoder-decoder pretraining.
        pretrain (TrainConfig): Pretraining optimizer settings.
    """
    checkpoint: str | None = Field(description = "Path of a saved LM checkpoint.", default = None)
    lm: LMConfig = Field(description = "Shape of a freshly pretrained backbone.", default_factory = LMConfig)
    corpus_size: int = Field(description = "Synthetic utterances used for pretraining.", default = 400, ge = 1)
    noise: NoiseSpec = Field(description = "Span corruption for denoising pretraining.", default_factory = NoiseSpec)
    pretrain: TrainConfig = Field(
        description = "Pretraining optimizer settings.",
        default_factory = lambda: TrainConfig(learning_rate = 3e-3, epochs = 8)
    )

    @classmethod
    @override
    def description(cls) -> str:
        return "Backbone source and pretraining settings."


class TaskSection(ActionSchema):
    """
    The task to tune and evaluate: a synthetic suite task, optionally read from dataset files instead.

    Attributes:
        name (TaskName): Synthetic suite task.
        train (str | None): JSONL training set; generated when unset.
        valid (str | None): JSONL validation set; generated when unset.
        test (str | None): JSONL test set; generated when unset.
        n_train (int): Generated training examples.
        n_valid (int): Generated validation examples.
        n_test (int): Generated test examples.
        fewshot_k (int | None): Subsample the training set to k examples per class.
        conditional_ratio (float): Seed fraction r for continuation.
    """
    name: TaskName = Field(description = "Synthetic suite task.", default = "classification")
    train: str | None = Field(description = "JSONL training set.", default = None)
    valid: str | None = Field(description = "JSONL validation set.", default = None)
    test: str | None = Field(description = "JSONL test set.", default = None)
    n_train: int = Field(description = "Generated training examples.", default = 400, ge = 0)
    n_valid: int = Field(description = "Generated validation examples.", default = 80, ge = 0)
    n_test: int = Field(description = "Generated test examples.", default = 160, ge = 0)
    fewshot_k: int | None = Field(description = "Examples per class kept for few-shot training.", default = None, ge = 1)
    conditional_ratio: float = Field(description = "Seed fraction r for continuation.", default = 0.5, gt = 0, lt = 1)

    @classmethod
    @override
    def description(cls) -> str:
        return "The task to tune and evaluate."


class PromptsSection(ActionSchema):
    """
    Attributes:
        length (int | None): Prompt length l; the per-backbone default when unset.
        input_prompts (bool): Apply input prompts.
        deep_prompts (bool): Apply deep prompts.
    """
    length: int | None = Field(description = "Prompt length l; per-backbone default when unset.", default = None, ge = 0)
    input_prompts: bool = Field(description = "Apply input prompts.", default = True)
    deep_prompts: bool = Field(description = "Apply deep prompts.", default = True)

    @classmethod
    @override
    def description(cls) -> str:
        return "Prompt length and which prompt positions are tuned."


class VerbalizerSection(ActionSchema):
    """
    Attributes:
        kind (Literal["fixed", "learnable"]): Random injective map or learnable linear verbalizer.
        temperature (float): Softmax temperature of the class embeddings.
    """
    kind: Literal["fixed", "learnable"] = Field(description = "Random injective map or learnable matrix.", default = "fixed")
    temperature: float = Field(description = "Softmax temperature of the class embeddings.", default = 0.01, gt = 0)

    @classmethod
    @override
    def description(cls) -> str:
        return "Verbalizer kind and temperature."


class ExperimentConfig(ActionSchema):
    """
    A complete, reproducible experiment: everything that decides a report besides the code.

    Attributes:
        seed (int): Master seed; mandatory.
        output (str | None): Directory for the report and checkpoints; a cache subdirectory when unset.
    """
    seed: int = Field(description = "Master seed.")
    output: str | None = Field(description = "Directory for the report and checkpoints.", default = None)
    backbone: BackboneSection = Field(description = "Backbone source.", default_factory = BackboneSection)
    task: TaskSection = Field(description = "Task settings.", default_factory = TaskSection)
    prompts: PromptsSection = Field(description = "Prompt settings.", default_factory = PromptsSection)
    verbalizer: VerbalizerSection = Field(description = "Verbalizer settings.", default_factory = VerbalizerSection)
    train: TrainConfig = Field(description = "Prompt-tuning settings.", default_factory = TrainConfig)
    decode: DecodeConfig = Field(description = "Decoding settings.", default_factory = DecodeConfig)

    @model_validator(mode = "after")
    def check_task(self) -> Self:
        if self.task.fewshot_k is not None and self.task.name not in ("classification", "intent"):
            raise ValueError("few-shot subsampling needs a classification task")
        return self

    @classmethod
    @override
    def description(cls) -> str:
        return "A complete, reproducible experiment configuration."
