from typing import Sequence
from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import ContractViolationError
from core.log import get_logger
from decode.framing import Verbalizer, example_loss
from prompts.prompt_set import PromptSet
from schemas.example import Example
from schemas.experiment_config import TrainConfig
from schemas.task_spec import TaskSpec
from unitlm.model import UnitLM
from unitlm.pretrain import build_optimizer
from verbalizer.learnable import LearnableVerbalizer

logger = get_logger(__name__)


class TuningResult(ActionSchema):
    """
    Attributes:
        prompts (PromptSet): The tuned prompts, restored to the best validation checkpoint.
        verbalizer (Verbalizer): The verbalizer, tuned when learnable.
        steps (int): Optimizer steps taken.
        best_valid_loss (float | None): Best validation loss seen, if validation ran.
        stopped_early (bool): Whether patience ran out before max_steps.
        train_losses (list[float]): Mean training loss of every step.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    prompts: PromptSet = Field(description = "The tuned prompts.")
    verbalizer: Verbalizer = Field(description = "The verbalizer, tuned when learnable.", default = None)
    steps: int = Field(description = "Optimizer steps taken.", default = 0)
    best_valid_loss: float | None = Field(description = "Best validation loss seen.", default = None)
    stopped_early: bool = Field(description = "Whether patience ran out.", default = False)
    train_losses: list[float] = Field(description = "Mean training loss per step.", default_factory = list)

    @classmethod
    @override
    def description(cls) -> str:
        return "The outcome of a prompt-tuning run."


def mean_loss(
    lm: UnitLM,
    prompts: PromptSet | None,
    verbalizer: Verbalizer,
    task: TaskSpec,
    examples: Sequence[Example]
) -> float:
    return float(np.mean([float(example_loss(lm, prompts, verbalizer, task, example).data) for example in examples]))


def prompt_tune(
    lm: UnitLM,
    prompts: PromptSet,
    verbalizer: Verbalizer,
    task: TaskSpec,
    train_set: Sequence[Example],
    valid_set: Sequence[Example],
    train: TrainConfig,
    seed: int = 0
) -> TuningResult:
    """
    Teacher-forced prompt tuning against a frozen backbone. Only prompt tensors (and a learnable verbalizer's W)
    receive updates. Validation runs every eval_every steps; after `patience` evaluations without improvement the
    run stops, and the prompts are restored to the best validation point.

    Raises:
        ContractViolationError: If the backbone is not frozen.
    """
    if not lm.frozen:
        raise ContractViolationError("prompt tuning needs a frozen backbone")
    learnable = isinstance(verbalizer, LearnableVerbalizer)
    params = prompts.parameters() + (verbalizer.parameters() if learnable else [])
    result = TuningResult(prompts = prompts, verbalizer = verbalizer)
    prompts.backbone_hash = lm.content_hash()
    if train.max_steps == 0 or not train_set or not params:
        return result

    def snapshot() -> dict[str, np.ndarray]:
        state = prompts.snapshot()
        if learnable:
            state["verbalizer"] = verbalizer.weight.data.copy()
        return state

    def restore(state: dict[str, np.ndarray]) -> None:
        prompts.restore(state)
        if learnable:
            verbalizer.weight.data = state["verbalizer"].copy()

    rng = np.random.default_rng(seed)
    optimizer = build_optimizer(params, train)
    order = rng.permutation(len(train_set))
    cursor = 0
    best_state: dict[str, np.ndarray] | None = None
    bad_evaluations = 0
    for step in range(1, train.max_steps + 1):
        batch: list[Example] = []
        while len(batch) < min(train.batch_size, len(train_set)):
            if cursor == len(order):
                order, cursor = rng.permutation(len(train_set)), 0
            batch.append(train_set[order[cursor]])
            cursor += 1

        optimizer.zero_grad()
        total = 0.0
        for example in batch:
            loss = example_loss(lm, prompts, verbalizer, task, example) * (1.0 / len(batch))
            loss.backward()
            total += float(loss.data)
        optimizer.step()
        result.steps = step
        result.train_losses.append(total)

        if valid_set and step % train.eval_every == 0:
            valid_loss = mean_loss(lm, prompts, verbalizer, task, valid_set)
            if result.best_valid_loss is None or valid_loss < result.best_valid_loss:
                result.best_valid_loss, best_state, bad_evaluations = valid_loss, snapshot(), 0
            else:
                bad_evaluations += 1
            logger.info("prompt_tune step=%d loss=%.4f valid_loss=%.4f patience=%d/%d", step, total, valid_loss, bad_evaluations, train.patience)
            if bad_evaluations >= train.patience:
                result.stopped_early = True
                break
        elif step % train.log_every == 0:
            logger.info("prompt_tune step=%d loss=%.4f", step, total)

    if best_state is not None:
        restore(best_state)
    return result
