from typing import Callable, Sequence

import numpy as np

from core.errors import InsufficientDataError, UsageError
from core.log import get_logger
from numcore.adam import Adam
from numcore.functional import cross_entropy
from numcore.tensor import Tensor
from schemas.experiment_config import TrainConfig
from schemas.lm_config import NoiseSpec
from unitlm.model import UnitLM
from unitlm.noise import corrupt

logger = get_logger(__name__)


def build_optimizer(params: Sequence[Tensor], train: TrainConfig) -> Adam:
    return Adam(params, learning_rate = train.learning_rate, betas = (train.beta1, train.beta2), epsilon = train.epsilon)


def _train(
    lm: UnitLM,
    corpus: list[list[int]],
    train: TrainConfig,
    epochs: int,
    seed: int,
    example_loss: Callable[[list[int], np.random.Generator], Tensor],
    label: str
) -> UnitLM:
    if lm.frozen:
        raise UsageError("cannot pretrain a frozen backbone")
    if not corpus:
        raise InsufficientDataError("pretraining corpus has no non-empty sequences")
    rng = np.random.default_rng(seed)
    optimizer = build_optimizer(lm.parameters(), train)
    step = 0
    for epoch in range(epochs):
        order = rng.permutation(len(corpus))
        epoch_loss = 0.0
        for start in range(0, len(order), train.batch_size):
            batch = [corpus[index] for index in order[start:start + train.batch_size]]
            optimizer.zero_grad()
            batch_loss = 0.0
            for units in batch:
                loss = example_loss(units, rng) * (1.0 / len(batch))
                loss.backward()
                batch_loss += float(loss.data)
            optimizer.step()
            step += 1
            epoch_loss += batch_loss * len(batch)
            if step % train.log_every == 0:
                logger.info("%s step=%d epoch=%d loss=%.4f", label, step, epoch, batch_loss)
        lm.loss_history.append(epoch_loss / len(corpus))
        logger.debug("%s epoch=%d mean_loss=%.4f", label, epoch, lm.loss_history[-1])
    return lm


def pretrain_next_token(
    lm: UnitLM,
    corpus: Sequence[Sequence[int]],
    train: TrainConfig,
    epochs: int | None = None,
    seed: int = 0
) -> UnitLM:
    """
    Next-token pretraining of a decoder-only backbone: every position predicts the following unit and the last
    position predicts eos. Dropout is active. The model is trained in place; per-epoch mean losses are appended to
    lm.loss_history.

    Raises:
        UsageError: If the backbone is encoder-decoder or frozen.
        InsufficientDataError: If the corpus has no non-empty sequence.
    """
    if lm.encoder_decoder:
        raise UsageError("next-token pretraining needs a decoder-only backbone")
    eos = lm.vocab.eos

    def example_loss(units: list[int], rng: np.random.Generator) -> Tensor:
        return cross_entropy(lm.forward_sequence(units, rng = rng), units[1:] + [eos])

    sequences = [list(units) for units in corpus if len(units)]
    return _train(lm, sequences, train, train.epochs if epochs is None else epochs, seed, example_loss, "pretrain_next_token")


def pretrain_denoise(
    lm: UnitLM,
    corpus: Sequence[Sequence[int]],
    noise: NoiseSpec,
    train: TrainConfig,
    epochs: int | None = None,
    seed: int = 0
) -> UnitLM:
    """
    Denoising pretraining of an encoder-decoder backbone: the encoder reads a span-corrupted sequence and the decoder
    reconstructs the original followed by eos, with teacher forcing. A fresh corruption is drawn every epoch.

    Raises:
        UsageError: If the backbone is decoder-only or frozen.
        InsufficientDataError: If the corpus has no non-empty sequence.
    """
    if not lm.encoder_decoder:
        raise UsageError("denoising pretraining needs an encoder-decoder backbone")
    eos, mask = lm.vocab.eos, lm.vocab.mask

    def example_loss(units: list[int], rng: np.random.Generator) -> Tensor:
        corrupted = corrupt(units, noise, mask, rng)
        return cross_entropy(lm.forward(corrupted, prefix = units, rng = rng), units + [eos])

    sequences = [list(units) for units in corpus if len(units)]
    return _train(lm, sequences, train, train.epochs if epochs is None else epochs, seed, example_loss, "pretrain_denoise")


def next_token_accuracy(lm: UnitLM, corpus: Sequence[Sequence[int]]) -> float:
    """Argmax accuracy of predicting u_{t+1} from u_1..u_t over every in-sequence transition."""
    correct = total = 0
    for units in corpus:
        if len(units) < 2:
            continue
        predicted = lm.forward_sequence(list(units)).data[:-1].argmax(axis = 1)
        correct += int((predicted == np.asarray(units[1:])).sum())
        total += len(units) - 1
    return correct / total if total else 0.0


def reconstruction_accuracy(lm: UnitLM, corpus: Sequence[Sequence[int]], noise: NoiseSpec | None = None, seed: int = 0) -> float:
    """Teacher-forced argmax accuracy of an encoder-decoder reconstructing each sequence (and its eos)."""
    rng = np.random.default_rng(seed)
    correct = total = 0
    for units in corpus:
        if not units:
            continue
        source = corrupt(units, noise, lm.vocab.mask, rng) if noise is not None else list(units)
        predicted = lm.forward(source, prefix = list(units)).data.argmax(axis = 1)
        target = np.asarray(list(units) + [lm.vocab.eos])
        correct += int((predicted == target).sum())
        total += len(target)
    return correct / total if total else 0.0
