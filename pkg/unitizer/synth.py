from functools import lru_cache
from string import ascii_lowercase
from typing import Any
from typing_extensions import override

import numpy as np
from pydantic import ConfigDict, Field

from core.action_schema import ActionSchema
from core.errors import ConfigError
from schemas.example import Example
from schemas.synth_spec import SynthSpec
from unitizer.units import deduplicate, deduplicate_aligned

INTENT_SLOTS = ("action", "object", "location")
INTENT_SIZES = (3, 4, 3)
SLOT_TYPES = ("none", "place", "time")


class SynthItem(ActionSchema):
    """
    One generated utterance.

    Attributes:
        units (list[int]): Unit sequence (deduplicated if the spec says so).
        symbols (list[int]): Latent symbol that generated each unit.
        features (np.ndarray | None): Frame features when the spec asks for features; frames are not deduplicated.
        labels (list[str]): Task labels.
        target (list[int]): Target units of a translation pair.
        words (list[int]): Lexicon ids of the words in the utterance.
        class_id (int | None): Command class for classification.
    """
    model_config = ConfigDict(arbitrary_types_allowed = True)

    units: list[int] = Field(description = "Unit sequence.")
    symbols: list[int] = Field(description = "Latent symbol of each unit.")
    features: np.ndarray | None = Field(description = "Frame features.", default = None)
    labels: list[str] = Field(description = "Task labels.", default_factory = list)
    target: list[int] = Field(description = "Target units of a translation pair.", default_factory = list)
    words: list[int] = Field(description = "Lexicon ids of the words.", default_factory = list)
    class_id: int | None = Field(description = "Command class for classification.", default = None)

    def to_example(self) -> Example:
        meta: dict[str, Any] = {"symbols": self.symbols, "words": self.words}
        if self.class_id is not None:
            meta["class_id"] = self.class_id
        return Example(units = self.units, labels = self.labels, target = self.target, meta = meta)

    @classmethod
    @override
    def description(cls) -> str:
        return "One generated utterance with its latent annotation."


class SynthWorld():
    """
    The shared structure behind every corpus drawn from one world seed.

    Attributes:
        emission (np.ndarray): n_symbols x units_per_symbol unit ids; each unit belongs to at most one symbol.
        unit_symbol (dict[int, int]): Inverse emission map.
        lexicon (list[tuple[int, ...]]): Words as symbol sequences without adjacent repeats.
        bigrams (np.ndarray): n_words x n_words word transition probabilities.
        prototypes (np.ndarray): n_units x feature_dim frame prototypes.
        translation (list[int]): Word -> word dictionary of the translation task, a permutation of the lexicon.
    """

    def __init__(self, spec: SynthSpec) -> None:
        rng = np.random.default_rng(spec.world_seed)
        permutation = rng.permutation(spec.n_units)
        self.emission = permutation[:spec.n_symbols * spec.units_per_symbol].reshape(spec.n_symbols, spec.units_per_symbol)
        self.unit_symbol = {int(unit): symbol for symbol, row in enumerate(self.emission) for unit in row}

        seen: set[tuple[int, ...]] = set()
        self.lexicon: list[tuple[int, ...]] = []
        attempts = 0
        while len(self.lexicon) < spec.n_words:
            attempts += 1
            if attempts > 1000 * spec.n_words:
                raise ConfigError("cannot build a lexicon of distinct words with these lengths")
            length = int(rng.integers(spec.min_word_length, spec.max_word_length + 1))
            word = [int(rng.integers(spec.n_symbols))]
            while len(word) < length:
                symbol = int(rng.integers(spec.n_symbols - 1))
                word.append(symbol if symbol < word[-1] else symbol + 1)
            if tuple(word) not in seen:
                seen.add(tuple(word))
                self.lexicon.append(tuple(word))

        weights = rng.random((spec.n_words, spec.n_words)) ** 4
        self.bigrams = weights / weights.sum(axis = 1, keepdims = True)
        self.prototypes = rng.normal(0.0, 1.0, size = (spec.n_units, spec.feature_dim))
        self.slot_types = [SLOT_TYPES[int(value)] for value in rng.integers(len(SLOT_TYPES), size = spec.n_words)]
        dictionary = np.random.default_rng([spec.world_seed, 1])
        self.translation = [int(word) for word in dictionary.permutation(spec.n_words)]


@lru_cache(maxsize = 16)
def _world(spec_json: str) -> SynthWorld:
    return SynthWorld(SynthSpec.model_validate_json(spec_json))


def world_for(spec: SynthSpec) -> SynthWorld:
    """Returns the (cached) world of a spec; only world-defining fields matter."""
    return _world(spec.model_copy(update = {"task": "lm", "noise": 0.0, "output": "units"}).model_dump_json())


def symbol_char(symbol: int) -> str:
    return ascii_lowercase[symbol]


def class_label(class_id: int) -> str:
    return f"class_{class_id}"


def intent_labels() -> list[list[str]]:
    """Label names per intent slot, in (action, object, location) order."""
    return [[f"{slot}_{value}" for value in range(size)] for slot, size in zip(INTENT_SLOTS, INTENT_SIZES)]


def task_labels(spec: SynthSpec) -> list[str]:
    """The label set Y a task built from this spec uses, in class-index order."""
    if spec.task == "classification":
        return [class_label(class_id) for class_id in range(spec.n_classes)]
    if spec.task == "intent":
        return [label for slot in intent_labels() for label in slot]
    if spec.task == "transcription":
        return [symbol_char(symbol) for symbol in range(spec.n_symbols)]
    if spec.task == "slot_filling":
        return [symbol_char(symbol) for symbol in range(spec.n_symbols)] + [f"<{slot}>" for slot in SLOT_TYPES[1:]]
    return []


def validate_spec(spec: SynthSpec) -> None:
    """
    Raises:
        ConfigError: If the spec's fields are inconsistent with each other.
    """
    if spec.n_symbols * spec.units_per_symbol > spec.n_units:
        raise ConfigError("n_symbols x units_per_symbol exceeds n_units")
    if spec.min_word_length > spec.max_word_length or spec.min_repeat > spec.max_repeat or spec.min_words > spec.max_words:
        raise ConfigError("a minimum exceeds its maximum")
    if spec.max_word_length > 1 and spec.n_symbols < 2:
        raise ConfigError("multi-symbol words need at least two symbols")
    if spec.task == "classification" and spec.n_classes > spec.n_words:
        raise ConfigError("n_classes exceeds the lexicon size")
    if spec.task == "intent" and sum(INTENT_SIZES) > spec.n_words:
        raise ConfigError(f"intent needs a lexicon of at least {sum(INTENT_SIZES)} words")


def _draw_words(world: SynthWorld, spec: SynthSpec, rng: np.random.Generator) -> list[int]:
    count = int(rng.integers(spec.min_words, spec.max_words + 1))
    words = [int(rng.integers(spec.n_words))]
    while len(words) < count:
        words.append(int(rng.choice(spec.n_words, p = world.bigrams[words[-1]])))
    return words


def _emit(world: SynthWorld, spec: SynthSpec, words: list[int], rng: np.random.Generator) -> tuple[list[int], list[int]]:
    """Frame-level units and their symbols; one unit is chosen per symbol occurrence and held for its duration."""
    units: list[int] = []
    symbols: list[int] = []
    for word in words:
        for symbol in world.lexicon[word]:
            unit = int(world.emission[symbol][rng.integers(spec.units_per_symbol)])
            for _ in range(int(rng.integers(spec.min_repeat, spec.max_repeat + 1))):
                noisy = spec.noise > 0 and rng.random() < spec.noise
                units.append(int(rng.integers(spec.n_units)) if noisy else unit)
                symbols.append(symbol)
    return units, symbols


def translate(world: SynthWorld, words: list[int]) -> list[int]:
    """
    Target units of a translation pair: every word is replaced by its dictionary entry and each symbol of it is
    emitted once, as the symbol's first unit.
    """
    units = [int(world.emission[symbol][0]) for word in words for symbol in world.lexicon[world.translation[word]]]
    return deduplicate(units)


def _labels_for(world: SynthWorld, spec: SynthSpec, words: list[int], class_id: int | None, intent: list[int]) -> list[str]:
    if spec.task == "classification" and class_id is not None:
        return [class_label(class_id)]
    if spec.task == "intent":
        return [names[value] for names, value in zip(intent_labels(), intent)]
    if spec.task == "transcription":
        return [symbol_char(symbol) for word in words for symbol in world.lexicon[word]]
    if spec.task == "slot_filling":
        labels: list[str] = []
        for word in words:
            labels.extend(symbol_char(symbol) for symbol in world.lexicon[word])
            if world.slot_types[word] != "none":
                labels.append(f"<{world.slot_types[word]}>")
        return labels
    return []


def synth_corpus(spec: SynthSpec, seed: int, n: int) -> list[SynthItem]:
    """
    Draws n utterances from the spec's world. Reproducible for a given (spec, seed, n).

    Classification utterances carry the command word of their class, optionally between filler words.
    Intent utterances are an action word, an object word and a location word.
    Transcription and slot-filling labels spell out the latent symbols; slot filling adds a slot-type marker after
    every word that has one. Translation utterances carry a deterministic target: translate() of their words.

    Raises:
        ConfigError: If the spec is inconsistent or n is negative.
    """
    validate_spec(spec)
    if n < 0:
        raise ConfigError(f"corpus size must be non-negative, got {n}")
    world = world_for(spec)
    rng = np.random.default_rng(seed)
    offsets = np.cumsum((0,) + INTENT_SIZES)
    items: list[SynthItem] = []
    for _ in range(n):
        class_id: int | None = None
        intent: list[int] = []
        if spec.task == "classification":
            class_id = int(rng.integers(spec.n_classes))
            words = [int(rng.integers(spec.n_words)) for _ in range(spec.filler_words)]
            position = int(rng.integers(len(words) + 1))
            words.insert(position, class_id)
        elif spec.task == "intent":
            intent = [int(rng.integers(size)) for size in INTENT_SIZES]
            words = [int(offsets[slot] + value) for slot, value in enumerate(intent)]
        else:
            words = _draw_words(world, spec, rng)

        frame_units, frame_symbols = _emit(world, spec, words, rng)
        features = None
        if spec.output == "features":
            features = world.prototypes[frame_units] + rng.normal(0.0, spec.feature_noise, size = (len(frame_units), spec.feature_dim))
            features = features.reshape(len(frame_units), spec.feature_dim).astype(np.float32)
        units, symbols = deduplicate_aligned(frame_units, frame_symbols) if spec.deduplicate else (frame_units, frame_symbols)
        items.append(
            SynthItem(
                units = units,
                symbols = symbols,
                features = features,
                labels = _labels_for(world, spec, words, class_id, intent),
                target = translate(world, words) if spec.task == "translation" else [],
                words = words,
                class_id = class_id
            )
        )
    return items


def decode_class(world: SynthWorld, spec: SynthSpec, units: list[int]) -> int | None:
    """
    Recovers the command class of a noise-free, filler-free classification utterance through the inverse emission map.

    Returns:
        int | None: The class id, or None when the symbol pattern is not a command word.
    """
    symbols = [world.unit_symbol.get(unit) for unit in units]
    if any(symbol is None for symbol in symbols):
        return None
    collapsed = tuple(symbol for index, symbol in enumerate(symbols) if index == 0 or symbol != symbols[index - 1])
    for class_id in range(spec.n_classes):
        if world.lexicon[class_id] == collapsed:
            return class_id
    return None
