from typing import Sequence
from typing_extensions import Self, override

import numpy as np
from pydantic import Field, model_validator

from core.action_schema import ActionSchema
from core.errors import CapacityError, CorruptCheckpointError
from schemas.decode import UNMAPPED
from unitlm.container import decode_container, encode_container
from unitlm.vocabulary import Vocabulary

VERB_TAG = "VERB"


class FixedVerbalizer(ActionSchema):
    """
    An injective label -> unit map drawn at random; units outside its image verbalize to UNMAPPED.

    Attributes:
        labels (list[str]): The label set Y in class-index order.
        units (list[int]): units[i] is the unit that stands for labels[i].
    """
    labels: list[str] = Field(description = "The label set Y in class-index order.")
    units: list[int] = Field(description = "Unit standing for each label.")

    @model_validator(mode = "after")
    def check_injective(self) -> Self:
        if len(self.labels) != len(self.units):
            raise ValueError("every label needs exactly one unit")
        if len(set(self.units)) != len(self.units):
            raise ValueError("a fixed verbalizer must be injective")
        return self

    @property
    def label_to_unit(self) -> dict[str, int]:
        return dict(zip(self.labels, self.units))

    @property
    def unit_to_label(self) -> dict[int, str]:
        return dict(zip(self.units, self.labels))

    @classmethod
    @override
    def description(cls) -> str:
        return "A random injective map from labels to units."


def fixed_from_seed(labels: Sequence[str], vocab: Vocabulary, seed: int) -> FixedVerbalizer:
    """
    Assigns every label a distinct non-reserved unit, uniformly at random under seed.

    Raises:
        CapacityError: If there are more labels than usable units.
    """
    usable = vocab.usable_ids
    if len(labels) > len(usable):
        raise CapacityError(f"{len(labels)} labels do not fit {len(usable)} usable units")
    rng = np.random.default_rng(seed)
    chosen = rng.permutation(np.asarray(usable))[:len(labels)]
    return FixedVerbalizer(labels = list(labels), units = [int(unit) for unit in chosen])


def verbalize_fixed(verbalizer: FixedVerbalizer, unit: int) -> str:
    """The label mapped to unit, or UNMAPPED when the unit is outside the verbalizer's image."""
    return verbalizer.unit_to_label.get(unit, UNMAPPED)


def save_fixed(verbalizer: FixedVerbalizer) -> bytes:
    config = {"kind": "fixed", "labels": verbalizer.labels}
    return encode_container(VERB_TAG, config, {"units": np.asarray(verbalizer.units, dtype = np.int64)})


def load_fixed(config: dict, records: dict[str, np.ndarray]) -> FixedVerbalizer:
    if "units" not in records:
        raise CorruptCheckpointError("fixed verbalizer checkpoint has no unit record")
    return FixedVerbalizer(labels = config["labels"], units = [int(unit) for unit in records["units"]])


def load_verbalizer_blob(blob: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    _, config, records = decode_container(blob, VERB_TAG)
    if config.get("kind") not in ("fixed", "learnable"):
        raise CorruptCheckpointError(f"unknown verbalizer kind {config.get('kind')}")
    return config, records
