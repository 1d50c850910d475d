from typing import Sequence

import numpy as np

from core.errors import InsufficientDataError
from schemas.example import Example

DEFAULT_SHOTS = 10


def class_key(example: Example) -> str:
    """The class an example belongs to; multi-label examples are keyed by their whole label tuple."""
    return "/".join(example.labels)


def fewshot_subsample(examples: Sequence[Example], k: int = DEFAULT_SHOTS, seed: int = 0) -> list[Example]:
    """
    Exactly k examples per class, drawn uniformly without replacement under seed. The result lists classes in
    sorted order and keeps the original order within each class.

    Raises:
        InsufficientDataError: If a class has fewer than k examples; the message names the class.
    """
    by_class: dict[str, list[int]] = {}
    for index, example in enumerate(examples):
        by_class.setdefault(class_key(example), []).append(index)
    rng = np.random.default_rng(seed)
    chosen: list[Example] = []
    for key in sorted(by_class):
        members = by_class[key]
        if len(members) < k:
            raise InsufficientDataError(f"class {key!r} has {len(members)} examples, {k} needed")
        picked = sorted(int(index) for index in rng.choice(members, size = k, replace = False))
        chosen.extend(examples[index] for index in picked)
    return chosen
