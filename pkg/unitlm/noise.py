from typing import Sequence

import numpy as np

from schemas.lm_config import NoiseSpec


def corrupt(units: Sequence[int], spec: NoiseSpec, mask_id: int, rng: np.random.Generator) -> list[int]:
    """
    Span corruption: round(mask_ratio * T) units, split into between min_spans and max_spans separated spans, are
    removed and each span is replaced by one mask id. The result is never longer than the input.
    """
    length = len(units)
    total = int(round(spec.mask_ratio * length))
    if total == 0:
        return list(units)
    spans = min(int(rng.integers(spec.min_spans, spec.max_spans + 1)), total, length - total + 1)

    cuts = np.sort(rng.choice(np.arange(1, total), size = spans - 1, replace = False)) if spans > 1 else np.array([], dtype = np.int64)
    span_lengths = np.diff(np.concatenate([[0], cuts, [total]])).astype(int)

    # spans - 1 inner gaps need at least one kept unit each
    free = length - total - (spans - 1)
    gaps = rng.multinomial(free, np.full(spans + 1, 1.0 / (spans + 1)))
    gaps[1:-1] += 1

    corrupted: list[int] = []
    position = 0
    for span, span_length in enumerate(span_lengths):
        corrupted.extend(units[position:position + gaps[span]])
        position += gaps[span]
        corrupted.append(mask_id)
        position += span_length
    corrupted.extend(units[position:])
    return corrupted
