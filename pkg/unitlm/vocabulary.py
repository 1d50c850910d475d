from typing import Sequence

from core.errors import VocabularyError
from schemas.lm_config import RESERVED_TOKENS


class Vocabulary():
    """
    Unit ids 0..n_units-1 followed by the reserved ids pad, sep, eos, mask and bos, in that order.

    Attributes:
        n_units (int): Number of quantizer units.
        size (int): |V|, units plus reserved ids.
    """

    def __init__(self, n_units: int) -> None:
        self.n_units = n_units
        self.size = n_units + len(RESERVED_TOKENS)
        self._reserved = {name: n_units + offset for offset, name in enumerate(RESERVED_TOKENS)}

    @property
    def pad(self) -> int:
        return self._reserved["pad"]

    @property
    def sep(self) -> int:
        return self._reserved["sep"]

    @property
    def eos(self) -> int:
        return self._reserved["eos"]

    @property
    def mask(self) -> int:
        return self._reserved["mask"]

    @property
    def bos(self) -> int:
        return self._reserved["bos"]

    @property
    def reserved_ids(self) -> list[int]:
        return list(self._reserved.values())

    @property
    def usable_ids(self) -> list[int]:
        """Ids a verbalizer may map labels to."""
        return list(range(self.n_units))

    def is_reserved(self, unit: int) -> bool:
        return unit >= self.n_units

    def check(self, units: Sequence[int]) -> None:
        """
        Raises:
            VocabularyError: If any id is outside [0, |V|).
        """
        for unit in units:
            if not 0 <= unit < self.size:
                raise VocabularyError(f"unit {unit} outside vocabulary of size {self.size}")
