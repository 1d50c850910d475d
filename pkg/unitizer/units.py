from itertools import groupby
from pathlib import Path
from typing import Sequence

from core.errors import DatasetParseError, VocabularyError


def deduplicate(units: Sequence[int]) -> list[int]:
    """
    Collapses each maximal run of equal ids to a single id, preserving run order.

    Args:
        units (Sequence[int]): A unit sequence.

    Returns:
        list[int]: The deduplicated sequence.
    """
    return [unit for unit, _ in groupby(units)]


def deduplicate_aligned(units: Sequence[int], annotations: Sequence[int]) -> tuple[list[int], list[int]]:
    """
    Deduplicates units and keeps the annotation of the first element of every run.

    Returns:
        tuple[list[int], list[int]]: The deduplicated units and their annotations.
    """
    kept_units: list[int] = []
    kept_annotations: list[int] = []
    for index, unit in enumerate(units):
        if index == 0 or unit != units[index - 1]:
            kept_units.append(unit)
            kept_annotations.append(annotations[index])
    return kept_units, kept_annotations


def check_units(units: Sequence[int], vocab_size: int) -> None:
    """
    Raises:
        VocabularyError: If any id is negative or not below vocab_size.
    """
    for unit in units:
        if not 0 <= unit < vocab_size:
            raise VocabularyError(f"unit {unit} outside vocabulary of size {vocab_size}")


def read_unit_file(path: str | Path) -> list[list[int]]:
    """
    Reads one utterance per line of space-separated decimal ids. Blank lines are empty utterances.

    Raises:
        DatasetParseError: If a token is not a non-negative integer.
    """
    utterances: list[list[int]] = []
    with open(path, encoding = "utf-8") as handle:
        for line_number, line in enumerate(handle, start = 1):
            try:
                units = [int(token) for token in line.split()]
            except ValueError as error:
                raise DatasetParseError(line_number, f"not an integer unit id: {error}") from error
            if any(unit < 0 for unit in units):
                raise DatasetParseError(line_number, "negative unit id")
            utterances.append(units)
    return utterances


def write_unit_file(path: str | Path, utterances: Sequence[Sequence[int]]) -> None:
    with open(path, "w", encoding = "utf-8") as handle:
        for units in utterances:
            handle.write(" ".join(str(unit) for unit in units) + "\n")
