import csv
from collections import Counter
from pathlib import Path
from typing import Iterable
from typing_extensions import override

import numpy as np
from pydantic import Field

from core.action_schema import ActionSchema
from unitizer.synth import SynthItem, symbol_char
from verbalizer.learnable import LearnableVerbalizer

CSV_COLUMNS = ("class", "rank", "unit", "weight", "symbol", "symbol_purity")


class WeightRow(ActionSchema):
    """
    One exported verbalizer weight.

    Attributes:
        label (str): Class label.
        rank (int): 1-based rank of the unit within the class.
        unit (int): Unit id.
        weight (float): W[class, unit].
        symbol (str): Latent symbol the unit most often carries; empty when the unit was never seen.
        symbol_purity (float): Share of the unit's occurrences carrying that symbol.
    """
    label: str = Field(description = "Class label.")
    rank: int = Field(description = "1-based rank of the unit within the class.", ge = 1)
    unit: int = Field(description = "Unit id.")
    weight: float = Field(description = "W[class, unit].")
    symbol: str = Field(description = "Dominant latent symbol of the unit.", default = "")
    symbol_purity: float = Field(description = "Share of occurrences carrying the dominant symbol.", default = 0.0)

    @classmethod
    @override
    def description(cls) -> str:
        return "One exported verbalizer weight with its latent-symbol annotation."


def unit_annotations(items: Iterable[SynthItem]) -> dict[int, Counter[int]]:
    """How often each unit carries each latent symbol across a generated corpus."""
    counts: dict[int, Counter[int]] = {}
    for item in items:
        for unit, symbol in zip(item.units, item.symbols):
            counts.setdefault(unit, Counter())[symbol] += 1
    return counts


def export_weights(verbalizer: LearnableVerbalizer, annotations: dict[int, Counter[int]], top_n: int = 5) -> list[WeightRow]:
    """
    The top_n units of every class by weight (ties to the lower unit id), annotated with their dominant latent
    symbol. top_n is clamped to |V|.
    """
    weight = verbalizer.weight.data
    top_n = max(0, min(top_n, weight.shape[1]))
    rows: list[WeightRow] = []
    for class_index, label in enumerate(verbalizer.labels):
        order = np.lexsort((np.arange(weight.shape[1]), -weight[class_index]))[:top_n]
        for rank, unit in enumerate(order, start = 1):
            symbol, purity = "", 0.0
            counts = annotations.get(int(unit))
            if counts:
                dominant, hits = min(counts.items(), key = lambda item: (-item[1], item[0]))
                symbol, purity = symbol_char(dominant), hits / sum(counts.values())
            rows.append(
                WeightRow(
                    label = label,
                    rank = rank,
                    unit = int(unit),
                    weight = float(weight[class_index, unit]),
                    symbol = symbol,
                    symbol_purity = purity
                )
            )
    return rows


def write_weights_csv(rows: list[WeightRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    with path.open("w", newline = "") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row.label, row.rank, row.unit, f"{row.weight:.6g}", row.symbol, f"{row.symbol_purity:.4f}"])
    return path


def symbol_agreement(rows: list[WeightRow]) -> float:
    """Share of classes whose top-1 unit's dominant symbol is the class label itself (transcription classes)."""
    top = [row for row in rows if row.rank == 1]
    if not top:
        return 0.0
    return sum(row.symbol == row.label for row in top) / len(top)
