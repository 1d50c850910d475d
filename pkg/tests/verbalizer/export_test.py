from collections import Counter
from pathlib import Path
from tempfile import TemporaryDirectory
from typing_extensions import override
from unittest import TestCase

import numpy as np

from numcore.tensor import Tensor
from unitizer.synth import SynthItem
from verbalizer.export import CSV_COLUMNS, export_weights, symbol_agreement, unit_annotations, write_weights_csv
from verbalizer.learnable import LearnableVerbalizer


class ExportTest(TestCase):

    @override
    def setUp(self) -> None:
        weight = np.array([
            [0.1, 0.9, 0.5, 0.9],
            [0.7, 0.0, 0.2, 0.1]
        ])
        self.verbalizer = LearnableVerbalizer(labels = ["a", "b"], weight = Tensor(weight, trainable = True))
        self.annotations = {1: Counter({0: 3, 1: 1}), 0: Counter({1: 2}), 3: Counter({2: 1, 0: 1})}

    def test_annotations_count_symbols_per_unit(self) -> None:
        items = [SynthItem(units = [4, 5, 4], symbols = [0, 1, 2]), SynthItem(units = [4], symbols = [0])]
        self.assertEqual(unit_annotations(items), {4: Counter({0: 2, 2: 1}), 5: Counter({1: 1})})

    def test_top_units_per_class(self) -> None:
        rows = export_weights(self.verbalizer, self.annotations, top_n = 2)
        self.assertEqual([(row.label, row.rank, row.unit) for row in rows], [("a", 1, 1), ("a", 2, 3), ("b", 1, 0), ("b", 2, 2)])
        self.assertEqual(rows[0].symbol, "a")
        self.assertAlmostEqual(rows[0].symbol_purity, 0.75)
        # a 1:1 tie resolves to the lower symbol
        self.assertEqual(rows[1].symbol, "a")
        self.assertEqual(rows[3].symbol, "")

    def test_top_n_is_clamped(self) -> None:
        self.assertEqual(len(export_weights(self.verbalizer, {}, top_n = 10)), 8)

    def test_symbol_agreement(self) -> None:
        rows = export_weights(self.verbalizer, self.annotations, top_n = 1)
        self.assertEqual(symbol_agreement(rows), 1.0)
        self.assertEqual(symbol_agreement([]), 0.0)

    def test_csv(self) -> None:
        with TemporaryDirectory() as directory:
            path = write_weights_csv(export_weights(self.verbalizer, self.annotations, top_n = 1), Path(directory) / "out" / "weights.csv")
            lines = path.read_text().splitlines()
        self.assertEqual(lines[0], ",".join(CSV_COLUMNS))
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[1].startswith("a,1,1,0.9,a,"))


if __name__ == "__main__":
    from unittest import main
    main()
