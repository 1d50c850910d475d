from pathlib import Path
from tempfile import TemporaryDirectory
from typing_extensions import override
from unittest import TestCase

import numpy as np

from core.errors import DatasetParseError, VocabularyError
from unitizer.units import check_units, deduplicate, deduplicate_aligned, read_unit_file, write_unit_file


class UnitsTest(TestCase):

    @override
    def setUp(self) -> None:
        self.rng = np.random.default_rng(4)
        self.directory = TemporaryDirectory()
        self.path = Path(self.directory.name) / "units.txt"

    @override
    def tearDown(self) -> None:
        self.directory.cleanup()

    def test_collapses_runs(self) -> None:
        self.assertEqual(deduplicate([5, 5, 5, 2, 2, 5, 9]), [5, 2, 5, 9])
        self.assertEqual(deduplicate([]), [])
        self.assertEqual(deduplicate([3]), [3])

    def test_idempotent_without_adjacent_repeats(self) -> None:
        for _ in range(10_000):
            units = self.rng.integers(0, 4, size = int(self.rng.integers(0, 30))).tolist()
            once = deduplicate(units)
            self.assertEqual(deduplicate(once), once)
            self.assertTrue(all(a != b for a, b in zip(once, once[1:])))
            self.assertLessEqual(len(once), len(units))

    def test_aligned_keeps_the_first_annotation_of_each_run(self) -> None:
        units, annotations = deduplicate_aligned([1, 1, 2, 2, 2, 1], [7, 8, 3, 4, 5, 6])
        self.assertEqual(units, [1, 2, 1])
        self.assertEqual(annotations, [7, 3, 6])

    def test_check_units(self) -> None:
        check_units([0, 9], 10)
        with self.assertRaises(VocabularyError):
            check_units([10], 10)
        with self.assertRaises(VocabularyError):
            check_units([-1], 10)

    def test_unit_file_keeps_blank_lines(self) -> None:
        write_unit_file(self.path, [[1, 2, 3], [], [40]])
        self.assertEqual(read_unit_file(self.path), [[1, 2, 3], [], [40]])

    def test_unit_file_errors_carry_the_line_number(self) -> None:
        self.path.write_text("1 2\n3 x\n", encoding = "utf-8")
        with self.assertRaises(DatasetParseError) as context:
            read_unit_file(self.path)
        self.assertEqual(context.exception.line_number, 2)
        self.path.write_text("-4\n", encoding = "utf-8")
        with self.assertRaises(DatasetParseError):
            read_unit_file(self.path)


if __name__ == "__main__":
    from unittest import main
    main()
