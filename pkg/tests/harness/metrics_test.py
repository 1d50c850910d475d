from typing import Hashable, Sequence
from typing_extensions import override
from unittest import TestCase

import numpy as np

from core.errors import ConfigError, DimensionError, EmptyInputError
from harness.metrics import (
    accuracy,
    auto_bleu,
    bleu,
    corpus_error_rate,
    corpus_slot_f1,
    edit_distance_rate,
    error_rate,
    extract_slots,
    slot_f1,
    tokenize
)


def levenshtein_table(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    table = np.zeros((len(a) + 1, len(b) + 1), dtype = int)
    table[:, 0] = np.arange(len(a) + 1)
    table[0, :] = np.arange(len(b) + 1)
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i, j] = min(table[i - 1, j] + 1, table[i, j - 1] + 1, table[i - 1, j - 1] + (a[i - 1] != b[j - 1]))
    return int(table[-1, -1])


class ErrorRateTest(TestCase):

    @override
    def setUp(self) -> None:
        self.rng = np.random.default_rng(11)

    def test_matches_the_dynamic_program(self) -> None:
        for _ in range(1000):
            hyp = self.rng.integers(0, 5, size = int(self.rng.integers(0, 12))).tolist()
            ref = self.rng.integers(0, 5, size = int(self.rng.integers(1, 12))).tolist()
            self.assertEqual(edit_distance_rate(hyp, ref), levenshtein_table(hyp, ref) / len(ref))

    def test_hand_cases(self) -> None:
        self.assertEqual(error_rate("abcd", "abcd", "char"), 0.0)
        self.assertEqual(edit_distance_rate([], [1, 2, 3, 4]), 1.0)
        self.assertEqual(error_rate("abcd", "abed", "char"), 0.25)
        self.assertEqual(error_rate("the cat sat", "the cat sat down", "word"), 0.25)
        self.assertEqual(error_rate(["k", "ae", "t"], ["k", "ah", "t"], "phone"), 1 / 3)

    def test_tokenize(self) -> None:
        self.assertEqual(tokenize("a b  c", "word"), ["a", "b", "c"])
        self.assertEqual(tokenize("a b", "char"), ["a", "b"])
        self.assertEqual(tokenize(["ab", "c"], "char"), ["a", "b", "c"])

    def test_corpus_rate_weights_by_reference_length(self) -> None:
        self.assertEqual(corpus_error_rate([[1], [1, 2, 3, 4]], [[2], [1, 2, 3, 4]]), 1 / 5)

    def test_errors(self) -> None:
        with self.assertRaises(EmptyInputError):
            edit_distance_rate([1], [])
        with self.assertRaises(DimensionError):
            corpus_error_rate([[1]], [])
        with self.assertRaises(EmptyInputError):
            corpus_error_rate([[1]], [[]])


class SlotF1Test(TestCase):

    def test_pairs_close_at_markers(self) -> None:
        self.assertEqual(extract_slots(["a", "b", "<place>", "c", "d", "<time>", "e"]), [("place", "ab"), ("time", "cd")])

    def test_hand_cases(self) -> None:
        reference = ["a", "<place>", "b", "<time>"]
        self.assertEqual(slot_f1(reference, reference), 1.0)
        self.assertEqual(slot_f1(["c", "<place>"], reference), 0.0)
        self.assertEqual(slot_f1(["a", "<place>", "c", "<time>"], reference), 0.5)
        self.assertEqual(slot_f1(["a", "b"], ["a"]), 1.0)

    def test_corpus_micro_average(self) -> None:
        hypotheses = [["a", "<place>"], ["b", "<time>", "c", "<place>"]]
        references = [["a", "<place>"], ["b", "<time>"]]
        # 2 hits, 3 predicted, 2 expected
        self.assertAlmostEqual(corpus_slot_f1(hypotheses, references), 2 * (2 / 3) * 1.0 / (2 / 3 + 1.0))


class BleuTest(TestCase):

    def test_identical_corpora(self) -> None:
        corpus = [[1, 2, 3, 4, 5], [6, 7, 8, 9]]
        self.assertAlmostEqual(bleu(corpus, corpus), 100.0)

    def test_disjoint_vocabularies(self) -> None:
        self.assertAlmostEqual(bleu([[1, 2, 3, 4]], [[5, 6, 7, 8]]), 0.0)

    def test_closed_form(self) -> None:
        # p1 = 3/4, p2..p4 add-one smoothed: 3/4, 2/3, 1/2, brevity penalty 1
        expected = 100 * (3 / 4 * 3 / 4 * 2 / 3 * 1 / 2) ** 0.25
        self.assertAlmostEqual(bleu([[1, 2, 3, 4]], [[1, 2, 3, 5]]), expected, places = 2)
        self.assertAlmostEqual(expected, 65.8037, places = 3)

    def test_errors(self) -> None:
        with self.assertRaises(DimensionError):
            bleu([[1]], [])
        with self.assertRaises(EmptyInputError):
            bleu([], [])


class AutoBleuTest(TestCase):

    def test_hand_cases(self) -> None:
        self.assertEqual(auto_bleu([1, 2, 3], 1), 0.0)
        self.assertEqual(auto_bleu([4, 4, 4], 1), 1.0)
        self.assertAlmostEqual(auto_bleu(["a", "b", "a", "b"], 2), 2 / 3)

    def test_errors(self) -> None:
        with self.assertRaises(EmptyInputError):
            auto_bleu([1], 2)
        with self.assertRaises(ConfigError):
            auto_bleu([1], 0)


class AccuracyTest(TestCase):

    def test_exact_match(self) -> None:
        self.assertEqual(accuracy([["a"], ["b", "c"]], [["a"], ["b", "d"]]), 0.5)
        self.assertEqual(accuracy([], []), 0.0)
        with self.assertRaises(DimensionError):
            accuracy([["a"]], [])


if __name__ == "__main__":
    from unittest import main
    main()
