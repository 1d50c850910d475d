from typing import Sequence
from typing_extensions import override
from unittest import TestCase

import numpy as np

from decode.framing import make_scorer, output_space
from decode.search import StepScorer, beam_search, exhaustive_search, greedy_search
from numcore.tensor import Tensor
from schemas.decode import DecodeConfig
from schemas.lm_config import LMConfig
from unitlm.model import UnitLM
from verbalizer.learnable import LearnableVerbalizer


def random_scorer(space: int, seed: int) -> StepScorer:
    """A fixed random distribution for every prefix, independent of the order prefixes are visited in."""
    def score(prefix: Sequence[int]) -> np.ndarray:
        logits = np.random.default_rng([seed, len(prefix), *prefix]).normal(0.0, 2.0, size = space)
        return logits - np.log(np.exp(logits).sum())

    return score


class BeamSearchTest(TestCase):

    @override
    def setUp(self) -> None:
        self.rng = np.random.default_rng(8)

    def assert_same_best(self, score: StepScorer, eos: int, space: int, max_length: int) -> None:
        reference = exhaustive_search(score, eos, space, max_length)
        found = beam_search(score, eos, DecodeConfig(beam = space ** max_length, max_length = max_length))
        self.assertEqual(found[0].units, reference[0].units)
        self.assertEqual(found[0].score, reference[0].score)

    def test_toy_model_matches_enumeration(self) -> None:
        self.assert_same_best(random_scorer(3, 0), 2, 3, 2)

    def test_random_tables_match_enumeration(self) -> None:
        for seed in range(30):
            space = int(self.rng.integers(2, 5))
            max_length = int(self.rng.integers(1, 4))
            with self.subTest(seed = seed):
                self.assert_same_best(random_scorer(space, seed), int(self.rng.integers(space)), space, max_length)

    def test_tiny_models_match_enumeration(self) -> None:
        for seed in range(20):
            lm = UnitLM(LMConfig(n_layers = 1, n_heads = 1, embed_dim = 4, ffn_dim = 8, n_units = 4, max_positions = 16, dtype = "f64", seed = seed))
            n_labels = int(self.rng.integers(1, 4))
            verbalizer = LearnableVerbalizer(
                labels = [f"y{index}" for index in range(n_labels)],
                weight = Tensor(self.rng.normal(0.0, 3.0, size = (n_labels, lm.vocab.size)), trainable = True),
                temperature = 1.0
            )
            space, eos = output_space(lm, verbalizer)
            source = self.rng.integers(0, 4, size = 3).tolist()
            with self.subTest(seed = seed):
                self.assert_same_best(make_scorer(lm, None, verbalizer, source), eos, space, int(self.rng.integers(1, 4)))

    def test_no_beam_beats_the_full_beam(self) -> None:
        for seed in range(10):
            score = random_scorer(4, seed)
            full = beam_search(score, 3, DecodeConfig(beam = 64, max_length = 3))[0].score
            for width in (1, 2, 4, 8):
                self.assertLessEqual(beam_search(score, 3, DecodeConfig(beam = width, max_length = 3))[0].score, full + 1e-12)

    def test_enumeration_counts_every_outcome(self) -> None:
        outcomes = exhaustive_search(random_scorer(3, 1), 2, 3, 2)
        # length-1 eos, plus 2 non-eos first steps times 3 second steps
        self.assertEqual(len(outcomes), 1 + 2 * 3)
        self.assertAlmostEqual(sum(np.exp(h.score) for h in outcomes), 1.0)

    def test_greedy_follows_the_argmax(self) -> None:
        def score(prefix: Sequence[int]) -> np.ndarray:
            return np.log(np.array([0.1, 0.6, 0.3]) if len(prefix) < 2 else np.array([0.1, 0.1, 0.8]))
        best = greedy_search(score, 2, 5)
        self.assertEqual(best.units, [1, 1, 2])
        self.assertTrue(best.finished)

    def test_ties_go_to_the_lowest_id(self) -> None:
        def score(prefix: Sequence[int]) -> np.ndarray:
            return np.log(np.full(3, 1.0 / 3))
        self.assertEqual(greedy_search(score, 2, 3).units, [0, 0, 0])

    def test_max_length_finishes_without_eos(self) -> None:
        def score(prefix: Sequence[int]) -> np.ndarray:
            return np.log(np.array([0.9, 0.1]))
        best = beam_search(score, 1, DecodeConfig(beam = 2, max_length = 3))[0]
        self.assertEqual(best.units, [0, 0, 0])


if __name__ == "__main__":
    from unittest import main
    main()
