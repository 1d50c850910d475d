from typing_extensions import override
from unittest import TestCase

import numpy as np

from core.errors import ConfigError, InsufficientDataError
from harness.probe import linear_probe_baseline, pooled_features
from schemas.example import Example
from schemas.lm_config import LMConfig
from schemas.task_spec import TaskSpec
from unitlm.model import UnitLM


class LinearProbeTest(TestCase):

    @override
    def setUp(self) -> None:
        self.lm = UnitLM(LMConfig(n_layers = 1, n_heads = 2, embed_dim = 16, ffn_dim = 32, n_units = 10, max_positions = 32))
        self.lm.freeze()
        self.task = TaskSpec(kind = "classification", labels = ["low", "high"])
        rng = np.random.default_rng(12)

        def draw(n: int) -> list[Example]:
            examples = []
            for index in range(n):
                high = index % 2 == 1
                units = rng.integers(5, 10, size = 6) if high else rng.integers(0, 5, size = 6)
                examples.append(Example(units = units.tolist(), labels = ["high" if high else "low"]))
            return examples

        self.train_set, self.test_set = draw(60), draw(40)

    def test_separable_units(self) -> None:
        result = linear_probe_baseline(self.lm, self.task, self.train_set, self.test_set)
        self.assertGreaterEqual(result.accuracy, 0.9)
        self.assertEqual(result.parameter_count, 2 * 16 + 2)
        self.assertFalse(result.degenerate)

    def test_hidden_state_features(self) -> None:
        features = pooled_features(self.lm, self.test_set[:3], source = "states")
        self.assertEqual(features.shape, (3, 16))

    def test_single_class(self) -> None:
        low = [example for example in self.train_set if example.labels == ["low"]]
        result = linear_probe_baseline(self.lm, self.task, low, self.test_set)
        self.assertTrue(result.degenerate)
        self.assertEqual(result.accuracy, 1.0)

    def test_empty_test_set(self) -> None:
        self.assertEqual(linear_probe_baseline(self.lm, self.task, self.train_set, [], steps = 5).accuracy, 0.0)

    def test_errors(self) -> None:
        with self.assertRaises(InsufficientDataError):
            linear_probe_baseline(self.lm, self.task, [], self.test_set)
        with self.assertRaises(ConfigError):
            linear_probe_baseline(self.lm, TaskSpec(kind = "sequence", labels = ["a"]), self.train_set, self.test_set)
        with self.assertRaises(InsufficientDataError):
            pooled_features(self.lm, [Example(units = [])])


if __name__ == "__main__":
    from unittest import main
    main()
