from typing_extensions import override
from unittest import TestCase

import numpy as np

from core.errors import BackboneMismatchError, ConfigError, DimensionError
from numcore.tensor import Tensor
from prompts.prompt_set import apply_deep_prompts, apply_input_prompts, init_prompts, load_prompts, save_prompts
from schemas.lm_config import LMConfig


class PromptSetTest(TestCase):

    @override
    def setUp(self) -> None:
        self.config = LMConfig(variant = "encoder_decoder", n_layers = 2, n_heads = 2, embed_dim = 8, ffn_dim = 16, n_units = 10)
        self.rng = np.random.default_rng(9)

    def test_one_input_prompt_per_stack_and_one_pair_per_layer(self) -> None:
        prompts = init_prompts(self.config, 4, seed = 0)
        self.assertEqual(sorted(prompts.input_prompts), ["decoder", "encoder"])
        self.assertEqual(sorted(prompts.key_prompts), ["decoder.0", "decoder.1", "encoder.0", "encoder.1"])
        self.assertTrue(all(tensor.shape == (4, 8) and tensor.trainable for tensor in prompts.parameters()))
        self.assertEqual(len(prompts.parameters()), 2 + 2 * 4)

    def test_initialization_scale_and_determinism(self) -> None:
        prompts = init_prompts(self.config.model_copy(update = {"embed_dim": 64}), 100, seed = 3)
        values = np.concatenate([tensor.data.ravel() for tensor in prompts.parameters()])
        self.assertAlmostEqual(float(values.std()), 0.02, delta = 0.002)
        again = init_prompts(self.config.model_copy(update = {"embed_dim": 64}), 100, seed = 3)
        np.testing.assert_array_equal(values, np.concatenate([tensor.data.ravel() for tensor in again.parameters()]))

    def test_switches(self) -> None:
        deep_only = init_prompts(self.config, 2, seed = 0, use_input = False)
        self.assertIsNone(deep_only.input_prompt("encoder"))
        self.assertIsNotNone(deep_only.deep_prompt("encoder", 1))
        input_only = init_prompts(self.config, 2, seed = 0, use_deep = False)
        self.assertIsNone(input_only.deep_prompt("decoder", 0))
        self.assertEqual(len(input_only.parameters()), 2)

    def test_empty_and_negative_lengths(self) -> None:
        self.assertEqual(init_prompts(self.config, 0, seed = 0).parameters(), [])
        with self.assertRaises(ConfigError):
            init_prompts(self.config, -1, seed = 0)

    def test_input_prompts_are_prepended(self) -> None:
        sequence = Tensor(self.rng.normal(size = (5, 8)))
        prompt = Tensor(self.rng.normal(size = (3, 8)))
        out = apply_input_prompts(sequence, prompt)
        self.assertEqual(out.shape, (8, 8))
        np.testing.assert_array_equal(out.data[:3], prompt.data)
        self.assertIs(apply_input_prompts(sequence, None), sequence)
        with self.assertRaises(DimensionError):
            apply_input_prompts(sequence, Tensor(np.ones((2, 4))))

    def test_deep_prompts_extend_keys_and_values(self) -> None:
        hidden = Tensor(self.rng.normal(size = (5, 8)))
        wk, wv = Tensor(self.rng.normal(size = (8, 8))), Tensor(self.rng.normal(size = (8, 8)))
        pk, pv = Tensor(self.rng.normal(size = (3, 8))), Tensor(self.rng.normal(size = (3, 8)))
        keys, values = apply_deep_prompts(hidden, pk, pv, wk, wv)
        self.assertEqual(keys.shape, (8, 8))
        np.testing.assert_allclose(keys.data[:3], pk.data @ wk.data)
        np.testing.assert_allclose(values.data[3:], hidden.data @ wv.data)
        with self.assertRaises(DimensionError):
            apply_deep_prompts(hidden, pk, Tensor(np.ones((2, 8))), wk, wv)

    def test_snapshot_and_restore(self) -> None:
        prompts = init_prompts(self.config, 2, seed = 0)
        state = prompts.snapshot()
        prompts.input_prompts["encoder"].data = np.zeros((2, 8))
        prompts.restore(state)
        np.testing.assert_array_equal(prompts.input_prompts["encoder"].data, state["input.encoder"])

    def test_saved_prompts_remember_their_backbone(self) -> None:
        prompts = init_prompts(self.config, 2, seed = 0)
        prompts.backbone_hash = 1234
        blob = save_prompts(prompts)
        loaded = load_prompts(blob, backbone_hash = 1234)
        self.assertEqual(loaded.snapshot().keys(), prompts.snapshot().keys())
        np.testing.assert_array_equal(loaded.key_prompts["decoder.1"].data, prompts.key_prompts["decoder.1"].data)
        with self.assertRaises(BackboneMismatchError):
            load_prompts(blob, backbone_hash = 99)


if __name__ == "__main__":
    from unittest import main
    main()
