from os import environ
from typing_extensions import override
from unittest import TestCase, skipIf

import numpy as np

from core.errors import ContractViolationError
from prompts.prompt_set import init_prompts
from prompts.tuning import mean_loss, prompt_tune
from schemas.example import Example
from schemas.experiment_config import TrainConfig
from schemas.lm_config import LMConfig
from schemas.task_spec import TaskSpec
from unitlm.model import UnitLM
from verbalizer.fixed import FixedVerbalizer
from verbalizer.learnable import LearnableVerbalizer


class PromptTuningTest(TestCase):

    @override
    def setUp(self) -> None:
        self.lm = UnitLM(LMConfig(n_layers = 1, n_heads = 2, embed_dim = 16, ffn_dim = 32, n_units = 10, max_positions = 32, dropout = 0.0))
        self.lm.freeze()
        self.task = TaskSpec(kind = "classification", labels = ["low", "high"])
        self.verbalizer = FixedVerbalizer(labels = ["low", "high"], units = [2, 8])
        self.train_set = [Example(units = [1, 2, 3], labels = ["low"]), Example(units = [7, 8, 9], labels = ["high"])] * 4
        self.train = TrainConfig(learning_rate = 5e-2, batch_size = 4, max_steps = 60, eval_every = 20, patience = 10)

    def test_backbone_is_bit_identical_after_tuning(self) -> None:
        before = self.lm.content_hash()
        prompts = init_prompts(self.lm.config, 3, seed = 0)
        result = prompt_tune(self.lm, prompts, self.verbalizer, self.task, self.train_set, [], self.train)
        self.assertEqual(self.lm.content_hash(), before)
        self.assertEqual(result.prompts.backbone_hash, before)
        self.assertEqual(result.steps, 60)

    @skipIf(environ.get("SPEECHPROMPT_QUICK") == "1", "long tuning run")
    def test_long_run_moves_every_prompt_tensor_and_leaves_the_backbone_alone(self) -> None:
        before = self.lm.content_hash()
        prompts = init_prompts(self.lm.config, 3, seed = 0)
        initial = prompts.snapshot()
        train = self.train.model_copy(update = {"max_steps": 500})
        result = prompt_tune(self.lm, prompts, self.verbalizer, self.task, self.train_set, [], train)

        self.assertEqual(result.steps, 500)
        self.assertEqual(self.lm.content_hash(), before)
        final = prompts.snapshot()
        self.assertEqual(set(final), set(initial))
        self.assertTrue(all(not np.array_equal(initial[name], value) for name, value in final.items()))

    def test_prompts_move_and_the_loss_falls(self) -> None:
        prompts = init_prompts(self.lm.config, 3, seed = 0)
        initial = prompts.snapshot()
        before = mean_loss(self.lm, prompts, self.verbalizer, self.task, self.train_set)
        prompt_tune(self.lm, prompts, self.verbalizer, self.task, self.train_set, [], self.train)
        self.assertTrue(all(not np.array_equal(initial[name], value) for name, value in prompts.snapshot().items()))
        self.assertLess(mean_loss(self.lm, prompts, self.verbalizer, self.task, self.train_set), before)

    def test_learnable_verbalizer_is_tuned_too(self) -> None:
        verbalizer = LearnableVerbalizer.create(["low", "high"], self.lm.vocab.size)
        prompt_tune(self.lm, init_prompts(self.lm.config, 2, seed = 0), verbalizer, self.task, self.train_set, [], self.train)
        self.assertTrue(np.any(verbalizer.weight.data != 0))

    def test_needs_a_frozen_backbone(self) -> None:
        self.lm.unfreeze()
        with self.assertRaises(ContractViolationError):
            prompt_tune(self.lm, init_prompts(self.lm.config, 2, seed = 0), self.verbalizer, self.task, self.train_set, [], self.train)

    def test_nothing_to_tune(self) -> None:
        result = prompt_tune(self.lm, init_prompts(self.lm.config, 0, seed = 0), self.verbalizer, self.task, self.train_set, [], self.train)
        self.assertEqual(result.steps, 0)
        result = prompt_tune(self.lm, init_prompts(self.lm.config, 2, seed = 0), self.verbalizer, self.task, [], [], self.train)
        self.assertEqual(result.steps, 0)

    def test_early_stopping_keeps_the_best_validation_point(self) -> None:
        train = self.train.model_copy(update = {"max_steps": 200, "eval_every": 1, "patience": 2, "learning_rate": 0.1})
        prompts = init_prompts(self.lm.config, 3, seed = 0)
        result = prompt_tune(self.lm, prompts, self.verbalizer, self.task, self.train_set, self.train_set[:2], train)
        self.assertIsNotNone(result.best_valid_loss)
        self.assertAlmostEqual(mean_loss(self.lm, prompts, self.verbalizer, self.task, self.train_set[:2]), result.best_valid_loss)
        if result.stopped_early:
            self.assertLess(result.steps, 200)

    def test_same_seed_same_prompts(self) -> None:
        first = init_prompts(self.lm.config, 2, seed = 0)
        second = init_prompts(self.lm.config, 2, seed = 0)
        prompt_tune(self.lm, first, self.verbalizer, self.task, self.train_set, [], self.train, seed = 5)
        prompt_tune(self.lm, second, self.verbalizer, self.task, self.train_set, [], self.train, seed = 5)
        for (name, value), other in zip(first.snapshot().items(), second.snapshot().values()):
            np.testing.assert_array_equal(value, other, err_msg = name)


if __name__ == "__main__":
    from unittest import main
    main()
