from os import environ
from pathlib import Path
from unittest import TestCase, skipIf

from harness.experiment import evaluate_task, load_config, tune_for_config
from prompts.prompt_set import init_prompts
from prompts.tuning import mean_loss

CONFIGS = Path(__file__).resolve().parents[2] / "configs"
QUICK = environ.get("SPEECHPROMPT_QUICK") == "1"


@skipIf(QUICK, "end-to-end learning suite")
class TranslationLearningTest(TestCase):
    """Unit-to-unit translation through the dictionary of the shared synthetic world."""

    def test_prompted_translation_beats_untuned_prompts(self) -> None:
        config = load_config(CONFIGS / "translation.toml")
        setup = tune_for_config(config)
        task, test_set = setup.splits.task, setup.splits.test
        control = init_prompts(setup.lm.config, 8, config.seed, config.prompts.input_prompts, config.prompts.deep_prompts)

        self.assertEqual(task.kind, "translation")
        self.assertIsNone(setup.tuning.verbalizer)
        tuned_likelihood = -mean_loss(setup.lm, setup.tuning.prompts, None, task, test_set)
        control_likelihood = -mean_loss(setup.lm, control, None, task, test_set)
        self.assertGreater(tuned_likelihood, control_likelihood)

        metrics = evaluate_task(setup.lm, setup.tuning.prompts, None, task, test_set[:20], config.decode)
        self.assertEqual(set(metrics), {"bleu", "log_likelihood"})
        self.assertGreaterEqual(metrics["bleu"], 0.0)
        self.assertLessEqual(metrics["bleu"], 100.0)


if __name__ == "__main__":
    from unittest import main
    main()
