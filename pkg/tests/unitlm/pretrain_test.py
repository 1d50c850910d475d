from typing_extensions import override
from unittest import TestCase

from core.errors import InsufficientDataError, UsageError
from schemas.experiment_config import TrainConfig
from schemas.lm_config import LMConfig, NoiseSpec
from unitlm.model import UnitLM
from unitlm.pretrain import next_token_accuracy, pretrain_denoise, pretrain_next_token, reconstruction_accuracy

CORPUS = [[1, 2, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1], [1, 3, 5, 7, 9], [2, 4, 6, 8]] * 4


def tiny(variant: str = "decoder_only") -> UnitLM:
    return UnitLM(LMConfig(variant = variant, n_layers = 1, n_heads = 2, embed_dim = 16, ffn_dim = 32, n_units = 10, max_positions = 16, dropout = 0.0))


class PretrainTest(TestCase):

    @override
    def setUp(self) -> None:
        self.train = TrainConfig(learning_rate = 1e-2, batch_size = 4, epochs = 12)

    def test_next_token_learns_the_corpus(self) -> None:
        lm = tiny()
        before = next_token_accuracy(lm, CORPUS)
        pretrain_next_token(lm, CORPUS, self.train)
        self.assertEqual(len(lm.loss_history), 12)
        self.assertLess(lm.loss_history[-1], lm.loss_history[0])
        self.assertGreater(next_token_accuracy(lm, CORPUS), before)

    def test_denoising_lowers_the_loss(self) -> None:
        lm = tiny("encoder_decoder")
        pretrain_denoise(lm, CORPUS, NoiseSpec(), self.train, epochs = 30)
        self.assertLess(lm.loss_history[-1], lm.loss_history[0])
        self.assertGreater(reconstruction_accuracy(lm, CORPUS), 0.5)

    def test_same_seed_same_backbone(self) -> None:
        first = pretrain_next_token(tiny(), CORPUS, self.train, epochs = 2, seed = 3)
        second = pretrain_next_token(tiny(), CORPUS, self.train, epochs = 2, seed = 3)
        self.assertEqual(first.content_hash(), second.content_hash())

    def test_refuses_the_wrong_variant(self) -> None:
        with self.assertRaises(UsageError):
            pretrain_next_token(tiny("encoder_decoder"), CORPUS, self.train)
        with self.assertRaises(UsageError):
            pretrain_denoise(tiny(), CORPUS, NoiseSpec(), self.train)

    def test_refuses_a_frozen_backbone(self) -> None:
        lm = tiny()
        lm.freeze()
        with self.assertRaises(UsageError):
            pretrain_next_token(lm, CORPUS, self.train)

    def test_needs_a_non_empty_sequence(self) -> None:
        with self.assertRaises(InsufficientDataError):
            pretrain_next_token(tiny(), [[], []], self.train)

    def test_accuracy_of_nothing(self) -> None:
        self.assertEqual(next_token_accuracy(tiny(), [[1]]), 0.0)


if __name__ == "__main__":
    from unittest import main
    main()
