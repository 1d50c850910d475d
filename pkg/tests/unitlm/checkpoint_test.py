from pathlib import Path
from tempfile import TemporaryDirectory
from typing_extensions import override
from unittest import TestCase

import numpy as np

from core.errors import CorruptCheckpointError, MissingArtifactError
from schemas.lm_config import LMConfig
from unitizer.kmeans import kmeans_fit
from unitlm.checkpoint import load_checkpoint, load_quantizer, read_artifact, save_checkpoint, save_quantizer, write_artifact
from unitlm.container import FNV_OFFSET, decode_container, encode_container, fnv1a64
from unitlm.model import UnitLM


class ContainerTest(TestCase):

    @override
    def setUp(self) -> None:
        self.records = {"a": np.arange(6, dtype = np.float32).reshape(2, 3), "b": np.array([1, 2], dtype = np.int64)}
        self.blob = encode_container("TEST", {"answer": 42}, self.records)

    def test_fnv1a64_reference_values(self) -> None:
        self.assertEqual(fnv1a64([]), FNV_OFFSET)
        self.assertEqual(fnv1a64([b"a"]), 0xAF63DC4C8601EC8C)
        self.assertEqual(fnv1a64([b"fo", b"o"]), fnv1a64([b"foo"]))

    def test_records_keep_dtype_and_shape(self) -> None:
        tag, config, records = decode_container(self.blob, "TEST")
        self.assertEqual(tag, "TEST")
        self.assertEqual(config, {"answer": 42})
        self.assertEqual(records["a"].dtype, np.float32)
        np.testing.assert_array_equal(records["a"], self.records["a"])
        np.testing.assert_array_equal(records["b"], self.records["b"])

    def test_flipped_payload_byte(self) -> None:
        damaged = bytearray(self.blob)
        damaged[-12] ^= 0x01
        with self.assertRaises(CorruptCheckpointError):
            decode_container(bytes(damaged))

    def test_structural_damage(self) -> None:
        for damaged in (b"XXXX" + self.blob[4:], self.blob[:-3], self.blob + b"\0", self.blob[:4] + b"\x09\x00" + self.blob[6:]):
            with self.subTest(length = len(damaged)), self.assertRaises(CorruptCheckpointError):
                decode_container(damaged)

    def test_wrong_component(self) -> None:
        with self.assertRaises(CorruptCheckpointError):
            decode_container(self.blob, "LM")

    def test_unsupported_dtype(self) -> None:
        with self.assertRaises(CorruptCheckpointError):
            encode_container("TEST", {}, {"c": np.zeros(2, dtype = np.int8)})


class CheckpointTest(TestCase):

    @override
    def setUp(self) -> None:
        self.lm = UnitLM(LMConfig(n_layers = 1, n_heads = 2, embed_dim = 8, ffn_dim = 16, n_units = 10, max_positions = 16))
        self.directory = TemporaryDirectory()

    @override
    def tearDown(self) -> None:
        self.directory.cleanup()

    def test_bit_exact(self) -> None:
        blob = save_checkpoint(self.lm)
        loaded = load_checkpoint(blob)
        self.assertEqual(loaded.content_hash(), self.lm.content_hash())
        self.assertEqual(save_checkpoint(loaded), blob)
        np.testing.assert_array_equal(loaded.forward([1, 2]).data, self.lm.forward([1, 2]).data)

    def test_frozen_flag_survives(self) -> None:
        self.lm.freeze()
        self.assertTrue(load_checkpoint(save_checkpoint(self.lm)).frozen)

    def test_encoder_decoder(self) -> None:
        lm = UnitLM(LMConfig(variant = "encoder_decoder", n_layers = 1, n_heads = 2, embed_dim = 8, ffn_dim = 16, n_units = 10))
        self.assertEqual(load_checkpoint(save_checkpoint(lm)).content_hash(), lm.content_hash())

    def test_damaged_checkpoint(self) -> None:
        blob = bytearray(save_checkpoint(self.lm))
        blob[len(blob) // 2] ^= 0xFF
        with self.assertRaises(CorruptCheckpointError):
            load_checkpoint(bytes(blob))

    def test_quantizer(self) -> None:
        model = kmeans_fit([np.random.default_rng(0).normal(size = (20, 3))], 4)
        loaded = load_quantizer(save_quantizer(model))
        self.assertEqual(loaded.k, 4)
        np.testing.assert_array_equal(loaded.centroids, model.centroids)
        with self.assertRaises(CorruptCheckpointError):
            load_checkpoint(save_quantizer(model))

    def test_artifacts(self) -> None:
        path = write_artifact(Path(self.directory.name) / "nested" / "lm.spul", save_checkpoint(self.lm))
        self.assertEqual(load_checkpoint(read_artifact(path)).content_hash(), self.lm.content_hash())
        with self.assertRaises(MissingArtifactError):
            read_artifact(Path(self.directory.name) / "missing.spul")


if __name__ == "__main__":
    from unittest import main
    main()
