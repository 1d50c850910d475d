from pathlib import Path

import numpy as np
from pydantic import ValidationError

from core.errors import CorruptCheckpointError, MissingArtifactError
from numcore.tensor import Tensor
from schemas.lm_config import LMConfig
from unitizer.kmeans import QuantizerModel
from unitlm.container import decode_container, encode_container
from unitlm.model import UnitLM, init_parameters

LM_TAG = "LM"
QUANT_TAG = "QUANT"


def save_checkpoint(lm: UnitLM) -> bytes:
    """Serializes a backbone; parameters are written in name order so identical models give identical bytes."""
    config = {"lm": lm.config.model_dump(), "frozen": lm.frozen, "hash": lm.content_hash()}
    return encode_container(LM_TAG, config, {name: lm.params[name].data for name in sorted(lm.params)})


def load_checkpoint(blob: bytes) -> UnitLM:
    """
    Rebuilds a backbone bit-exactly.

    Raises:
        CorruptCheckpointError: If the container is damaged or its records do not fit the recorded config.
    """
    _, config, records = decode_container(blob, LM_TAG)
    try:
        lm_config = LMConfig.model_validate(config["lm"])
    except (KeyError, ValidationError) as error:
        raise CorruptCheckpointError(f"invalid LM config block: {error}") from error

    expected = init_parameters(lm_config.model_copy(update = {"seed": 0}))
    if set(expected) != set(records):
        raise CorruptCheckpointError("checkpoint parameters do not match the recorded config")
    params = {}
    for name, reference in expected.items():
        if records[name].shape != reference.shape or records[name].dtype != reference.dtype:
            raise CorruptCheckpointError(f"parameter {name} has shape {records[name].shape}, expected {reference.shape}")
        params[name] = Tensor(records[name], trainable = True, name = name)

    lm = UnitLM(lm_config, params)
    if config.get("frozen"):
        lm.freeze()
    if config.get("hash") is not None and config["hash"] != lm.content_hash():
        raise CorruptCheckpointError("parameter hash does not match the recorded hash")
    return lm


def save_quantizer(model: QuantizerModel) -> bytes:
    config = {"k": model.k, "seed": model.seed, "inertia_history": model.inertia_history}
    return encode_container(QUANT_TAG, config, {"centroids": np.asarray(model.centroids, dtype = np.float64)})


def load_quantizer(blob: bytes) -> QuantizerModel:
    _, config, records = decode_container(blob, QUANT_TAG)
    if "centroids" not in records or records["centroids"].ndim != 2:
        raise CorruptCheckpointError("quantizer checkpoint has no centroid matrix")
    return QuantizerModel(
        k = config["k"],
        centroids = records["centroids"],
        seed = config.get("seed", 0),
        inertia_history = config.get("inertia_history", [])
    )


def read_artifact(path: str | Path) -> bytes:
    """
    Raises:
        MissingArtifactError: If the file does not exist.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"artifact not found: {path}")
    return path.read_bytes()


def write_artifact(path: str | Path, blob: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    path.write_bytes(blob)
    return path
