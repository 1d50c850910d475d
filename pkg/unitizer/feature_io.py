from pathlib import Path
from struct import calcsize, pack, unpack_from

import numpy as np

from core.errors import CorruptCheckpointError, DimensionError

MAGIC = b"SPFM"
VERSION = 1
HEADER = "<4sHII"


def encode_features(features: np.ndarray) -> bytes:
    """
    Serializes a T x F feature matrix: magic "SPFM", version u16, T u32, F u32, little-endian f32 row-major.

    Raises:
        DimensionError: If the matrix is not two-dimensional or F is zero.
    """
    if features.ndim != 2 or features.shape[1] < 1:
        raise DimensionError(f"feature matrix must be T x F with F >= 1, got {features.shape}")
    frames, width = features.shape
    payload = np.ascontiguousarray(features, dtype = "<f4").tobytes()
    return pack(HEADER, MAGIC, VERSION, frames, width) + payload


def decode_features(blob: bytes) -> np.ndarray:
    """
    Raises:
        CorruptCheckpointError: On bad magic, version or payload length.
    """
    if len(blob) < calcsize(HEADER):
        raise CorruptCheckpointError("feature file shorter than its header")
    magic, version, frames, width = unpack_from(HEADER, blob)
    if magic != MAGIC:
        raise CorruptCheckpointError(f"bad feature magic {magic!r}")
    if version != VERSION:
        raise CorruptCheckpointError(f"unsupported feature version {version}")
    expected = frames * width * 4
    payload = blob[calcsize(HEADER):]
    if len(payload) != expected:
        raise CorruptCheckpointError(f"feature payload has {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype = "<f4").reshape(frames, width).astype(np.float32)


def write_features(path: str | Path, features: np.ndarray) -> None:
    Path(path).write_bytes(encode_features(features))


def read_features(path: str | Path) -> np.ndarray:
    return decode_features(Path(path).read_bytes())
