import json
import struct
from typing import Any, Iterable

import numpy as np

from core.errors import CorruptCheckpointError

MAGIC = b"SPUL"
VERSION = 1

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
FNV_MASK = 0xFFFFFFFFFFFFFFFF

DTYPE_TAGS: dict[str, int] = {"float32": 0, "float64": 1, "int64": 2}
TAG_DTYPES: dict[int, np.dtype[Any]] = {tag: np.dtype(name).newbyteorder("<") for name, tag in DTYPE_TAGS.items()}


def fnv1a64(chunks: Iterable[bytes]) -> int:
    value = FNV_OFFSET
    for chunk in chunks:
        for byte in chunk:
            value ^= byte
            value = (value * FNV_PRIME) & FNV_MASK
    return value


def array_payload(array: np.ndarray) -> bytes:
    return np.ascontiguousarray(array, dtype = array.dtype.newbyteorder("<")).tobytes()


def encode_container(tag: str, config: dict[str, Any], records: dict[str, np.ndarray]) -> bytes:
    """
    Serializes one component.

    Layout, little-endian: magic "SPUL", u16 version, u8-prefixed component tag, u32-prefixed JSON config block,
    u32 record count, then per record a u16-prefixed name, u8 dtype tag, u8 rank, u32 dims and the raw payload.
    A trailing u64 FNV-1a hash covers every payload in record order.
    """
    tag_bytes = tag.encode("ascii")
    config_bytes = json.dumps(config, sort_keys = True).encode("utf-8")
    parts = [
        MAGIC,
        struct.pack("<H", VERSION),
        struct.pack("<B", len(tag_bytes)), tag_bytes,
        struct.pack("<I", len(config_bytes)), config_bytes,
        struct.pack("<I", len(records))
    ]
    payloads: list[bytes] = []
    for name, array in records.items():
        if array.dtype.name not in DTYPE_TAGS:
            raise CorruptCheckpointError(f"record {name} has unsupported dtype {array.dtype}")
        name_bytes = name.encode("utf-8")
        payload = array_payload(array)
        payloads.append(payload)
        parts.extend([
            struct.pack("<H", len(name_bytes)), name_bytes,
            struct.pack("<BB", DTYPE_TAGS[array.dtype.name], array.ndim),
            struct.pack(f"<{array.ndim}I", *array.shape),
            payload
        ])
    parts.append(struct.pack("<Q", fnv1a64(payloads)))
    return b"".join(parts)


class _Reader():
    def __init__(self, blob: bytes) -> None:
        self.blob = blob
        self.offset = 0

    def take(self, count: int) -> bytes:
        if self.offset + count > len(self.blob):
            raise CorruptCheckpointError("truncated checkpoint")
        chunk = self.blob[self.offset:self.offset + count]
        self.offset += count
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_container(blob: bytes, expected_tag: str | None = None) -> tuple[str, dict[str, Any], dict[str, np.ndarray]]:
    """
    Parses and verifies a container.

    Returns:
        tuple[str, dict[str, Any], dict[str, np.ndarray]]: Component tag, config block and named arrays.

    Raises:
        CorruptCheckpointError: On a bad magic, version, tag, truncation, trailing bytes or hash mismatch.
    """
    reader = _Reader(blob)
    if reader.take(4) != MAGIC:
        raise CorruptCheckpointError("bad magic")
    (version,) = reader.unpack("<H")
    if version != VERSION:
        raise CorruptCheckpointError(f"unsupported container version {version}")
    (tag_length,) = reader.unpack("<B")
    tag = reader.take(tag_length).decode("ascii", errors = "replace")
    if expected_tag is not None and tag != expected_tag:
        raise CorruptCheckpointError(f"expected a {expected_tag} component, found {tag}")
    (config_length,) = reader.unpack("<I")
    try:
        config = json.loads(reader.take(config_length).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as error:
        raise CorruptCheckpointError(f"unreadable config block: {error}") from error

    (count,) = reader.unpack("<I")
    records: dict[str, np.ndarray] = {}
    payloads: list[bytes] = []
    for _ in range(count):
        (name_length,) = reader.unpack("<H")
        name = reader.take(name_length).decode("utf-8", errors = "replace")
        dtype_tag, rank = reader.unpack("<BB")
        if dtype_tag not in TAG_DTYPES:
            raise CorruptCheckpointError(f"record {name} has unknown dtype tag {dtype_tag}")
        shape = reader.unpack(f"<{rank}I")
        dtype = TAG_DTYPES[dtype_tag]
        payload = reader.take(int(np.prod(shape, dtype = np.int64)) * dtype.itemsize)
        payloads.append(payload)
        records[name] = np.frombuffer(payload, dtype = dtype).reshape(shape).astype(dtype.newbyteorder("="))
    (stored,) = reader.unpack("<Q")
    if reader.offset != len(blob):
        raise CorruptCheckpointError("trailing bytes after checkpoint")
    if stored != fnv1a64(payloads):
        raise CorruptCheckpointError("checkpoint hash mismatch")
    return tag, config, records
