from math import ceil, log2
from re import fullmatch
from typing import Literal
from typing_extensions import override

from pydantic import Field

from core.action_schema import ActionSchema
from core.errors import ConfigError

SAMPLE_RATE = 16000
SAMPLE_BITS = 16
FRAME_RATE = 50
SSL_FLOAT_BITS = 32
SSL_DIM = 1024


class DataSize(ActionSchema):
    """
    Storage cost of T seconds of speech in one representation.

    Attributes:
        format (str): waveform, ssl or units(c).
        seconds (float): Duration T.
        bits (float): Total bits for T seconds.
        bits_per_second (float): Bits for one second.
        ratio_to_waveform (float): bits_per_second divided by the waveform rate.
    """
    format: str = Field(description = "waveform, ssl or units(c).")
    seconds: float = Field(description = "Duration in seconds.")
    bits: float = Field(description = "Total bits.")
    bits_per_second: float = Field(description = "Bits for one second.")
    ratio_to_waveform: float = Field(description = "Size relative to 16-bit 16 kHz waveform.")

    @classmethod
    @override
    def description(cls) -> str:
        return "Storage cost of a duration of speech in one representation."


def bits_per_cluster(clusters: int) -> int:
    """ceil(log2 c): 7 bits for 100 clusters, 10 bits for 1,000."""
    if clusters < 1:
        raise ConfigError(f"cluster count must be positive, got {clusters}")
    return ceil(log2(clusters))


def parse_format(text: str) -> tuple[Literal["waveform", "ssl", "units"], int | None]:
    """
    Parses "waveform", "ssl" or "units(c)" / "units:c".

    Raises:
        ConfigError: If the text is not a known format.
    """
    text = text.strip().lower()
    if text in ("waveform", "ssl"):
        return text, None  # type: ignore[return-value]
    match = fullmatch(r"units[(:](\d+)\)?", text)
    if match is None:
        raise ConfigError(f"unknown data format: {text}")
    return "units", int(match.group(1))


def data_size_bits(format: str, seconds: float, clusters: int | None = None, ssl_dim: int = SSL_DIM) -> DataSize:
    """
    Bits needed to store T seconds: waveform = 16 x 16000 x T, SSL = 32 x dim x 50 x T,
    units with c clusters = ceil(log2 c) x 50 x T.

    Args:
        format (str): waveform, ssl, units, or units(c).
        seconds (float): Duration T, >= 0.
        clusters (int | None): Cluster count when format is plain "units".
        ssl_dim (int): SSL feature width. Defaults to 1024.

    Raises:
        ConfigError: If T is negative, the format is unknown or units has no cluster count.
    """
    if seconds < 0:
        raise ConfigError(f"duration must be non-negative, got {seconds}")
    if format.strip().lower() == "units":
        kind, count = "units", clusters
    else:
        kind, count = parse_format(format)
    waveform_rate = SAMPLE_BITS * SAMPLE_RATE
    if kind == "waveform":
        rate = waveform_rate
        label = "waveform"
    elif kind == "ssl":
        rate = SSL_FLOAT_BITS * ssl_dim * FRAME_RATE
        label = "ssl"
    else:
        if count is None:
            raise ConfigError("units format needs a cluster count")
        rate = bits_per_cluster(count) * FRAME_RATE
        label = f"units({count})"
    return DataSize(
        format = label,
        seconds = seconds,
        bits = float(rate * seconds),
        bits_per_second = float(rate),
        ratio_to_waveform = rate / waveform_rate
    )
