"""WAV file reading/writing and channel utilities.

Supports little-endian RIFF/WAVE containers with PCM 16-bit, PCM 24-bit or
IEEE float-32 sample data on the read side, and PCM 16-bit or float-32 on
the write side.  Fixed-point samples are normalized by dividing by the full
negative range (32768 for 16-bit), so -32768 maps exactly to -1.0.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AudioBuffer",
    "WavError",
    "WavFormatError",
    "UnsupportedEncodingError",
    "load_wav",
    "save_wav",
    "to_mono",
]

_PCM = 1
_IEEE_FLOAT = 3
_EXTENSIBLE = 0xFFFE


class WavError(Exception):
    """Base class for WAV file errors."""


class WavFormatError(WavError):
    """File is not a well-formed RIFF/WAVE container."""


class UnsupportedEncodingError(WavError):
    """Well-formed WAV whose sample encoding is not handled."""


@dataclass(eq=False)
class AudioBuffer:
    """Time-domain audio.

    Parameters
    ----------
    samples : ndarray, shape (n_samples, n_channels)
        Amplitudes, nominally in [-1, 1].  A 1-D array is treated as mono.
    sample_rate : int
        Sampling rate in Hz, > 0.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[:, np.newaxis]
        if samples.ndim != 2:
            raise ValueError(f"samples must be 1-D or 2-D, got shape {samples.shape}")
        if samples.shape[1] < 1:
            raise ValueError("buffer must have at least one channel")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        self.samples = samples
        self.sample_rate = int(self.sample_rate)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def channels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.n_samples / self.sample_rate


def load_wav(path) -> AudioBuffer:
    """Read a WAV file into a normalized float buffer.

    Raises
    ------
    FileNotFoundError
        Missing input file.
    WavFormatError
        Malformed RIFF/WAVE structure.
    UnsupportedEncodingError
        Valid container with an encoding other than PCM16/PCM24/float32.
    """
    with open(path, "rb") as handle:
        raw = handle.read()
    return _decode(raw)


def _decode(raw: bytes) -> AudioBuffer:
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE file")

    fmt = None
    data = None
    offset = 12
    while offset + 8 <= len(raw):
        chunk_id = raw[offset : offset + 4]
        (size,) = struct.unpack_from("<I", raw, offset + 4)
        body = raw[offset + 8 : offset + 8 + size]
        if len(body) < size:
            raise WavFormatError(f"truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body)
        elif chunk_id == b"data":
            data = body
        offset += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError("missing fmt chunk")
    if data is None:
        raise WavFormatError("missing data chunk")

    format_tag, channels, sample_rate, bits = fmt
    if channels < 1 or sample_rate <= 0:
        raise WavFormatError(f"invalid fmt fields: channels={channels}, rate={sample_rate}")

    if format_tag == _PCM and bits == 16:
        decoded = _decode_pcm16(data)
    elif format_tag == _PCM and bits == 24:
        decoded = _decode_pcm24(data)
    elif format_tag == _IEEE_FLOAT and bits == 32:
        decoded = _decode_float32(data)
    else:
        raise UnsupportedEncodingError(
            f"unsupported encoding: format tag {format_tag}, {bits} bits per sample"
        )

    if decoded.size % channels != 0:
        raise WavFormatError("data chunk does not hold a whole number of frames")
    return AudioBuffer(decoded.reshape(-1, channels), sample_rate)


def _parse_fmt(body: bytes) -> tuple[int, int, int, int]:
    if len(body) < 16:
        raise WavFormatError("fmt chunk too short")
    format_tag, channels, sample_rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
    if format_tag == _EXTENSIBLE:
        # WAVE_FORMAT_EXTENSIBLE carries the real format in the first two
        # bytes of the SubFormat GUID.
        if len(body) < 26:
            raise WavFormatError("extensible fmt chunk too short")
        (format_tag,) = struct.unpack_from("<H", body, 24)
    return format_tag, channels, sample_rate, bits


def _decode_pcm16(data: bytes) -> np.ndarray:
    if len(data) % 2 != 0:
        raise WavFormatError("PCM16 data length is not a multiple of 2")
    return np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0


def _decode_pcm24(data: bytes) -> np.ndarray:
    if len(data) % 3 != 0:
        raise WavFormatError("PCM24 data length is not a multiple of 3")
    as_bytes = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
    values = as_bytes[:, 0] | (as_bytes[:, 1] << 8) | (as_bytes[:, 2] << 16)
    values = np.where(values >= 1 << 23, values - (1 << 24), values)
    return values.astype(np.float64) / float(1 << 23)


def _decode_float32(data: bytes) -> np.ndarray:
    if len(data) % 4 != 0:
        raise WavFormatError("float32 data length is not a multiple of 4")
    return np.frombuffer(data, dtype="<f4").astype(np.float64)


def save_wav(path, buffer: AudioBuffer, encoding: str = "float32") -> None:
    """Write ``buffer`` as a WAV file.

    ``encoding`` is ``"pcm16"`` or ``"float32"``.  float32 round-trips
    exactly for sample values representable in single precision; pcm16
    quantization error is at most 2**-15 per sample.
    """
    if buffer.n_samples == 0:
        raise ValueError("cannot save an empty buffer")
    if encoding == "pcm16":
        quantized = np.clip(np.round(buffer.samples * 32768.0), -32768, 32767)
        payload = quantized.astype("<i2").tobytes()
        format_tag, bits = _PCM, 16
    elif encoding == "float32":
        payload = buffer.samples.astype("<f4").tobytes()
        format_tag, bits = _IEEE_FLOAT, 32
    else:
        raise ValueError(f"unknown encoding {encoding!r}; use 'pcm16' or 'float32'")

    channels = buffer.channels
    block_align = channels * bits // 8
    byte_rate = buffer.sample_rate * block_align

    chunks = [
        b"fmt " + struct.pack(
            "<IHHIIHH", 16, format_tag, channels, buffer.sample_rate, byte_rate, block_align, bits
        )
    ]
    if format_tag == _IEEE_FLOAT:
        # fact chunk is required for non-PCM formats by the WAV spec
        chunks.append(b"fact" + struct.pack("<II", 4, buffer.n_samples))
    size = len(payload)
    if size % 2 != 0:
        payload += b"\x00"  # pad byte, not counted in the chunk size
    chunks.append(b"data" + struct.pack("<I", size) + payload)

    body = b"".join(chunks)
    with open(path, "wb") as handle:
        handle.write(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)


def to_mono(buffer: AudioBuffer) -> AudioBuffer:
    """Mix down to a single channel by per-sample arithmetic mean."""
    if buffer.n_samples == 0:
        raise ValueError("cannot mix down an empty buffer")
    return AudioBuffer(buffer.samples.mean(axis=1, keepdims=True), buffer.sample_rate)
