"""Short-time Fourier transform with exact weighted overlap-add inversion.

Frames are centered: frame ``j`` covers input samples starting at
``j * hop_size - fft_size / 2``, with zero padding at both ends, so the
frame count is ``ceil(n_samples / hop_size)`` and inversion is exact at the
edges.  Analysis and synthesis both use a periodic Hann window; synthesis
divides by the accumulated squared window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer

__all__ = [
    "StftConfig",
    "ComplexSpectrogram",
    "MagnitudeSpectrogram",
    "stft_forward",
    "stft_inverse",
    "magnitude",
]


def _hann_periodic(size: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(size) / size)


_WINDOWS = {"hann": _hann_periodic}


@dataclass(frozen=True)
class StftConfig:
    """Transform geometry: FFT size, hop size, analysis window."""

    fft_size: int = 4096
    hop_size: int = 1024
    window: str = "hann"

    def __post_init__(self):
        if self.fft_size < 2 or self.fft_size & (self.fft_size - 1) != 0:
            raise ValueError(f"fft_size must be a power of two, got {self.fft_size}")
        if not 1 <= self.hop_size <= self.fft_size:
            raise ValueError(f"hop_size must be in [1, fft_size], got {self.hop_size}")
        if self.fft_size % self.hop_size != 0:
            raise ValueError(
                f"hop_size {self.hop_size} must divide fft_size {self.fft_size} "
                "for constant overlap-add"
            )
        if self.window not in _WINDOWS:
            raise ValueError(f"unknown window {self.window!r}; choices: {sorted(_WINDOWS)}")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def n_frames(self, n_samples: int) -> int:
        if n_samples < 1:
            raise ValueError("signal must contain at least one sample")
        return -(-n_samples // self.hop_size)

    def make_window(self) -> np.ndarray:
        return _WINDOWS[self.window](self.fft_size)


@dataclass(eq=False)
class ComplexSpectrogram:
    """Complex time-frequency matrix, bins as rows and frames as columns."""

    values: np.ndarray
    config: StftConfig
    sample_rate: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {values.shape}")
        if values.shape[0] != self.config.n_bins:
            raise ValueError(
                f"bin count {values.shape[0]} does not match fft_size "
                f"{self.config.fft_size} (expected {self.config.n_bins})"
            )
        self.values = values

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


@dataclass(eq=False)
class MagnitudeSpectrogram:
    """Nonnegative real time-frequency matrix, bins as rows and frames as columns."""

    values: np.ndarray
    config: StftConfig

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {values.shape}")
        if values.size and values.min() < 0:
            raise ValueError("magnitude entries must be nonnegative")
        self.values = values

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


def _padding(config: StftConfig, n_samples: int) -> tuple[int, int, int]:
    """(pad_left, padded_length, n_frames) for a centered analysis."""
    n_frames = config.n_frames(n_samples)
    pad_left = config.fft_size // 2
    padded = max((n_frames - 1) * config.hop_size + config.fft_size, pad_left + n_samples)
    return pad_left, padded, n_frames


def stft_forward(signal: AudioBuffer, config: StftConfig = StftConfig()) -> ComplexSpectrogram:
    """Forward transform of a mono signal.

    Returns a (fft_size/2 + 1) x ceil(n_samples/hop_size) complex matrix.
    """
    if signal.channels != 1:
        raise ValueError(f"expected a mono signal, got {signal.channels} channels")
    x = signal.samples[:, 0]
    if x.size < 1:
        raise ValueError("signal must contain at least one sample")

    pad_left, padded_length, n_frames = _padding(config, x.size)
    padded = np.zeros(padded_length)
    padded[pad_left : pad_left + x.size] = x

    frames = np.lib.stride_tricks.sliding_window_view(padded, config.fft_size)
    frames = frames[:: config.hop_size][:n_frames]
    spectrum = np.fft.rfft(frames * config.make_window(), axis=1)
    return ComplexSpectrogram(np.ascontiguousarray(spectrum.T), config, signal.sample_rate)


def stft_inverse(spec: ComplexSpectrogram, out_length: int) -> AudioBuffer:
    """Weighted overlap-add inversion, trimmed or zero-padded to ``out_length``."""
    if out_length < 0:
        raise ValueError("out_length must be nonnegative")
    config = spec.config
    fft_size, hop = config.fft_size, config.hop_size
    window = config.make_window()

    segments = np.fft.irfft(spec.values, n=fft_size, axis=0) * window[:, np.newaxis]
    padded_length = (spec.n_frames - 1) * hop + fft_size
    acc = np.zeros(padded_length)
    weight = np.zeros(padded_length)
    window_sq = window * window
    for j in range(spec.n_frames):
        start = j * hop
        acc[start : start + fft_size] += segments[:, j]
        weight[start : start + fft_size] += window_sq
    covered = weight > 0
    acc[covered] /= weight[covered]

    pad_left = fft_size // 2
    out = acc[pad_left : pad_left + out_length]
    if out.size < out_length:
        out = np.concatenate([out, np.zeros(out_length - out.size)])
    return AudioBuffer(out.copy(), spec.sample_rate)


def magnitude(spec: ComplexSpectrogram) -> MagnitudeSpectrogram:
    """Elementwise complex modulus."""
    return MagnitudeSpectrogram(np.abs(spec.values), spec.config)
