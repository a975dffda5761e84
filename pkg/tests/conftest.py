"""Shared synthetic material: a repetitive background with sparse tone bursts."""

from dataclasses import dataclass

import numpy as np
import pytest

import hubsep


@dataclass
class SyntheticTrack:
    mix: hubsep.AudioBuffer
    vocals: hubsep.AudioBuffer
    background: hubsep.AudioBuffer
    burst_frames: np.ndarray
    hop: int


def periodic_burst_mixture(
    duration=60.0,
    sample_rate=44100,
    hop=1024,
    period_frames=8,
    burst_frac=0.25,
    burst_gain_db=-6.0,
    noise_db=-45.0,
    seed=0,
) -> SyntheticTrack:
    """Looped 3-harmonic chord pattern (period = ``period_frames`` hops) plus
    short random tone bursts covering < 30% of frames, −6 dB relative.

    The low noise floor breaks exact frame ties without hiding the
    repetition structure.  Burst events are hop-aligned so "frames with
    vocals" is well defined.
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    period = period_frames * hop

    roots = rng.uniform(150.0, 400.0, period_frames)
    steps = []
    for s in range(period_frames):
        t = (np.arange(hop) + s * hop) / sample_rate
        phases = rng.uniform(0.0, 2.0 * np.pi, 3)
        tone = sum(
            a * np.sin(2.0 * np.pi * roots[s] * (h + 1) * t + phases[h])
            for h, a in enumerate((1.0, 0.5, 0.33))
        )
        steps.append(tone)
    pattern = np.concatenate(steps)
    bg = np.tile(pattern, -(-n // period))[:n]
    bg *= 0.1 / np.sqrt(np.mean(bg * bg))
    bg_rms = 0.1
    background = bg + rng.standard_normal(n) * bg_rms * 10.0 ** (noise_db / 20.0)

    n_frames = -(-n // hop)
    covered = np.zeros(n_frames, dtype=bool)
    vocals = np.zeros(n)
    target = int(burst_frac * n_frames)
    amplitude = bg_rms * 10.0 ** (burst_gain_db / 20.0) * np.sqrt(2.0)
    while covered.sum() < target:
        length = int(rng.integers(1, 3))
        start = int(rng.integers(0, n_frames - length))
        if covered[start : start + length].any():
            continue
        covered[start : start + length] = True
        s0, s1 = start * hop, min((start + length) * hop, n)
        span = s1 - s0
        freq = rng.uniform(800.0, 4000.0)
        tone = amplitude * np.sin(
            2.0 * np.pi * freq * np.arange(span) / sample_rate + rng.uniform(0.0, 2.0 * np.pi)
        )
        ramp = min(256, span // 2)
        envelope = np.ones(span)
        envelope[:ramp] = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
        envelope[span - ramp :] = envelope[:ramp][::-1]
        vocals[s0:s1] += tone * envelope

    return SyntheticTrack(
        mix=hubsep.AudioBuffer(background + vocals, sample_rate),
        vocals=hubsep.AudioBuffer(vocals, sample_rate),
        background=hubsep.AudioBuffer(background, sample_rate),
        burst_frames=covered,
        hop=hop,
    )


@pytest.fixture(scope="session")
def bench_track() -> SyntheticTrack:
    """~60 s at 44.1 kHz, ~2584 frames with the default 4096/1024 STFT."""
    return periodic_burst_mixture()


@pytest.fixture(scope="session")
def short_track() -> SyntheticTrack:
    """~12 s variant (~517 frames) for tests that separate repeatedly."""
    return periodic_burst_mixture(duration=12.0, seed=7)


@pytest.fixture(scope="session")
def tiny_track() -> SyntheticTrack:
    """Low-rate track for CLI tests; exactly 100 frames at fft 512 / hop 128."""
    return periodic_burst_mixture(
        duration=100 * 128 / 8000.0, sample_rate=8000, hop=128, seed=11
    )
