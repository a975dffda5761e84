import numpy as np
import pytest

from hubsep import (
    AudioBuffer,
    ComplexSpectrogram,
    StftConfig,
    magnitude,
    stft_forward,
    stft_inverse,
)

DEFAULT = StftConfig()
SMALL = StftConfig(512, 128)


def rel_error(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_config_validation():
    with pytest.raises(ValueError):
        StftConfig(fft_size=1000)  # not a power of two
    with pytest.raises(ValueError):
        StftConfig(fft_size=1024, hop_size=0)
    with pytest.raises(ValueError):
        StftConfig(fft_size=1024, hop_size=2048)
    with pytest.raises(ValueError):
        StftConfig(fft_size=1024, hop_size=384)  # does not divide
    with pytest.raises(ValueError):
        StftConfig(window="boxcar")
    assert DEFAULT.n_bins == 2049


def test_zero_signal_shape():
    buf = AudioBuffer(np.zeros(44100), 44100)
    spec = stft_forward(buf, DEFAULT)
    assert spec.values.shape == (2049, -(-44100 // 1024))
    assert not spec.values.any()


def test_frame_count_is_ceil_len_over_hop():
    for n in (1, 127, 128, 129, 512, 1000, 12800):
        buf = AudioBuffer(np.ones(n), 8000)
        spec = stft_forward(buf, SMALL)
        assert spec.n_frames == -(-n // SMALL.hop_size), n


def test_sinusoid_peaks_at_center_bin():
    # Closed form: for a periodic Hann window, the DFT of a unit sinusoid at
    # bin m0 has magnitude fft/4 at m0 and fft/8 at m0 +- 1, zero elsewhere
    # (away from the negative-frequency image).
    sr = 44100
    m0 = 10
    freq = m0 * sr / DEFAULT.fft_size
    t = np.arange(3 * sr) / sr
    buf = AudioBuffer(np.sin(2 * np.pi * freq * t), sr)
    spec = stft_forward(buf, DEFAULT)
    mags = np.abs(spec.values)
    interior = range(4, spec.n_frames - 5)
    assert all(np.argmax(mags[:, j]) == m0 for j in interior)
    peak = DEFAULT.fft_size / 4
    assert mags[m0, 20] == pytest.approx(peak, rel=1e-9)
    assert mags[m0 - 1, 20] == pytest.approx(peak / 2, rel=1e-9)
    assert mags[m0 + 1, 20] == pytest.approx(peak / 2, rel=1e-9)
    assert mags[m0 + 3, 20] == pytest.approx(0.0, abs=1e-6)


def test_impulse_energy_confined_to_overlapping_frames():
    # Window support: frame j covers sample 0 iff j*hop - fft/2 <= 0 < j*hop + fft/2,
    # and the window is zero at its first sample, so with fft/hop = 4 only
    # frames 0 and 1 carry energy.
    n = 4096
    x = np.zeros(n)
    x[0] = 1.0
    spec = stft_forward(AudioBuffer(x, 8000), SMALL)
    mags = np.abs(spec.values)
    window = SMALL.make_window()
    for j in range(spec.n_frames):
        position = SMALL.fft_size // 2 - j * SMALL.hop_size
        expected = window[position] if 0 <= position < SMALL.fft_size else 0.0
        assert mags[:, j] == pytest.approx(np.full(SMALL.n_bins, expected), abs=1e-12)
    assert mags[:, 0].any() and mags[:, 1].any()
    assert not mags[:, 2:].any()


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_round_trip_random(seed):
    rng = np.random.default_rng(seed)
    n = int(3 * 44100)
    buf = AudioBuffer(rng.standard_normal(n) * 0.3, 44100)
    spec = stft_forward(buf, DEFAULT)
    back = stft_inverse(spec, n)
    assert rel_error(back.samples, buf.samples) < 1e-6


def test_round_trip_sinusoid():
    sr = 44100
    t = np.arange(2 * sr) / sr
    buf = AudioBuffer(np.sin(2 * np.pi * 440.0 * t), sr)
    back = stft_inverse(stft_forward(buf, DEFAULT), buf.n_samples)
    assert rel_error(back.samples, buf.samples) < 1e-6


def test_round_trip_awkward_lengths():
    rng = np.random.default_rng(5)
    for n in (129, 500, 4096, 5000):
        buf = AudioBuffer(rng.standard_normal(n), 8000)
        back = stft_inverse(stft_forward(buf, SMALL), n)
        assert rel_error(back.samples, buf.samples) < 1e-6, n


def test_inverse_zero_spectrogram():
    spec = ComplexSpectrogram(np.zeros((257, 5), dtype=complex), SMALL, 8000)
    out = stft_inverse(spec, 640)
    assert out.n_samples == 640
    assert not out.samples.any()


def test_inverse_pads_when_longer_than_frames_cover():
    buf = AudioBuffer(np.random.default_rng(6).standard_normal(256), 8000)
    spec = stft_forward(buf, SMALL)
    out = stft_inverse(spec, 1000)
    assert out.n_samples == 1000
    assert rel_error(out.samples[:256], buf.samples) < 1e-6
    assert not out.samples[800:].any()


def test_magnitude_examples():
    values = np.zeros((257, 2), dtype=complex)
    values[3, 0] = 3 + 4j
    mag = magnitude(ComplexSpectrogram(values, SMALL, 8000))
    assert mag.values[3, 0] == pytest.approx(5.0, abs=0)
    assert magnitude(ComplexSpectrogram(np.zeros((257, 2)), SMALL, 8000)).values.sum() == 0

    rng = np.random.default_rng(7)
    z = rng.standard_normal((257, 6)) + 1j * rng.standard_normal((257, 6))
    mag = magnitude(ComplexSpectrogram(z, SMALL, 8000))
    assert mag.values == pytest.approx(np.sqrt(z.real**2 + z.imag**2), rel=1e-15)


def test_scaling_scales_magnitudes():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(2000)
    base = np.abs(stft_forward(AudioBuffer(x, 8000), SMALL).values)
    for c in (0.25, -3.0):
        scaled = np.abs(stft_forward(AudioBuffer(c * x, 8000), SMALL).values)
        assert scaled == pytest.approx(abs(c) * base, rel=1e-12, abs=1e-12)


def test_forward_rejects_non_mono_and_empty():
    with pytest.raises(ValueError):
        stft_forward(AudioBuffer(np.zeros((100, 2)), 8000), SMALL)
    with pytest.raises(ValueError):
        stft_forward(AudioBuffer(np.zeros(0), 8000), SMALL)


def test_spectrogram_dimension_validation():
    with pytest.raises(ValueError):
        ComplexSpectrogram(np.zeros((100, 5), dtype=complex), SMALL, 8000)
