import struct

import numpy as np
import pytest

from hubsep import (
    AudioBuffer,
    UnsupportedEncodingError,
    WavFormatError,
    load_wav,
    save_wav,
    to_mono,
)


def wav_bytes(format_tag, channels, rate, bits, payload):
    fmt = b"fmt " + struct.pack(
        "<IHHIIHH", 16, format_tag, channels, rate, rate * channels * bits // 8,
        channels * bits // 8, bits,
    )
    data = b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) % 2:
        data += b"\x00"
    body = fmt + data
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body


def test_load_pcm16_zero_second(tmp_path):
    path = tmp_path / "zeros.wav"
    path.write_bytes(wav_bytes(1, 1, 44100, 16, b"\x00\x00" * 44100))
    buf = load_wav(path)
    assert buf.sample_rate == 44100
    assert buf.channels == 1
    assert buf.n_samples == 44100
    assert not buf.samples.any()


def test_load_pcm16_fullscale_normalization(tmp_path):
    path = tmp_path / "fs.wav"
    path.write_bytes(wav_bytes(1, 1, 8000, 16, struct.pack("<4h", 32767, -32768, 16384, -16384)))
    buf = load_wav(path)
    assert buf.samples[:, 0] == pytest.approx([32767 / 32768, -1.0, 0.5, -0.5], abs=0)


def test_load_pcm24(tmp_path):
    # 0x000001 = 1 LSB, 0x800000 = -2^23, 0x7fffff = 2^23 - 1
    payload = b"\x01\x00\x00" + b"\x00\x00\x80" + b"\xff\xff\x7f"
    path = tmp_path / "p24.wav"
    path.write_bytes(wav_bytes(1, 1, 48000, 24, payload))
    buf = load_wav(path)
    expected = [1.0 / 2**23, -1.0, (2**23 - 1) / 2**23]
    assert buf.samples[:, 0] == pytest.approx(expected, abs=0)


def test_load_extensible_float32(tmp_path):
    # WAVE_FORMAT_EXTENSIBLE wrapping IEEE float (subformat code 3)
    samples = np.array([0.25, -0.5], dtype="<f4")
    fmt_body = struct.pack("<HHIIHH", 0xFFFE, 1, 44100, 44100 * 4, 4, 32)
    fmt_body += struct.pack("<HHI", 22, 32, 0) + struct.pack("<H", 3) + b"\x00" * 14
    fmt = b"fmt " + struct.pack("<I", len(fmt_body)) + fmt_body
    data = b"data" + struct.pack("<I", 8) + samples.tobytes()
    body = fmt + data
    path = tmp_path / "ext.wav"
    path.write_bytes(b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body)
    buf = load_wav(path)
    assert buf.samples[:, 0] == pytest.approx([0.25, -0.5], abs=0)


def test_float32_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    for channels in (1, 2, 3):
        values = rng.uniform(-1, 1, (1000, channels)).astype(np.float32).astype(np.float64)
        buf = AudioBuffer(values, 22050)
        path = tmp_path / f"rt{channels}.wav"
        save_wav(path, buf, "float32")
        back = load_wav(path)
        assert back.sample_rate == 22050
        assert back.channels == channels
        assert np.array_equal(back.samples, values)


def test_pcm16_round_trip_quantization_bound(tmp_path):
    rng = np.random.default_rng(1)
    values = rng.uniform(-1, 1, (5000, 2))
    buf = AudioBuffer(values, 44100)
    path = tmp_path / "q.wav"
    save_wav(path, buf, "pcm16")
    back = load_wav(path)
    assert np.max(np.abs(back.samples - values)) <= 2.0**-15


def test_save_zero_buffer_data_chunk_is_zero(tmp_path):
    buf = AudioBuffer(np.zeros(100), 8000)
    path = tmp_path / "z.wav"
    save_wav(path, buf, "pcm16")
    raw = path.read_bytes()
    at = raw.index(b"data")
    (size,) = struct.unpack_from("<I", raw, at + 4)
    assert size == 200
    assert raw[at + 8 : at + 8 + size] == b"\x00" * size


def test_save_rejects_empty_and_bad_encoding(tmp_path):
    buf = AudioBuffer(np.zeros((0, 1)), 8000)
    with pytest.raises(ValueError):
        save_wav(tmp_path / "e.wav", buf)
    with pytest.raises(ValueError):
        save_wav(tmp_path / "e.wav", AudioBuffer(np.zeros(4), 8000), "pcm8")


def test_errors_are_distinguishable(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_wav(tmp_path / "nope.wav")

    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFX" + b"\x00" * 40)
    with pytest.raises(WavFormatError):
        load_wav(bad)

    truncated = tmp_path / "trunc.wav"
    full = wav_bytes(1, 1, 8000, 16, b"\x00\x00" * 10)
    truncated.write_bytes(full[:30])
    with pytest.raises(WavFormatError):
        load_wav(truncated)

    alaw = tmp_path / "alaw.wav"
    alaw.write_bytes(wav_bytes(6, 1, 8000, 8, b"\x00" * 8))
    with pytest.raises(UnsupportedEncodingError):
        load_wav(alaw)

    pcm8 = tmp_path / "pcm8.wav"
    pcm8.write_bytes(wav_bytes(1, 1, 8000, 8, b"\x00" * 8))
    with pytest.raises(UnsupportedEncodingError):
        load_wav(pcm8)


def test_to_mono_identical_channels():
    values = np.random.default_rng(2).uniform(-1, 1, 256)
    stereo = AudioBuffer(np.column_stack([values, values]), 44100)
    assert np.array_equal(to_mono(stereo).samples[:, 0], values)


def test_to_mono_symmetric_cancellation():
    stereo = AudioBuffer(np.column_stack([np.full(64, 0.5), np.full(64, -0.5)]), 44100)
    assert not to_mono(stereo).samples.any()


def test_to_mono_matches_direct_loop():
    rng = np.random.default_rng(3)
    values = rng.uniform(-1, 1, (321, 4))
    mono = to_mono(AudioBuffer(values, 8000))
    expected = np.array([values[i].sum() / 4 for i in range(321)])
    assert mono.samples[:, 0] == pytest.approx(expected, rel=1e-15)
    assert mono.n_samples == 321


def test_to_mono_idempotent():
    rng = np.random.default_rng(4)
    buf = AudioBuffer(rng.uniform(-1, 1, (100, 2)), 8000)
    once = to_mono(buf)
    twice = to_mono(once)
    assert np.array_equal(once.samples, twice.samples)


def test_to_mono_rejects_empty():
    with pytest.raises(ValueError):
        to_mono(AudioBuffer(np.zeros((0, 2)), 8000))


def test_audio_buffer_validation():
    with pytest.raises(ValueError):
        AudioBuffer(np.zeros(8), 0)
    with pytest.raises(ValueError):
        AudioBuffer(np.zeros((2, 2, 2)), 8000)
    buf = AudioBuffer(np.zeros(8), 8000)
    assert buf.channels == 1 and buf.duration == pytest.approx(0.001)
