import struct

import numpy as np
import pytest

from grd.audio import (
    AudioSignal,
    FrameConfig,
    Window,
    frame_signal,
    read_wav,
    write_wav,
)
from grd.errors import AudioFormatError, UnsupportedAudioError


def make_wav_bytes(fmt_code, bits, channels, rate, payload):
    block = channels * bits // 8
    return b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHH", 16, fmt_code, channels, rate, rate * block, block, bits),
            b"data",
            struct.pack("<I", len(payload)),
            payload,
        ]
    )


def test_pcm16_scaling(tmp_path):
    payload = np.array([0, 16384, -32768], dtype="<i2").tobytes()
    path = tmp_path / "a.wav"
    path.write_bytes(make_wav_bytes(1, 16, 1, 8000, payload))
    sig = read_wav(path)
    assert sig.sample_rate == 8000
    np.testing.assert_array_equal(sig.samples, [0.0, 0.5, -1.0])


def test_read_is_deterministic(tmp_path):
    payload = np.arange(-5, 5, dtype="<i2").tobytes()
    path = tmp_path / "a.wav"
    path.write_bytes(make_wav_bytes(1, 16, 1, 16000, payload))
    first = read_wav(path)
    second = read_wav(path)
    assert np.array_equal(first.samples, second.samples)
    assert first.sample_rate == second.sample_rate


def test_sine_round_trip_error(tmp_path):
    # write quantizes to 16-bit PCM; worst error is half a quantization step
    t = np.arange(16000) / 16000.0
    sine = 0.9 * np.sin(2 * np.pi * 1000.0 * t)
    path = tmp_path / "sine.wav"
    write_wav(path, AudioSignal(samples=sine, sample_rate=16000))
    back = read_wav(path)
    assert back.sample_rate == 16000
    assert np.max(np.abs(back.samples - sine)) < 2.0**-15


def test_float32_wav(tmp_path):
    values = np.array([0.25, -0.5, 1.0], dtype="<f4")
    path = tmp_path / "f.wav"
    path.write_bytes(make_wav_bytes(3, 32, 1, 44100, values.tobytes()))
    sig = read_wav(path)
    np.testing.assert_array_equal(sig.samples, values.astype(np.float64))


def test_multichannel_takes_first(tmp_path):
    interleaved = np.array([100, 200, 300, 400], dtype="<i2").tobytes()
    path = tmp_path / "st.wav"
    path.write_bytes(make_wav_bytes(1, 16, 2, 8000, interleaved))
    sig = read_wav(path)
    np.testing.assert_allclose(sig.samples, np.array([100, 300]) / 32768.0)


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"JUNKJUNKJUNKJUNK")
    with pytest.raises(AudioFormatError):
        read_wav(path)


def test_truncated_data_chunk(tmp_path):
    good = make_wav_bytes(1, 16, 1, 8000, np.zeros(10, dtype="<i2").tobytes())
    path = tmp_path / "cut.wav"
    path.write_bytes(good[:-4])
    with pytest.raises(AudioFormatError):
        read_wav(path)


@pytest.mark.parametrize("fmt_code,bits", [(1, 8), (1, 24), (6, 8), (3, 64)])
def test_unsupported_encodings(tmp_path, fmt_code, bits):
    path = tmp_path / "u.wav"
    path.write_bytes(make_wav_bytes(fmt_code, bits, 1, 8000, b"\x00" * 48))
    with pytest.raises(UnsupportedAudioError):
        read_wav(path)


def test_framing_starts_and_count():
    sig = AudioSignal(samples=np.arange(1000) / 1000.0, sample_rate=8000)
    cfg = FrameConfig(frame_len=400, hop=200, window=Window.RECTANGULAR)
    frames = frame_signal(sig, cfg)
    assert frames.shape == (4, 400)
    for t, start in enumerate([0, 200, 400, 600]):
        np.testing.assert_array_equal(frames[t], sig.samples[start : start + 400])


def test_single_full_frame_is_identity():
    samples = np.linspace(-0.5, 0.5, 64)
    sig = AudioSignal(samples=samples, sample_rate=8000)
    frames = frame_signal(sig, FrameConfig(frame_len=64, hop=64, window=Window.RECTANGULAR))
    assert frames.shape == (1, 64)
    np.testing.assert_array_equal(frames[0], samples)


def test_hamming_window_curve_and_sum():
    n = 512
    sig = AudioSignal(samples=np.ones(n), sample_rate=8000)
    frames = frame_signal(sig, FrameConfig(frame_len=n, hop=n, window=Window.HAMMING))
    np.testing.assert_allclose(frames[0], np.hamming(n))
    # sum of cos(2 pi k / (n-1)) over one full turn is exactly 1
    analytic_sum = 0.54 * n - 0.46
    assert abs(frames[0].sum() - analytic_sum) < 1e-9


def test_signal_too_short():
    sig = AudioSignal(samples=np.zeros(10), sample_rate=8000)
    with pytest.raises(ValueError):
        frame_signal(sig, FrameConfig(frame_len=16, hop=8))


def test_frame_config_invariants():
    with pytest.raises(ValueError):
        FrameConfig(frame_len=10, hop=11)
    with pytest.raises(ValueError):
        FrameConfig(frame_len=10, hop=0)


def test_audio_signal_invariants():
    with pytest.raises(ValueError):
        AudioSignal(samples=np.array([0.0, np.nan]), sample_rate=8000)
    with pytest.raises(ValueError):
        AudioSignal(samples=np.zeros(4), sample_rate=0)
