"""Waveform container, WAV I/O, resampling, and pitch shifting."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strumkit.audio import (AudioClip, load_wav, load_wav_bytes, pitch_shift,
                            resample, save_wav)


def sine(freq, duration_s, rate, amp=0.5):
    t = np.arange(int(duration_s * rate)) / rate
    return AudioClip(amp * np.sin(2 * np.pi * freq * t), rate)


class TestAudioClip:
    def test_rejects_stereo(self):
        with pytest.raises(ValueError):
            AudioClip(np.zeros((100, 2)), 16000)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            AudioClip(np.array([0.0, np.nan]), 16000)

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            AudioClip(np.zeros(10), 0)

    def test_duration(self):
        assert AudioClip(np.zeros(16000), 16000).duration_s == 1.0


class TestWavIO:
    def test_roundtrip_pcm16(self, tmp_path):
        clip = sine(440, 0.5, 44100)
        save_wav(tmp_path / "a.wav", clip)
        loaded = load_wav(tmp_path / "a.wav")
        assert loaded.sample_rate == 44100
        assert len(loaded) == len(clip)
        # 16-bit quantization error bound
        assert np.max(np.abs(loaded.samples - clip.samples)) < 2 / 32768

    def test_bytes_equals_file(self, tmp_path):
        clip = sine(200, 0.2, 16000)
        save_wav(tmp_path / "a.wav", clip)
        from_file = load_wav(tmp_path / "a.wav")
        from_bytes = load_wav_bytes((tmp_path / "a.wav").read_bytes())
        np.testing.assert_array_equal(from_file.samples, from_bytes.samples)

    def test_stereo_downmix(self, tmp_path):
        from scipy.io import wavfile
        left = np.full(1000, 0.25, dtype=np.float32)
        right = np.full(1000, 0.75, dtype=np.float32)
        wavfile.write(str(tmp_path / "s.wav"), 8000,
                      np.stack([left, right], axis=1))
        clip = load_wav(tmp_path / "s.wav")
        assert np.allclose(clip.samples, 0.5)


class TestResample:
    def test_identity_rate(self):
        clip = sine(440, 0.3, 16000)
        out = resample(clip, 16000)
        np.testing.assert_array_equal(out.samples, clip.samples)

    def test_output_rate_and_length(self):
        clip = sine(440, 1.0, 44100)
        out = resample(clip, 16000)
        assert out.sample_rate == 16000
        assert len(out) == 16000

    def test_duration_preserved_within_one_sample(self):
        clip = AudioClip(np.random.default_rng(0).normal(size=22051), 22050)
        out = resample(clip, 16000)
        assert abs(out.duration_s - clip.duration_s) <= 1 / 16000

    def test_tone_survives(self):
        clip = sine(440, 1.0, 44100)
        out = resample(clip, 16000)
        spectrum = np.abs(np.fft.rfft(out.samples))
        peak_hz = np.argmax(spectrum) * 16000 / len(out)
        assert abs(peak_hz - 440) < 2

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            resample(sine(440, 0.1, 16000), 0)

    @given(rate=st.sampled_from([8000, 16000, 22050, 44100, 48000]),
           n=st.integers(min_value=100, max_value=5000))
    @settings(max_examples=25, deadline=None)
    def test_length_formula(self, rate, n):
        clip = AudioClip(np.zeros(n), 44100)
        out = resample(clip, rate)
        assert len(out) == round(n * rate / 44100)


class TestPitchShift:
    def test_zero_shift_is_identity(self):
        clip = sine(440, 0.5, 16000)
        out, scale = pitch_shift(clip, 0)
        assert scale == 1.0
        np.testing.assert_array_equal(out.samples, clip.samples)

    def test_octave_up(self):
        clip = sine(440, 1.0, 16000)
        out, scale = pitch_shift(clip, 12)
        assert scale == pytest.approx(0.5)
        spectrum = np.abs(np.fft.rfft(out.samples))
        peak_hz = np.argmax(spectrum) * 16000 / len(out)
        assert abs(peak_hz - 880) < 3

    @pytest.mark.parametrize("semitones", [-12, -6, -3, 3, 6, 12])
    def test_time_scale_and_duration(self, semitones):
        clip = sine(300, 1.0, 16000)
        out, scale = pitch_shift(clip, semitones)
        assert scale == pytest.approx(2.0 ** (-semitones / 12.0))
        assert out.sample_rate == clip.sample_rate
        # duration multiplied by time_scale, up to rational approximation
        assert out.duration_s == pytest.approx(clip.duration_s * scale,
                                               rel=1e-3)

    def test_frequency_ratio(self):
        clip = sine(440, 1.0, 16000)
        out, _ = pitch_shift(clip, 3)
        spectrum = np.abs(np.fft.rfft(out.samples))
        peak_hz = np.argmax(spectrum) * 16000 / len(out)
        assert abs(peak_hz - 440 * 2 ** (3 / 12)) < 3

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            pitch_shift(sine(440, 0.1, 16000), 13)
