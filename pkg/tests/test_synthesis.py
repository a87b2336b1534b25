"""Symbolic banks, fingerings, tablature sampling, rendering, augmentation,
and dataset generation."""

import numpy as np
import pytest

from strumkit.audio import AudioClip
from strumkit.events import ChordSymbol, Direction, Quality, StrumPattern16
from strumkit.synthesis.augment import AugmentConfig, augment_audio
from strumkit.synthesis.banks import (DEGREE_TABLE, PATTERN_BANK,
                                      PROGRESSION_BANK, resolve_progression)
from strumkit.synthesis.dataset import (DatasetConfig, assign_splits,
                                        generate_example)
from strumkit.synthesis.fingerings import (MUTED, OPEN_STRING_MIDI,
                                           fingering_for)
from strumkit.synthesis.render import (RenderConfig, karplus_strong,
                                       midi_to_hz, render_tablature)
from strumkit.synthesis.tablature import SampleConfig, sample_tablature

MAJOR_TRIAD = (0, 4, 7)
MINOR_TRIAD = (0, 3, 7)


class TestBanks:
    def test_bank_sizes(self):
        assert len(PROGRESSION_BANK) == 51
        assert len(PATTERN_BANK) == 36

    def test_patterns_are_valid_and_unique(self):
        texts = [str(p) for p in PATTERN_BANK]
        assert len(set(texts)) == 36
        assert all(len(t) == 16 for t in texts)
        assert all(p.stroke_slots for p in PATTERN_BANK)

    def test_degree_resolution_in_c(self):
        prog = next(p for p in PROGRESSION_BANK
                    if tuple(p.degrees) == ("I", "V", "vi", "IV"))
        chords = resolve_progression(prog, key=0)
        assert [str(c) for c in chords] == ["C:maj", "G:maj", "A:min", "F:maj"]

    def test_degree_table_qualities(self):
        for degree, (semis, quality) in DEGREE_TABLE.items():
            assert 0 <= semis < 12
            assert quality in (Quality.MAJOR, Quality.MINOR)

    def test_transposition_consistency(self):
        prog = PROGRESSION_BANK[0]
        base = resolve_progression(prog, key=0)
        up = resolve_progression(prog, key=2)
        for a, b in zip(base, up):
            assert b.root == (a.root + 2) % 12
            assert b.quality == a.quality


class TestFingerings:
    def test_all_24_chords_covered(self):
        for index in range(24):
            chord = ChordSymbol.from_class_index(index)
            fingering = fingering_for(chord)
            triad = MAJOR_TRIAD if chord.quality is Quality.MAJOR else MINOR_TRIAD
            expected = {(chord.root + i) % 12 for i in triad}
            assert fingering.pitch_classes() == expected, str(chord)
            # the root must actually sound
            assert chord.root in {m % 12 for _, m in fingering.sounding_midi()}

    def test_known_open_shapes(self):
        c_maj = fingering_for(ChordSymbol.parse("C:maj"))
        assert c_maj.frets == (MUTED, 3, 2, 0, 1, 0)
        e_min = fingering_for(ChordSymbol.parse("E:min"))
        assert e_min.frets == (0, 2, 2, 0, 0, 0)

    def test_at_least_three_strings_sound(self):
        for index in range(24):
            fingering = fingering_for(ChordSymbol.from_class_index(index))
            assert len(fingering.sounding_midi()) >= 3

    def test_frets_in_playable_range(self):
        for index in range(24):
            fingering = fingering_for(ChordSymbol.from_class_index(index))
            assert all(f == MUTED or 0 <= f <= 12 for f in fingering.frets)


class TestSampleTablature:
    def test_events_slot_exact(self):
        rng = np.random.default_rng(0)
        tab, events = sample_tablature(rng, SampleConfig())
        period = tab.slot_period_s
        strokes = tab.pattern.stroke_slots
        expected = [(m * 16 + slot) * period
                    for m in range(len(tab.measures))
                    for slot, _ in strokes]
        assert [e.time_s for e in events] == pytest.approx(expected)

    def test_chords_cycle_per_measure(self):
        rng = np.random.default_rng(1)
        tab, events = sample_tablature(rng, SampleConfig())
        strokes_per_measure = len(tab.pattern.stroke_slots)
        for m, (chord, _) in enumerate(tab.measures):
            measure_events = events[m * strokes_per_measure:
                                    (m + 1) * strokes_per_measure]
            assert all(e.chord == chord for e in measure_events)

    def test_tempo_within_range(self):
        cfg = SampleConfig(tempo_range=(90.0, 100.0))
        for seed in range(10):
            tab, _ = sample_tablature(np.random.default_rng(seed), cfg)
            assert 90.0 <= tab.tempo_bpm <= 100.0

    def test_deterministic(self):
        a, ev_a = sample_tablature(np.random.default_rng(9), SampleConfig())
        b, ev_b = sample_tablature(np.random.default_rng(9), SampleConfig())
        assert a == b and ev_a == ev_b


class TestKarplusStrong:
    @pytest.mark.parametrize("freq", [82.4, 110.0, 220.0, 440.0])
    def test_fundamental_frequency(self, freq):
        rng = np.random.default_rng(0)
        rate = 44100
        x = karplus_strong(freq, rate, rng, rate)
        # measure the fundamental from the autocorrelation peak
        segment = x[rate // 4: rate // 2]
        ac = np.correlate(segment, segment, "full")[len(segment) - 1:]
        lo = int(rate / (freq * 1.3))
        hi = int(rate / (freq * 0.7))
        lag = lo + int(np.argmax(ac[lo:hi]))
        measured = rate / lag
        assert measured == pytest.approx(freq, rel=0.03)

    def test_decays(self):
        rng = np.random.default_rng(0)
        x = karplus_strong(220.0, 88200, rng, 44100, damping=0.995)
        early = np.abs(x[:4410]).max()
        late = np.abs(x[-4410:]).max()
        assert late < 0.1 * early

    def test_rejects_bad_frequency(self):
        with pytest.raises(ValueError):
            karplus_strong(0.0, 1000, np.random.default_rng(0))


class TestRender:
    def test_render_basics(self, clean_render):
        audio = clean_render["audio"]
        events = clean_render["events"]
        assert audio.sample_rate == 44100
        # peak normalized to -1 dBFS
        assert np.max(np.abs(audio.samples)) == pytest.approx(
            10 ** (-1 / 20), abs=1e-6)
        tab = clean_render["tab"]
        assert len(events) == len(tab.pattern.stroke_slots) * len(tab.measures)

    def test_event_times_match_slots(self, clean_render):
        tab = clean_render["tab"]
        period = tab.slot_period_s
        expected = [(m * 16 + slot) * period
                    for m in range(len(tab.measures))
                    for slot, _ in tab.pattern.stroke_slots]
        got = [e.time_s for e in clean_render["events"]]
        assert got == pytest.approx(expected)

    def test_energy_arrives_at_event_times(self, clean_render):
        audio = clean_render["audio"]
        rate = audio.sample_rate
        first = clean_render["events"][0].time_s
        before = audio.samples[:int(first * rate)]
        assert np.max(np.abs(before), initial=0.0) < 1e-9

    def test_deterministic(self, clean_render):
        tab = clean_render["tab"]
        again, _ = render_tablature(tab, np.random.default_rng(2024))
        np.testing.assert_array_equal(again.samples,
                                      clean_render["audio"].samples)


class TestAugment:
    def test_bypass_is_identity(self):
        rng = np.random.default_rng(0)
        clip = AudioClip(np.sin(np.arange(44100) / 50.0) * 0.5, 44100)
        out, record = augment_audio(clip, rng, cfg=AugmentConfig.bypass())
        np.testing.assert_array_equal(out.samples, clip.samples)
        assert record == {}

    def test_noise_stage_hits_target_snr(self):
        cfg = AugmentConfig.bypass()
        cfg = AugmentConfig(**{**vars(cfg), "noise": True,
                               "snr_range_db": (20.0, 20.0)})
        rng = np.random.default_rng(1)
        clip = AudioClip(0.3 * np.sin(2 * np.pi * 220 *
                                      np.arange(44100) / 44100), 44100)
        out, record = augment_audio(clip, rng, cfg=cfg)
        assert record["noise_snr_db"] == pytest.approx(20.0)
        noise = out.samples - clip.samples
        snr_db = 10 * np.log10((clip.samples ** 2).mean() /
                               (noise ** 2).mean())
        assert snr_db == pytest.approx(20.0, abs=1.0)

    def test_limiter_bounds_peak(self):
        rng = np.random.default_rng(2)
        clip = AudioClip(np.clip(np.sin(np.arange(44100)) * 2, -1, 1), 44100)
        out, _ = augment_audio(clip, rng)
        assert np.max(np.abs(out.samples)) <= 1.0 + 1e-12

    def test_all_draws_recorded(self):
        rng = np.random.default_rng(3)
        clip = AudioClip(0.5 * np.sin(np.arange(44100) / 20.0), 44100)
        _, record = augment_audio(clip, rng)
        for key in ("distortion_drive", "highpass_hz", "lowpass_hz",
                    "comp_threshold_dbfs", "comp_ratio", "reverb_decay_s",
                    "reverb_wet", "noise_snr_db", "noise_kind", "n_bursts"):
            assert key in record

    def test_empty_clip_rejected(self):
        with pytest.raises(ValueError):
            augment_audio(AudioClip(np.zeros(0), 44100),
                          np.random.default_rng(0))


class TestDataset:
    def test_split_counts_50(self):
        splits = assign_splits(50, 7)
        counts = {s: splits.count(s) for s in ("train", "valid", "test")}
        assert counts == {"train": 45, "valid": 2, "test": 3}

    def test_split_counts_1000(self):
        splits = assign_splits(1000, 0)
        counts = {s: splits.count(s) for s in ("train", "valid", "test")}
        assert counts == {"train": 900, "valid": 50, "test": 50}

    def test_split_deterministic(self):
        assert assign_splits(100, 3) == assign_splits(100, 3)

    def test_generate_example_deterministic(self):
        cfg = DatasetConfig(count=20, seed=5)
        a_clip, a_events, a_params = generate_example(cfg, 4)
        b_clip, b_events, b_params = generate_example(cfg, 4)
        np.testing.assert_array_equal(a_clip.samples, b_clip.samples)
        assert a_events == b_events
        assert a_params == b_params

    def test_examples_differ_across_indices(self):
        cfg = DatasetConfig(count=20, seed=5)
        a_clip, _, _ = generate_example(cfg, 0)
        b_clip, _, _ = generate_example(cfg, 1)
        assert len(a_clip) != len(b_clip) or \
            not np.array_equal(a_clip.samples, b_clip.samples)
