"""Chord symbols, strum events, patterns, and the label CSV format."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strumkit.events import (ChordSymbol, Direction, Quality, Slot,
                             StrumEvent, StrumPattern16, events_from_csv,
                             events_to_csv, read_labels, write_labels)

chords = st.builds(ChordSymbol, root=st.integers(0, 11),
                   quality=st.sampled_from(Quality))
directions = st.sampled_from(Direction)
events_strategy = st.lists(
    st.builds(StrumEvent,
              time_s=st.floats(0, 100, allow_nan=False, allow_infinity=False),
              direction=directions, chord=chords),
    max_size=30).map(lambda evs: sorted(evs, key=lambda e: e.time_s))


class TestChordSymbol:
    def test_parse_str_examples(self):
        assert str(ChordSymbol.parse("A:min")) == "A:min"
        assert str(ChordSymbol.parse("C#:maj")) == "C#:maj"
        assert ChordSymbol.parse("C:maj").root == 0

    def test_class_index_layout(self):
        assert ChordSymbol.parse("C:maj").class_index == 0
        assert ChordSymbol.parse("B:maj").class_index == 11
        assert ChordSymbol.parse("C:min").class_index == 12
        assert ChordSymbol.parse("B:min").class_index == 23

    @given(chord=chords)
    def test_class_index_bijection(self, chord):
        assert ChordSymbol.from_class_index(chord.class_index) == chord

    @given(chord=chords, shift=st.integers(-24, 24))
    def test_transposition_preserves_quality(self, chord, shift):
        out = chord.transposed(shift)
        assert out.quality == chord.quality
        assert out.root == (chord.root + shift) % 12

    def test_transpose_example(self):
        assert str(ChordSymbol.parse("C:maj").transposed(2)) == "D:maj"

    def test_malformed_rejected(self):
        for bad in ("H:maj", "C:sus4", "Cmaj", ""):
            with pytest.raises(ValueError):
                ChordSymbol.parse(bad)

    def test_invalid_root_rejected(self):
        with pytest.raises(ValueError):
            ChordSymbol(12, Quality.MAJOR)


class TestStrumPattern16:
    def test_parse_str_roundtrip(self):
        text = "d..u.ud.d..u.ud."
        assert str(StrumPattern16.parse(text)) == text

    def test_stroke_slots(self):
        pattern = StrumPattern16.parse("d.u." + "." * 12)
        assert pattern.stroke_slots == [(0, Direction.DOWN), (2, Direction.UP)]

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            StrumPattern16.parse("d.u.")

    def test_bad_character_rejected(self):
        with pytest.raises(ValueError):
            StrumPattern16.parse("x" * 16)

    def test_all_rest_has_no_strokes(self):
        assert StrumPattern16.parse("." * 16).stroke_slots == []


class TestLabelCsv:
    def test_header_and_format(self):
        events = [StrumEvent(1.25, Direction.DOWN, ChordSymbol.parse("A:min"))]
        text = events_to_csv(events)
        lines = text.splitlines()
        assert lines[0] == "time_s,direction,chord"
        assert lines[1] == "1.250000,down,A:min"

    def test_unsorted_rejected(self):
        events = [StrumEvent(2.0, Direction.DOWN, ChordSymbol.parse("C:maj")),
                  StrumEvent(1.0, Direction.UP, ChordSymbol.parse("C:maj"))]
        with pytest.raises(ValueError):
            events_to_csv(events)

    @given(events=events_strategy)
    @settings(max_examples=50, deadline=None)
    def test_roundtrip(self, events):
        parsed = events_from_csv(events_to_csv(events))
        assert len(parsed) == len(events)
        for a, b in zip(parsed, events):
            assert a.time_s == pytest.approx(b.time_s, abs=1e-6)
            assert a.direction == b.direction
            assert a.chord == b.chord

    def test_file_roundtrip(self, tmp_path):
        events = [StrumEvent(0.5, Direction.UP, ChordSymbol.parse("G:maj"))]
        write_labels(tmp_path / "x.csv", events)
        assert read_labels(tmp_path / "x.csv") == events

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            events_from_csv("a,b,c\n1.0,down,C:maj")

    def test_non_finite_time_rejected(self):
        with pytest.raises(ValueError):
            StrumEvent(float("nan"), Direction.DOWN, ChordSymbol.parse("C:maj"))
