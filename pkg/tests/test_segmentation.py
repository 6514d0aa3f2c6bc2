"""Stroke segmentation: hysteresis, debounce, pauses, coverage."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from penmetrics import EmptyWriting, segment_strokes, temporal_indicators

from conftest import make_recording, writing_force


def test_three_sample_stroke_example():
    rec = make_recording([0, 0, 1, 1, 1, 0, 0])
    seg = segment_strokes(rec, force_threshold=0.05, min_stroke=0.02)
    assert len(seg.strokes) == 1
    s, e = seg.strokes[0]
    assert e - s == 3
    assert seg.stroke_durations()[0] == pytest.approx(0.06)
    assert seg.in_air == []


def test_square_wave_ten_strokes_nine_gaps():
    n = int((10 * 1.0 + 9 * 0.5) * 50) + 1
    rec = make_recording(writing_force(n))
    seg = segment_strokes(rec)
    assert len(seg.strokes) == 10
    assert len(seg.in_air) == 9
    assert len(seg.pauses) == 0
    assert np.allclose(seg.stroke_durations(), 1.0)
    assert np.allclose(seg.in_air_durations(), 0.5)


def test_stretched_gap_becomes_pause():
    fs = 50
    pieces = []
    for k in range(10):
        pieces.append(np.ones(int(1.0 * fs)))
        if k < 9:
            gap = 2.5 if k == 4 else 0.5
            pieces.append(np.zeros(int(gap * fs)))
    rec = make_recording(np.concatenate(pieces))
    seg = segment_strokes(rec)
    assert len(seg.strokes) == 10
    assert len(seg.in_air) == 8
    assert len(seg.pauses) == 1
    assert seg.in_air_durations().max() <= 2.0 + 1e-9


def test_leading_trailing_tracts_discarded():
    rec = make_recording([0] * 60 + [1] * 50 + [0] * 25 + [1] * 50 + [0] * 80)
    seg = segment_strokes(rec)
    assert len(seg.strokes) == 2
    assert len(seg.in_air) == 1
    lo, hi = seg.span
    assert lo == 60 and hi == 60 + 50 + 25 + 50


def test_short_stroke_debounced():
    # one real stroke and one 1-sample blip (20 ms < min_stroke 40 ms)
    rec = make_recording([0] * 10 + [1] * 50 + [0] * 20 + [1] + [0] * 20 +
                         [1] * 50 + [0] * 10)
    seg = segment_strokes(rec)
    assert len(seg.strokes) == 2


def test_two_sample_stroke_survives_default_min_stroke():
    # 2 samples at 50 Hz = 40 ms; must not be lost to float round-off
    rec = make_recording([0] * 10 + [1, 1] + [0] * 10 + [1] * 50 + [0] * 10)
    seg = segment_strokes(rec)
    assert len(seg.strokes) == 2


def test_hysteresis_exit_below_080_threshold():
    # dips to 0.9 N stay inside the stroke (exit threshold = 0.8 N)
    force = [0] * 5 + [1.2, 1.2, 0.9, 1.2, 1.2] + [0] * 5
    seg = segment_strokes(make_recording(force), force_threshold=1.0)
    assert len(seg.strokes) == 1
    force = [0] * 5 + [1.2, 1.2, 0.7, 1.2, 1.2] + [0] * 5
    seg = segment_strokes(make_recording(force), force_threshold=1.0,
                          min_stroke=0.02)
    assert len(seg.strokes) == 2


def test_empty_writing_raises():
    with pytest.raises(EmptyWriting):
        segment_strokes(make_recording(np.zeros(300)))


def test_temporal_indicators_square_wave():
    n = int((10 * 1.0 + 9 * 0.5) * 50) + 1
    seg = segment_strokes(make_recording(writing_force(n)))
    on_sheet, in_air, ratio = temporal_indicators(seg)
    assert on_sheet == pytest.approx(1.0)
    assert in_air == pytest.approx(0.5)
    assert ratio == pytest.approx(0.5)


def test_temporal_indicators_single_stroke_no_gaps():
    rec = make_recording([0] * 5 + [1] * 100 + [0] * 5)
    seg = segment_strokes(rec)
    on_sheet, in_air, ratio = temporal_indicators(seg)
    assert on_sheet == pytest.approx(2.0)
    assert in_air == 0.0
    assert ratio == 0.0


def test_temporal_indicators_hand_rolled_oracle():
    fs = 50
    rng = np.random.default_rng(11)
    stroke_lens = rng.integers(10, 60, size=8)
    gap_lens = rng.integers(5, 40, size=7).tolist()
    gap_lens[3] = 150  # 3 s pause
    pieces, strokes_s, gaps_s = [], [], []
    for k, sl in enumerate(stroke_lens):
        pieces.append(np.ones(sl))
        strokes_s.append(sl / fs)
        if k < len(gap_lens):
            pieces.append(np.zeros(gap_lens[k]))
            if gap_lens[k] / fs <= 2.0:
                gaps_s.append(gap_lens[k] / fs)
    seg = segment_strokes(make_recording(np.concatenate(pieces)))
    on_sheet, in_air, ratio = temporal_indicators(seg)
    assert on_sheet == pytest.approx(np.mean(strokes_s), abs=1e-12)
    assert in_air == pytest.approx(np.mean(gaps_s), abs=1e-12)
    assert ratio == pytest.approx(np.mean(gaps_s) / np.mean(strokes_s),
                                  abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([0.0, 0.02, 0.5, 1.0, 2.0]),
                min_size=60, max_size=400))
def test_coverage_partition_property(levels):
    force = np.asarray(levels)
    rec = make_recording(force)
    try:
        seg = segment_strokes(rec)
    except EmptyWriting:
        return
    lo, hi = seg.span
    counted = np.zeros(len(force), dtype=int)
    for s, e in seg.strokes + seg.in_air + seg.pauses:
        counted[s:e] += 1
        assert lo <= s < e <= hi
    # inside the span every sample belongs to exactly one interval kind
    assert np.all(counted[lo:hi] == 1)
    assert np.all(counted[:lo] == 0) and np.all(counted[hi:] == 0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 3.0, allow_nan=False), min_size=80,
                max_size=300),
       st.floats(0.05, 1.5))
def test_monotone_threshold_property(levels, thr):
    force = np.asarray(levels)
    rec = make_recording(force)

    def total_on_sheet(threshold):
        try:
            seg = segment_strokes(rec, force_threshold=threshold)
        except EmptyWriting:
            return 0.0
        return float(seg.stroke_durations().sum())

    assert total_on_sheet(thr * 1.5) <= total_on_sheet(thr) + 1e-12
