"""Stroke segmentation from the tip-force channel.

A stroke is a maximal tract where force stays above the contact threshold
(with hysteresis: a stroke starts when force exceeds the threshold and ends
when it drops below 0.8x the threshold). Gaps between consecutive strokes
are in-air intervals; gaps longer than the pause cutoff count as pauses,
not writing time. Samples before the first stroke and after the last one
belong to neither.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyWriting
from .recording import PenRecording

_EPS = 1e-12


@dataclass
class StrokeSegmentation:
    """Index intervals [start, end) partitioning the writing span.

    strokes, in_air and pauses are disjoint; in_air/pauses are exactly the
    gaps between consecutive strokes, split by gap duration.
    """

    strokes: list[tuple[int, int]]
    in_air: list[tuple[int, int]]
    pauses: list[tuple[int, int]]
    sample_rate: float
    n_samples: int
    pause_cutoff: float

    @property
    def span(self) -> tuple[int, int]:
        """(first stroke start, last stroke end)."""
        return self.strokes[0][0], self.strokes[-1][1]

    def stroke_durations(self) -> np.ndarray:
        return np.array([(e - s) / self.sample_rate for s, e in self.strokes])

    def in_air_durations(self) -> np.ndarray:
        return np.array([(e - s) / self.sample_rate for s, e in self.in_air])

    def writing_mask(self) -> np.ndarray:
        """Boolean mask of samples inside the writing span, pauses excluded."""
        mask = np.zeros(self.n_samples, dtype=bool)
        lo, hi = self.span
        mask[lo:hi] = True
        for s, e in self.pauses:
            mask[s:e] = False
        return mask


def segment_strokes(rec: PenRecording, force_threshold: float = 0.05,
                    min_stroke: float = 0.04,
                    pause_cutoff: float = 2.0) -> StrokeSegmentation:
    """Segment a recording into strokes, in-air gaps, and pauses.

    Candidate strokes shorter than min_stroke seconds are discarded as
    sensor chatter; their samples fall into the surrounding gap. Raises
    EmptyWriting if no stroke survives.
    """
    force = rec.force
    n = len(force)
    exit_threshold = 0.8 * force_threshold
    runs = []
    start = None
    for i in range(n):
        if start is None:
            if force[i] > force_threshold:
                start = i
        elif force[i] < exit_threshold:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, n))

    min_len = min_stroke * rec.sample_rate
    strokes = [(s, e) for s, e in runs if (e - s) + _EPS >= min_len]
    if not strokes:
        raise EmptyWriting(
            f"no stroke above {force_threshold} N lasting >= {min_stroke} s")

    in_air, pauses = [], []
    for (_, prev_end), (next_start, _) in zip(strokes, strokes[1:]):
        gap = (prev_end, next_start)
        duration = (next_start - prev_end) / rec.sample_rate
        if duration <= pause_cutoff + _EPS:
            in_air.append(gap)
        else:
            pauses.append(gap)
    return StrokeSegmentation(strokes=strokes, in_air=in_air, pauses=pauses,
                              sample_rate=rec.sample_rate, n_samples=n,
                              pause_cutoff=pause_cutoff)


def temporal_indicators(seg: StrokeSegmentation) -> tuple[float, float, float]:
    """(on_sheet, in_air, air_sheet_ratio): mean stroke seconds, mean in-air
    gap seconds (pauses excluded; 0.0 if there is no gap), and their ratio."""
    on_sheet = float(np.mean(seg.stroke_durations()))
    gaps = seg.in_air_durations()
    in_air = float(np.mean(gaps)) if len(gaps) else 0.0
    return on_sheet, in_air, in_air / on_sheet
