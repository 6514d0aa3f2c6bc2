"""Tremor indicators from the acceleration magnitude.

The non-pause samples of a recording are cut into fixed-length windows;
each window is decomposed by EMD and summarized by a Hilbert marginal
spectrum, approximate entropy, and recurrence quantification. Recording
level indicators are the means over windows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from . import kernels
from .emd import emd
from .errors import AllZeroSpectra, TooShortForRqa, TooShortForTremor
from .recording import PenRecording
from .segmentation import StrokeSegmentation

SPECTRUM_BIN_HZ = 0.5


@dataclass
class TremorWindows:
    """Zero-mean analysis windows cut from the non-pause accel magnitude."""

    windows: np.ndarray  # (n_windows, window_len)
    window_len: int
    sample_rate: float
    source_channel: str = "magnitude_detrended"


@dataclass
class HhtSpectrum:
    """Marginal Hilbert spectrum on a fixed frequency grid."""

    freqs: np.ndarray  # bin centers, Hz
    power: np.ndarray  # summed squared amplitude per bin
    n_imfs: int


@dataclass
class TremorFeatures:
    """The five tremor indicators for one recording."""

    f_modal: float
    rms: float
    apen: float
    rr: float
    det: float


def make_windows(rec: PenRecording, seg: StrokeSegmentation,
                 window_len: int = 500) -> TremorWindows:
    """Cut the non-pause acceleration magnitude into consecutive windows.

    Samples outside the writing span and inside pauses are dropped, the
    remainder is concatenated in time order and split into full windows of
    window_len samples (the tail shorter than one window is discarded).
    Each window has its own mean removed. Raises TooShortForTremor when not
    even one window fits.
    """
    mag = np.linalg.norm(rec.accel, axis=1)
    series = mag[seg.writing_mask()]
    n_windows = len(series) // window_len
    if n_windows == 0:
        raise TooShortForTremor(
            f"{len(series)} non-pause samples < window of {window_len}")
    trimmed = series[:n_windows * window_len].reshape(n_windows, window_len)
    windows = trimmed - trimmed.mean(axis=1, keepdims=True)
    return TremorWindows(windows=windows, window_len=window_len,
                         sample_rate=rec.sample_rate)


def hht_spectrum(window: np.ndarray, sample_rate: float = 50.0,
                 max_imfs: int = 10, sift_tol: float = 0.2) -> HhtSpectrum:
    """Marginal Hilbert spectrum of one window.

    Each IMF contributes its squared instantaneous amplitude at its
    instantaneous frequency (phase gradient of the analytic signal, clamped
    to [0, Nyquist]), accumulated into fixed 0.5 Hz bins spanning 0 to the
    Nyquist frequency. Bin centers are 0.25 + 0.5 k Hz.
    """
    window = np.asarray(window, dtype=float)
    nyquist = sample_rate / 2.0
    n_bins = int(round(nyquist / SPECTRUM_BIN_HZ))
    freqs = (np.arange(n_bins) + 0.5) * SPECTRUM_BIN_HZ
    power = np.zeros(n_bins)
    imfs, _ = emd(window, max_imfs=max_imfs, sift_tol=sift_tol)
    for imf in imfs:
        analytic = hilbert(imf)
        amp2 = np.abs(analytic) ** 2
        phase = np.unwrap(np.angle(analytic))
        inst_f = np.gradient(phase) * (sample_rate / (2.0 * np.pi))
        inst_f = np.clip(inst_f, 0.0, nyquist)
        bins = np.minimum((inst_f / SPECTRUM_BIN_HZ).astype(np.intp), n_bins - 1)
        np.add.at(power, bins, amp2)
    return HhtSpectrum(freqs=freqs, power=power, n_imfs=len(imfs))


def modal_frequency(spectra: list[HhtSpectrum]) -> float:
    """Mean over windows of the peak-power bin center; equal-power ties go
    to the lower frequency. Windows with all-zero power carry no peak and
    are skipped; raises AllZeroSpectra if that leaves nothing."""
    peaks = [s.freqs[int(np.argmax(s.power))]
             for s in spectra if np.any(s.power > 0)]
    if not peaks:
        raise AllZeroSpectra("no window has nonzero spectral power")
    return float(np.mean(peaks))


def tremor_rms(spectra: list[HhtSpectrum]) -> float:
    """Mean over windows of the root-mean-square of bin powers."""
    values = [float(np.sqrt(np.mean(s.power ** 2))) for s in spectra]
    return float(np.mean(values))


def approximate_entropy(window: np.ndarray, m: int = 2,
                        r_factor: float = 0.2) -> float:
    """Approximate entropy with Chebyshev distance and self-matches.

    Tolerance r = r_factor x population SD of the window; a constant window
    (SD = 0) returns 0 by convention.
    """
    window = np.asarray(window, dtype=float)
    n = len(window)
    if n < 100:
        raise ValueError(f"window of {n} samples; need >= 100")
    sd = float(np.std(window))
    if sd == 0.0:
        return 0.0
    c_m, c_m1 = kernels.apen_counts(window, m, r_factor * sd)
    phi_m = float(np.mean(np.log(c_m / (n - m + 1))))
    phi_m1 = float(np.mean(np.log(c_m1 / (n - m))))
    return phi_m - phi_m1


def rqa(window: np.ndarray, dim: int = 3, delay: int = 2,
        eps_factor: float = 0.5, l_min: int = 2) -> tuple[float, float]:
    """(recurrence rate, determinism) of the time-delay embedding.

    Two embedded points recur when their squared Euclidean distance is at
    most eps^2 with eps = eps_factor x population SD (tiny absolute floor
    so a constant window recurs everywhere). RR excludes the main diagonal;
    DET is the share of recurrent points on diagonal runs of length >=
    l_min, and 0 when there is no recurrent point at all.
    """
    window = np.asarray(window, dtype=float)
    if len(window) < dim * delay + 10:
        raise TooShortForRqa(
            f"{len(window)} samples; need >= {dim * delay + 10}")
    eps = max(eps_factor * float(np.std(window)), 1e-12)
    M, recurrent, diag_points = kernels.rqa_counts(window, dim, delay, eps, l_min)
    rr = recurrent / (M * (M - 1))
    det = diag_points / recurrent if recurrent > 0 else 0.0
    return float(rr), float(det)


def tremor_features(rec: PenRecording, seg: StrokeSegmentation, *,
                    window_len: int = 500, max_imfs: int = 10,
                    sift_tol: float = 0.2, apen_m: int = 2,
                    apen_r_factor: float = 0.2, rqa_dim: int = 3,
                    rqa_delay: int = 2, rqa_eps_factor: float = 0.5,
                    rqa_l_min: int = 2) -> TremorFeatures:
    """All tremor indicators: per-window values averaged in window order."""
    tw = make_windows(rec, seg, window_len=window_len)
    spectra = [hht_spectrum(w, tw.sample_rate, max_imfs, sift_tol)
               for w in tw.windows]
    apens = [approximate_entropy(w, apen_m, apen_r_factor) for w in tw.windows]
    rqas = [rqa(w, rqa_dim, rqa_delay, rqa_eps_factor, rqa_l_min)
            for w in tw.windows]
    rrs = [v[0] for v in rqas]
    dets = [v[1] for v in rqas]
    return TremorFeatures(
        f_modal=modal_frequency(spectra),
        rms=tremor_rms(spectra),
        apen=float(np.mean(apens)),
        rr=float(np.mean(rrs)),
        det=float(np.mean(dets)),
    )
