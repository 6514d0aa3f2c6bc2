"""Empirical mode decomposition by sifting.

Each sifting pass subtracts the mean of the upper and lower cubic-spline
envelopes through the local extrema, with the two nearest extrema of each
kind mirrored about the end points to stabilize the boundary. A pass
converges when the normalized squared change between consecutive iterates
drops below the tolerance; decomposition stops when the residual has fewer
than two extrema of either kind (monotone-like) or the IMF cap is reached.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import SiftDiverged

MIN_SIGNAL_LEN = 16
_MAX_SIFT_ITER = 100


def local_extrema(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices of local maxima and minima; plateaus count once at their
    midpoint. End points are never extrema."""
    x = np.asarray(x, dtype=float)
    dx = np.diff(x)
    nz = np.nonzero(dx)[0]
    if nz.size < 2:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty
    s = np.sign(dx[nz])
    # a slope change at consecutive nonzero slopes i -> j brackets the flat
    # tract x[i+1 .. j]; its midpoint is the extremum index
    mid = (nz[:-1] + 1 + nz[1:]) // 2
    maxima = mid[(s[:-1] > 0) & (s[1:] < 0)]
    minima = mid[(s[:-1] < 0) & (s[1:] > 0)]
    return maxima.astype(np.intp), minima.astype(np.intp)


def _envelope(idx: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cubic-spline envelope through the extrema at idx, mirror-extended
    two knots past each end point."""
    n = len(x)
    left_t = -idx[:2][::-1]
    right_t = 2 * (n - 1) - idx[-2:][::-1]
    knots_t = np.concatenate([left_t, idx, right_t]).astype(float)
    knots_v = np.concatenate([x[idx[:2][::-1]], x[idx], x[idx[-2:][::-1]]])
    knots_t, keep = np.unique(knots_t, return_index=True)
    knots_v = knots_v[keep]
    grid = np.arange(n, dtype=float)
    if len(knots_t) < 4:
        return np.interp(grid, knots_t, knots_v)
    return CubicSpline(knots_t, knots_v)(grid)


def _sift_once(h: np.ndarray) -> np.ndarray | None:
    """One sifting pass: subtract the envelope mean. None if h has fewer
    than two extrema of either kind."""
    maxima, minima = local_extrema(h)
    if len(maxima) < 2 or len(minima) < 2:
        return None
    upper = _envelope(maxima, h)
    lower = _envelope(minima, h)
    return h - 0.5 * (upper + lower)


def emd(signal: np.ndarray, max_imfs: int = 10,
        sift_tol: float = 0.2) -> tuple[list[np.ndarray], np.ndarray]:
    """Decompose a signal into IMFs and a residual.

    Returns (imfs, residual) with sum(imfs) + residual reconstructing the
    input to floating-point accuracy. Raises SiftDiverged if a pass fails
    to converge within the iteration cap.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1 or len(signal) < MIN_SIGNAL_LEN:
        raise ValueError(f"need a 1-d signal of length >= {MIN_SIGNAL_LEN}")
    if not np.all(np.isfinite(signal)):
        raise ValueError("signal must be finite")

    imfs: list[np.ndarray] = []
    residual = signal.copy()
    while len(imfs) < max_imfs:
        h = _sift_once(residual)
        if h is None:  # residual is monotone-like, stop decomposing
            break
        for _ in range(_MAX_SIFT_ITER):
            prev = h
            h = _sift_once(prev)
            if h is None:
                h = prev  # cannot sift further; accept as the IMF
                break
            denom = float(np.sum(prev * prev))
            if denom == 0.0:
                break
            sd = float(np.sum((prev - h) ** 2)) / denom
            if sd < sift_tol:
                break
        else:
            raise SiftDiverged(
                f"sifting did not converge in {_MAX_SIFT_ITER} iterations")
        imfs.append(h)
        residual = residual - h
    return imfs, residual
