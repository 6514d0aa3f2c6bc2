"""NumPy fallback for the counting kernels.

Both backends return integer counts; the float ratio math lives in the
callers, so results are bitwise identical whichever backend is active.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def apen_counts(x: np.ndarray, m: int, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Template match counts for approximate entropy.

    Returns (c_m, c_m1): for each template of length m (resp. m+1), the
    number of templates within Chebyshev distance r, self-match included.
    """
    x = np.ascontiguousarray(x, dtype=float)

    def counts(mm: int) -> np.ndarray:
        tpl = sliding_window_view(x, mm)
        d = np.abs(tpl[:, None, :] - tpl[None, :, :]).max(axis=2)
        return (d <= r).sum(axis=1).astype(np.int64)

    return counts(m), counts(m + 1)


def rqa_counts(x: np.ndarray, dim: int, delay: int, eps: float,
               l_min: int) -> tuple[int, int, int]:
    """Recurrence counts for RQA on a time-delay embedding.

    Returns (n_embedded, recurrent_points, diagonal_points): the number of
    embedded vectors M, the count of recurrent points off the main diagonal
    (pairs counted in both orders), and how many of those lie on diagonal
    runs of length >= l_min. Recurrence is squared Euclidean distance
    <= eps^2.
    """
    x = np.ascontiguousarray(x, dtype=float)
    n = len(x)
    M = n - (dim - 1) * delay
    emb = np.column_stack([x[k * delay:k * delay + M] for k in range(dim)])
    d2 = ((emb[:, None, :] - emb[None, :, :]) ** 2).sum(axis=2)
    rec = d2 <= eps * eps
    recurrent = int(rec.sum()) - M  # main diagonal is always recurrent
    diag_points = 0
    for k in range(1, M):
        diag = np.diagonal(rec, offset=k)
        padded = np.concatenate(([False], diag, [False])).astype(np.int8)
        edges = np.diff(padded)
        lengths = np.nonzero(edges == -1)[0] - np.nonzero(edges == 1)[0]
        diag_points += 2 * int(lengths[lengths >= l_min].sum())
    return M, recurrent, diag_points
