"""Vectorized numpy fallback for the temporal high-pass kernel.

Same contract as the compiled version: event i survives iff a prior event
hit the same pixel strictly inside (t_i - cutoff_us, t_i). Grouping by pixel
with a stable sort preserves time order inside each group; runs of equal
timestamps share the run head's predecessor, which is the latest strictly
earlier event of the pixel.
"""

from __future__ import annotations

import numpy as np


def highpass_mask(xs, ys, ts, cutoff_us: int, width: int, height: int) -> np.ndarray:
    n = len(ts)
    if n == 0:
        return np.zeros(0, dtype=bool)
    pix = ys.astype(np.int64) * width + xs.astype(np.int64)
    order = np.argsort(pix, kind="stable")
    ps = pix[order]
    t = ts[order].astype(np.int64)

    first_in_group = np.empty(n, dtype=bool)
    first_in_group[0] = True
    first_in_group[1:] = ps[1:] != ps[:-1]

    prev_t = np.empty(n, dtype=np.int64)
    prev_t[0] = 0
    prev_t[1:] = t[:-1]

    # Head of each run of equal (pixel, t); every member of a run shares the
    # head's predecessor as its latest strictly earlier event.
    run_head = first_in_group.copy()
    run_head[1:] |= t[1:] != t[:-1]
    head_idx = np.maximum.accumulate(np.where(run_head, np.arange(n), 0))

    has_strict_prev = ~first_in_group[head_idx]
    gap = t - prev_t[head_idx]
    keep_sorted = has_strict_prev & (gap < cutoff_us)

    keep = np.empty(n, dtype=bool)
    keep[order] = keep_sorted
    return keep
