"""Vertical separation of a frame into upper and lower LED groups.

The boundary is the count-weighted mean row of the whole frame. Each half
keeps the full ROI dimensions with the other side zeroed, so both halves
stay aligned for correlation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accumulation import CountFrame
from .errors import SeparationError

# Minimum believable distance between group centroids. Real group
# separations exceed 100 px over the whole ranging envelope; splitting a
# single blob at its own centroid yields under ~10 px, so this guard turns
# one-visible-group frames into a separation failure instead of a bogus
# short-baseline measurement.
DEFAULT_MIN_SEP_PX = 16.0


@dataclass(frozen=True, eq=False)
class SplitFrames:
    """Upper and lower halves of one ROI frame plus the boundary row used."""

    upper: CountFrame
    lower: CountFrame
    boundary_y: float


def weighted_y(frame: CountFrame) -> float:
    """Count-weighted mean row in full-sensor coordinates.

    Integer frames are reduced with integer arithmetic so the result is
    exactly invariant under scaling every count by the same factor.
    """
    counts = frame.counts
    rows = np.arange(frame.height, dtype=np.int64) + frame.origin[1]
    if counts.dtype.kind in "iu":
        row_mass = counts.sum(axis=1, dtype=np.int64)
        total = int(row_mass.sum())
        if total == 0:
            raise SeparationError("frame has no mass")
        num = int((row_mass * rows).sum())
        return num / total
    row_mass = counts.sum(axis=1, dtype=np.float64)
    total = float(row_mass.sum())
    if total == 0.0:
        raise SeparationError("frame has no mass")
    return float((row_mass * rows).sum() / total)


def split(frame: CountFrame, min_sep_px: float = DEFAULT_MIN_SEP_PX) -> SplitFrames:
    """Split at the weighted mean row; ties go to the lower half.

    Fails if either half is empty or the half centroids are closer than
    min_sep_px, both signs that two distinct groups are not visible.
    """
    boundary = weighted_y(frame)
    local_rows = np.arange(frame.height) + frame.origin[1]
    upper_mask = local_rows < boundary

    upper_counts = frame.counts.copy()
    upper_counts[~upper_mask, :] = 0
    lower_counts = frame.counts.copy()
    lower_counts[upper_mask, :] = 0

    upper = CountFrame(upper_counts, frame.window_start_us, frame.window_len_us, frame.origin)
    lower = CountFrame(lower_counts, frame.window_start_us, frame.window_len_us, frame.origin)

    if not upper_counts.any() or not lower_counts.any():
        side = "below" if not upper_counts.any() else "above"
        raise SeparationError(f"all mass on one side of boundary {boundary:.2f} ({side})")

    gap = weighted_y(lower) - weighted_y(upper)
    if gap < min_sep_px:
        raise SeparationError(
            f"group centroids only {gap:.2f} px apart (min {min_sep_px:g}); "
            "two distinct groups not visible"
        )
    return SplitFrames(upper, lower, boundary)
