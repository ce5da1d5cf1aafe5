"""Event accumulation into fixed-width count frames, plus ROI cropping.

Windows are absolute: an event at time t lands in window floor(t / window_len).
Every window from 0 through the last populated one is emitted, empty or not,
so the frame index maps to wall time exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import EmptyRoiError
from .events import EventStream

DEFAULT_WINDOW_US = 3000
DEFAULT_ROI_MARGIN_PX = 4

POLARITY_MODES = ("both", "pos", "neg")


@dataclass(frozen=True, eq=False)
class CountFrame:
    """Per-pixel event counts over one time window.

    origin is the (x0, y0) of counts[0, 0] in full-sensor coordinates, so
    cropped frames keep their place on the sensor.
    """

    counts: np.ndarray
    window_start_us: int
    window_len_us: int
    origin: tuple[int, int] = (0, 0)

    @property
    def height(self) -> int:
        return self.counts.shape[0]

    @property
    def width(self) -> int:
        return self.counts.shape[1]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def accumulate(
    stream: EventStream,
    window_len_us: int = DEFAULT_WINDOW_US,
    polarity: str = "both",
) -> Iterator[CountFrame]:
    """Fold the stream into count frames, one per window, lazily.

    polarity selects which events are counted: 'both', 'pos', or 'neg'.
    An empty stream yields nothing.
    """
    if window_len_us <= 0:
        raise ValueError(f"window_len_us must be positive, got {window_len_us}")
    if polarity not in POLARITY_MODES:
        raise ValueError(f"polarity must be one of {POLARITY_MODES}, got {polarity!r}")
    if polarity == "both":
        x, y, t = stream.x, stream.y, stream.t
    else:
        want = 1 if polarity == "pos" else 0
        sel = stream.p == want
        x, y, t = stream.x[sel], stream.y[sel], stream.t[sel]
    if len(t) == 0:
        return
    w, h = stream.geometry.width, stream.geometry.height
    n_cells = w * h
    last_window = int(t[-1]) // window_len_us
    # Events are time ordered, so each window is a contiguous slice.
    bounds = np.searchsorted(
        t, np.arange(1, last_window + 2, dtype=np.uint64) * np.uint64(window_len_us), side="left"
    )
    start = 0
    for idx in range(last_window + 1):
        stop = int(bounds[idx])
        if stop > start:
            pix = y[start:stop].astype(np.intp) * w + x[start:stop].astype(np.intp)
            counts = np.bincount(pix, minlength=n_cells).astype(np.int32).reshape(h, w)
        else:
            counts = np.zeros((h, w), dtype=np.int32)
        yield CountFrame(counts, idx * window_len_us, window_len_us)
        start = stop


def crop_to_roi(frame: CountFrame, margin_px: int = DEFAULT_ROI_MARGIN_PX) -> CountFrame:
    """Crop to the bounding box of nonzero cells plus a margin.

    The margin is clamped at the frame edges. All-zero input has no ROI and
    raises EmptyRoiError.
    """
    if margin_px < 0:
        raise ValueError(f"margin_px must be non-negative, got {margin_px}")
    rows = np.flatnonzero(frame.counts.any(axis=1))
    if rows.size == 0:
        raise EmptyRoiError(f"window at {frame.window_start_us} us has no events")
    cols = np.flatnonzero(frame.counts.any(axis=0))
    r0 = max(int(rows[0]) - margin_px, 0)
    r1 = min(int(rows[-1]) + margin_px + 1, frame.height)
    c0 = max(int(cols[0]) - margin_px, 0)
    c1 = min(int(cols[-1]) + margin_px + 1, frame.width)
    return CountFrame(
        frame.counts[r0:r1, c0:c1],
        frame.window_start_us,
        frame.window_len_us,
        origin=(frame.origin[0] + c0, frame.origin[1] + r0),
    )


def frame_to_pgm(frame: CountFrame, path) -> None:
    """Debug dump as a 16-bit binary PGM, counts clamped to the pixel range."""
    clamped = np.clip(frame.counts, 0, 65535).astype(">u2")
    with open(path, "wb") as f:
        f.write(f"P5\n{frame.width} {frame.height}\n65535\n".encode("ascii"))
        clamped.tofile(f)
