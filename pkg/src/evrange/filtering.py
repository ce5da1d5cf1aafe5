"""Event-rate filters: temporal high-pass on streams, count threshold on frames.

The high-pass kernel comes in two interchangeable implementations. The
compiled Cython extension is preferred; a vectorized numpy fallback loads
when the extension is absent or EVRANGE_PURE_PYTHON=1 is set. Both produce
identical masks.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import _highpass_py
from .accumulation import CountFrame
from .events import EventStream

log = logging.getLogger(__name__)

if os.environ.get("EVRANGE_PURE_PYTHON") == "1":
    _impl = _highpass_py
    HAVE_COMPILED = False
else:
    try:
        from . import _highpass as _impl  # type: ignore[no-redef]

        HAVE_COMPILED = True
    except ImportError:
        _impl = _highpass_py
        HAVE_COMPILED = False
        log.info("compiled high-pass kernel unavailable, using numpy fallback")

DEFAULT_CUTOFF_US = 2000
DEFAULT_MIN_COUNT = 2


def highpass_backend() -> str:
    """Name of the active kernel implementation."""
    return "compiled" if HAVE_COMPILED else "numpy"


@dataclass(frozen=True)
class HighPassConfig:
    """Temporal high-pass settings. cutoff_period_us is the survival window:
    only pixels re-triggered faster than this keep their events."""

    cutoff_period_us: int = DEFAULT_CUTOFF_US

    def __post_init__(self):
        if self.cutoff_period_us <= 0:
            raise ValueError(f"cutoff_period_us must be positive, got {self.cutoff_period_us}")


@dataclass(frozen=True)
class CountThresholdConfig:
    """Frame-level salt noise suppression: cells below min_count are zeroed."""

    min_count: int = DEFAULT_MIN_COUNT

    def __post_init__(self):
        if self.min_count < 0:
            raise ValueError(f"min_count must be non-negative, got {self.min_count}")


def high_pass(stream: EventStream, cfg: HighPassConfig = HighPassConfig()) -> EventStream:
    """Keep events whose pixel fired before, strictly within the cutoff window.

    The first event ever seen at a pixel never survives. Polarity plays no
    role. The result is an order-preserving subsequence of the input.
    """
    mask = highpass_mask(stream, cfg.cutoff_period_us)
    return stream.select(mask)


def highpass_mask(stream: EventStream, cutoff_period_us: int) -> np.ndarray:
    """Boolean survival mask for the stream, via the active kernel."""
    return _impl.highpass_mask(
        stream.x,
        stream.y,
        stream.t,
        int(cutoff_period_us),
        stream.geometry.width,
        stream.geometry.height,
    )


def count_threshold(frame: CountFrame, cfg: CountThresholdConfig = CountThresholdConfig()) -> CountFrame:
    """Zero out cells with fewer than min_count events. Idempotent."""
    out = frame.counts.copy()
    out[out < cfg.min_count] = 0
    return CountFrame(out, frame.window_start_us, frame.window_len_us, frame.origin)
