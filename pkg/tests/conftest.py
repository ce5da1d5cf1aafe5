from __future__ import annotations

import numpy as np
import pytest

from evrange import CountFrame, EventStream, SensorGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(20250817)


def make_stream(geometry: SensorGeometry, rows) -> EventStream:
    """Stream from (x, y, t_us, p) tuples."""
    rows = list(rows)
    if not rows:
        return EventStream.empty(geometry)
    x, y, t, p = zip(*rows)
    return EventStream(geometry, x, y, t, p)


def random_stream(rng, geometry: SensorGeometry, n: int, t_max: int = 100_000) -> EventStream:
    """Random in-bounds, time-ordered stream with plenty of pixel reuse."""
    x = rng.integers(0, geometry.width, n)
    y = rng.integers(0, geometry.height, n)
    t = np.sort(rng.integers(0, t_max, n))
    p = rng.integers(0, 2, n)
    return EventStream(geometry, x, y, t, p)


def gauss_counts(h: int, w: int, centers, sigma: float = 1.5, amp: float = 1000.0) -> np.ndarray:
    """Quantized Gaussian blobs, one per (row, col) center."""
    r = np.arange(h)[:, None]
    c = np.arange(w)[None, :]
    g = np.zeros((h, w))
    for r0, c0 in centers:
        g += amp * np.exp(-((r - r0) ** 2 + (c - c0) ** 2) / (2 * sigma**2))
    return np.round(g).astype(np.int64)


def frame_of(counts: np.ndarray, start_us: int = 0, window_us: int = 3000, origin=(0, 0)) -> CountFrame:
    return CountFrame(np.asarray(counts), start_us, window_us, origin)
