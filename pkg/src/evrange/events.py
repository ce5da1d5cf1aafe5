"""Core event types: sensor geometry, single events, and event streams.

An event stream is stored as a structure of arrays (x, y, t, p) because
every downstream stage is vectorized; the Event dataclass is a convenience
view for single records.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import GeometryError, OrderingError

# Polarity encoding used throughout: 1 = positive (brightness increase),
# 0 = negative. Files use the same encoding.
POSITIVE = 1
NEGATIVE = 0

DEFAULT_WIDTH = 1280
DEFAULT_HEIGHT = 720


@dataclass(frozen=True)
class SensorGeometry:
    """Sensor pixel grid dimensions."""

    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise GeometryError(f"sensor dimensions must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Event:
    """A single DVS event: pixel coordinates, microsecond timestamp, polarity."""

    x: int
    y: int
    t_us: int
    polarity: int


@dataclass(frozen=True, eq=False)
class EventStream:
    """Time-ordered event record, value semantics.

    Arrays are canonicalized to (uint16, uint16, uint64, uint8) and must be
    non-decreasing in t. Treat instances as immutable; stages return new
    streams rather than mutating.
    """

    geometry: SensorGeometry
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)

    def __init__(self, geometry: SensorGeometry, x, y, t, p, validate: bool = True):
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "x", np.ascontiguousarray(x, dtype=np.uint16))
        object.__setattr__(self, "y", np.ascontiguousarray(y, dtype=np.uint16))
        object.__setattr__(self, "t", np.ascontiguousarray(t, dtype=np.uint64))
        object.__setattr__(self, "p", np.ascontiguousarray(p, dtype=np.uint8))
        n = len(self.x)
        if not (len(self.y) == len(self.t) == len(self.p) == n):
            raise ValueError("event component arrays must have equal length")
        if validate:
            self._check()

    def _check(self) -> None:
        if len(self.x) == 0:
            return
        if np.any(self.x >= self.geometry.width) or np.any(self.y >= self.geometry.height):
            bad = int(np.argmax((self.x >= self.geometry.width) | (self.y >= self.geometry.height)))
            raise GeometryError(
                f"event {bad} at ({int(self.x[bad])}, {int(self.y[bad])}) outside "
                f"{self.geometry.width}x{self.geometry.height} sensor"
            )
        if np.any(self.t[1:] < self.t[:-1]):
            bad = int(np.argmax(self.t[1:] < self.t[:-1])) + 1
            raise OrderingError(
                f"timestamp regression at event {bad}: "
                f"t={int(self.t[bad])} after t={int(self.t[bad - 1])}"
            )
        if np.any(self.p > 1):
            bad = int(np.argmax(self.p > 1))
            raise ValueError(f"event {bad} has polarity {int(self.p[bad])}, expected 0 or 1")

    @classmethod
    def empty(cls, geometry: SensorGeometry) -> "EventStream":
        return cls(geometry, [], [], [], [], validate=False)

    @classmethod
    def from_events(cls, geometry: SensorGeometry, events) -> "EventStream":
        """Build a stream from an iterable of Event (small inputs, tests)."""
        evs = list(events)
        return cls(
            geometry,
            [e.x for e in evs],
            [e.y for e in evs],
            [e.t_us for e in evs],
            [e.polarity for e in evs],
        )

    def __len__(self) -> int:
        return len(self.x)

    def __getitem__(self, i: int) -> Event:
        return Event(int(self.x[i]), int(self.y[i]), int(self.t[i]), int(self.p[i]))

    def __iter__(self) -> Iterator[Event]:
        for i in range(len(self)):
            yield self[i]

    def select(self, mask_or_index) -> "EventStream":
        """Subsequence of the stream; preserves order, skips revalidation."""
        return EventStream(
            self.geometry,
            self.x[mask_or_index],
            self.y[mask_or_index],
            self.t[mask_or_index],
            self.p[mask_or_index],
            validate=False,
        )
