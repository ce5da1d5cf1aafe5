"""Triangulated distance from the measured group displacement.

With focal length f, group baseline S, pixel pitch a, and a measured
displacement of W pixels, similar triangles give the range L = f S / (W a).
estimate_stream runs the whole per-window pipeline and materializes one
estimate per window, failed windows included.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .accumulation import accumulate, crop_to_roi
from .errors import EmptyRoiError, FormatError, LowConfidenceError, SeparationError
from .events import EventStream
from .filtering import count_threshold, high_pass
from .poc import measure_displacement
from .separation import split

if TYPE_CHECKING:
    from .config import PipelineConfig

ESTIMATES_CSV_HEADER = "window_start_us,W_px,distance_m,peak,valid,reason"


@dataclass(frozen=True)
class OpticalConfig:
    """Physical constants of the setup: focal length, pixel pitch, and the
    vertical distance between the two LED group centroids, all in meters."""

    focal_length_m: float
    pixel_pitch_m: float
    baseline_m: float

    def __post_init__(self):
        for name in ("focal_length_m", "pixel_pitch_m", "baseline_m"):
            v = getattr(self, name)
            if not (v > 0):
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class RangeEstimate:
    """One window's outcome. Invalid estimates carry a reason token and NaN
    for whatever could not be measured."""

    window_start_us: int
    w_px: float
    distance_m: float
    peak_value: float
    valid: bool
    reason: str = ""


def triangulate(w_px: float, optics: OpticalConfig) -> float:
    """Range in meters for a displacement of w_px pixels."""
    if not (w_px > 0):
        raise ValueError(f"displacement must be positive, got {w_px}")
    return optics.focal_length_m * optics.baseline_m / (w_px * optics.pixel_pitch_m)


def estimate_stream(stream: EventStream, cfg: "PipelineConfig") -> list[RangeEstimate]:
    """Run high-pass, accumulation, separation, correlation, and
    triangulation over every window of the stream.

    Every window produces exactly one RangeEstimate; failures are recorded
    with a reason instead of being dropped. An empty stream yields [].
    """
    filtered = high_pass(stream, cfg.highpass)
    return [
        _estimate_window(frame, cfg)
        for frame in accumulate(filtered, cfg.window_us, cfg.polarity)
    ]


def _invalid(start_us: int, reason: str, peak: float = float("nan")) -> RangeEstimate:
    return RangeEstimate(start_us, float("nan"), float("nan"), peak, False, reason)


def _estimate_window(frame, cfg: "PipelineConfig") -> RangeEstimate:
    start = frame.window_start_us
    try:
        roi = crop_to_roi(count_threshold(frame, cfg.count_threshold), cfg.roi_margin_px)
        halves = split(roi, cfg.min_sep_px)
        poc = measure_displacement(halves, cfg.poc)
    except EmptyRoiError:
        return _invalid(start, "empty-window")
    except SeparationError:
        return _invalid(start, "separation-failure")
    except LowConfidenceError:
        return _invalid(start, "low-confidence")
    if poc.w_px <= 0:
        return _invalid(start, "zero-displacement", poc.peak_value)
    distance = triangulate(poc.w_px, cfg.optics)
    return RangeEstimate(start, poc.w_px, distance, poc.peak_value, True, "")


def write_estimates_csv(estimates: list[RangeEstimate], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(ESTIMATES_CSV_HEADER + "\n")
        for e in estimates:
            f.write(
                f"{e.window_start_us},{e.w_px:.4f},{e.distance_m:.4f},"
                f"{e.peak_value:.6f},{int(e.valid)},{e.reason}\n"
            )


def read_estimates_csv(path) -> list[RangeEstimate]:
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().strip()
        if header != ESTIMATES_CSV_HEADER:
            raise FormatError(f"expected header {ESTIMATES_CSV_HEADER!r}, got {header!r}", line=1)
        out = []
        for lineno, line in enumerate(f, start=2):
            fields = line.strip().split(",")
            if len(fields) != 6:
                raise FormatError(f"expected 6 fields, got {len(fields)}", line=lineno)
            try:
                out.append(
                    RangeEstimate(
                        window_start_us=int(fields[0]),
                        w_px=float(fields[1]),
                        distance_m=float(fields[2]),
                        peak_value=float(fields[3]),
                        valid=bool(int(fields[4])),
                        reason=fields[5],
                    )
                )
            except ValueError as exc:
                raise FormatError(f"malformed estimate record: {exc}", line=lineno) from None
    return out


def valid_fraction(estimates: list[RangeEstimate]) -> float:
    if not estimates:
        return 0.0
    return sum(e.valid for e in estimates) / len(estimates)


def distances(estimates: list[RangeEstimate]) -> np.ndarray:
    """Distance per window, NaN where invalid."""
    return np.array([e.distance_m if e.valid else np.nan for e in estimates])
