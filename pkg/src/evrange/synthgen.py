"""Synthetic drive-by scenario generator with per-window ground truth.

Geometry: the camera sits at the origin looking along +z; the LED bar lives
in a bar-local frame (x right, y down, z forward, origin midway between the
two group centroids) placed at distance z(t) = initial + speed * t and a
fixed lateral offset. The top group is centered at y = -baseline/2, the
bottom at +baseline/2, so the centroid separation equals the baseline by
construction.

Emission: each LED blinks as a square wave starting ON at t = 0. Every
transition sprays events over the point spread: a pixel at distance r from
the projected center receives Poisson(events_per_edge * exp(-r^2 / 2 sigma^2))
events, all with the transition's polarity, each timestamp jittered
uniformly within +-jitter_us. Background noise is uniform in space and time
with random polarity. A seeded generator makes the whole stream
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ProjectionError
from .events import EventStream, SensorGeometry
from .ranging import OpticalConfig

TRUTH_CSV_HEADER = "window_start_us,true_distance_m,true_sep_px,in_view"

_CHUNK_TRANSITIONS = 50_000


@dataclass(frozen=True)
class CameraState:
    """Camera-relative bar placement at one instant: bar plane distance
    along the axis, lateral offset, and the vibration image offset."""

    z_m: float
    lateral_m: float = 0.0
    vibration_px: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    optics: OpticalConfig
    geometry: SensorGeometry
    led_positions: tuple[tuple[float, float, float], ...]
    blink_freqs_hz: tuple[float, ...]
    initial_distance_m: float
    speed_mps: float
    duration_s: float
    lateral_offset_m: float = 0.0
    vibration_amplitude_px: float = 0.0
    vibration_rate_px_per_ms: float = 0.0
    noise_rate_eps: float = 0.0
    psf_sigma_px: float = 1.2
    events_per_edge: float = 1.0
    jitter_us: int = 50
    truth_window_us: int = 3000
    seed: int = 0

    def __post_init__(self):
        if len(self.led_positions) != len(self.blink_freqs_hz):
            raise ValueError(
                f"{len(self.led_positions)} LED positions but "
                f"{len(self.blink_freqs_hz)} blink frequencies"
            )
        if self.duration_s <= 0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s}")
        if self.initial_distance_m <= 0:
            raise ValueError(f"initial_distance_m must be positive, got {self.initial_distance_m}")
        if any(f <= 0 for f in self.blink_freqs_hz):
            raise ValueError("blink frequencies must be positive")
        if self.psf_sigma_px <= 0:
            raise ValueError(f"psf_sigma_px must be positive, got {self.psf_sigma_px}")


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Per-window truth at window midpoints."""

    window_start_us: np.ndarray
    true_distance_m: np.ndarray
    true_sep_px: np.ndarray
    in_view: np.ndarray

    def __len__(self) -> int:
        return len(self.window_start_us)


def build_led_bar(
    baseline_m: float = 0.95,
    led_pitch_m: float = 0.01,
    leds_per_group: int = 5,
    groups: str = "both",
) -> tuple[tuple[float, float, float], ...]:
    """Bar-local LED positions for two vertical groups of equally spaced
    LEDs whose centroids sit exactly baseline_m apart. groups selects
    'both', 'upper', or 'lower' (for degenerate test scenes)."""
    if groups not in ("both", "upper", "lower"):
        raise ValueError(f"groups must be both/upper/lower, got {groups!r}")
    offsets = [(i - (leds_per_group - 1) / 2) * led_pitch_m for i in range(leds_per_group)]
    upper = [(0.0, -baseline_m / 2 + o, 0.0) for o in offsets]
    lower = [(0.0, +baseline_m / 2 + o, 0.0) for o in offsets]
    if groups == "upper":
        return tuple(upper)
    if groups == "lower":
        return tuple(lower)
    return tuple(upper + lower)


def project(
    point: tuple[float, float, float],
    cam: CameraState,
    optics: OpticalConfig,
    geometry: SensorGeometry,
) -> tuple[float, float]:
    """Pinhole projection of a bar-local point to fractional pixels.

    Principal point at the pixel-grid center. Vibration enters as a
    vertical image offset.
    """
    z = point[2] + cam.z_m
    if z <= 0:
        raise ProjectionError(f"point at z={z:.3f} m is at or behind the camera plane")
    scale = optics.focal_length_m / (z * optics.pixel_pitch_m)
    u = (point[0] + cam.lateral_m) * scale + (geometry.width - 1) / 2
    v = point[1] * scale + (geometry.height - 1) / 2 + cam.vibration_px
    return u, v


def _vibration_offsets(cfg: ScenarioConfig, t_us: np.ndarray) -> np.ndarray:
    a = cfg.vibration_amplitude_px
    if a <= 0 or cfg.vibration_rate_px_per_ms <= 0:
        return np.zeros_like(t_us, dtype=np.float64)
    # rate is the max slope A*omega in px/ms; convert to rad/us.
    omega = cfg.vibration_rate_px_per_ms / a / 1000.0
    return a * np.sin(omega * t_us)


def _transition_schedule(cfg: ScenarioConfig, duration_us: float):
    """All LED transitions in time order: (t_us float, led index, polarity)."""
    ts, leds, pols = [], [], []
    for i, f in enumerate(cfg.blink_freqs_hz):
        half_us = 5.0e5 / f
        n = int(math.floor(duration_us / half_us))
        if n < 1:
            continue
        k = np.arange(1, n + 1)
        ts.append(k * half_us)
        leds.append(np.full(n, i, dtype=np.int32))
        # LED starts ON; odd transitions turn it OFF (negative polarity).
        pols.append((k % 2 == 0).astype(np.uint8))
    if not ts:
        return (np.empty(0), np.empty(0, np.int32), np.empty(0, np.uint8))
    t = np.concatenate(ts)
    led = np.concatenate(leds)
    pol = np.concatenate(pols)
    order = np.argsort(t, kind="stable")
    return t[order], led[order], pol[order]


def generate(cfg: ScenarioConfig) -> tuple[EventStream, GroundTruth]:
    """Render the scenario into an event stream plus per-window truth."""
    rng = np.random.default_rng(cfg.seed)
    duration_us = cfg.duration_s * 1.0e6
    geom = cfg.geometry

    led_pos = np.asarray(cfg.led_positions, dtype=np.float64).reshape(-1, 3)
    t_tr, led_tr, pol_tr = _transition_schedule(cfg, duration_us)

    sigma = cfg.psf_sigma_px
    radius = int(math.ceil(4.5 * sigma))
    span = np.arange(-radius, radius + 1)
    du = np.tile(span, 2 * radius + 1)
    dv = np.repeat(span, 2 * radius + 1)

    cx = (geom.width - 1) / 2
    cy = (geom.height - 1) / 2

    xs_parts, ys_parts, ts_parts, ps_parts = [], [], [], []
    for lo in range(0, len(t_tr), _CHUNK_TRANSITIONS):
        hi = min(lo + _CHUNK_TRANSITIONS, len(t_tr))
        t_c = t_tr[lo:hi]
        led_c = led_tr[lo:hi]
        pol_c = pol_tr[lo:hi]

        z = cfg.initial_distance_m + cfg.speed_mps * (t_c * 1e-6) + led_pos[led_c, 2]
        if np.any(z <= 0):
            raise ProjectionError("trajectory reaches the camera plane during the scenario")
        scale = cfg.optics.focal_length_m / (z * cfg.optics.pixel_pitch_m)
        u = (led_pos[led_c, 0] + cfg.lateral_offset_m) * scale + cx
        v = led_pos[led_c, 1] * scale + cy + _vibration_offsets(cfg, t_c)

        # Stencil cells around each rounded center; expectation decays with
        # the true distance from the fractional center.
        iu = np.rint(u)[:, None] + du[None, :]
        iv = np.rint(v)[:, None] + dv[None, :]
        r2 = (iu - u[:, None]) ** 2 + (iv - v[:, None]) ** 2
        lam = cfg.events_per_edge * np.exp(-r2 / (2.0 * sigma * sigma))
        counts = rng.poisson(lam)

        flat = counts.ravel()
        nz = np.flatnonzero(flat)
        if nz.size == 0:
            continue
        reps = flat[nz]
        ev_x = np.repeat(iu.ravel()[nz], reps)
        ev_y = np.repeat(iv.ravel()[nz], reps)
        tr_idx = nz // counts.shape[1]
        ev_t = np.repeat(t_c[tr_idx], reps)
        ev_p = np.repeat(pol_c[tr_idx], reps)

        ev_t = ev_t + rng.uniform(-cfg.jitter_us, cfg.jitter_us, size=len(ev_t))
        inb = (ev_x >= 0) & (ev_x < geom.width) & (ev_y >= 0) & (ev_y < geom.height)
        xs_parts.append(ev_x[inb].astype(np.uint16))
        ys_parts.append(ev_y[inb].astype(np.uint16))
        ts_parts.append(np.clip(np.rint(ev_t[inb]), 0, duration_us - 1).astype(np.uint64))
        ps_parts.append(ev_p[inb])

    if cfg.noise_rate_eps > 0:
        n_noise = rng.poisson(cfg.noise_rate_eps * cfg.duration_s)
        xs_parts.append(rng.integers(0, geom.width, n_noise).astype(np.uint16))
        ys_parts.append(rng.integers(0, geom.height, n_noise).astype(np.uint16))
        ts_parts.append(rng.integers(0, int(duration_us), n_noise).astype(np.uint64))
        ps_parts.append(rng.integers(0, 2, n_noise).astype(np.uint8))

    if xs_parts:
        x = np.concatenate(xs_parts)
        y = np.concatenate(ys_parts)
        t = np.concatenate(ts_parts)
        p = np.concatenate(ps_parts)
        order = np.argsort(t, kind="stable")
        stream = EventStream(geom, x[order], y[order], t[order], p[order])
    else:
        stream = EventStream.empty(geom)

    return stream, _ground_truth(cfg, duration_us)


def _ground_truth(cfg: ScenarioConfig, duration_us: float) -> GroundTruth:
    n_win = int(math.ceil(duration_us / cfg.truth_window_us))
    starts = np.arange(n_win, dtype=np.uint64) * np.uint64(cfg.truth_window_us)
    t_mid = starts.astype(np.float64) + cfg.truth_window_us / 2

    led_pos = np.asarray(cfg.led_positions, dtype=np.float64).reshape(-1, 3)
    z_mid = cfg.initial_distance_m + cfg.speed_mps * (t_mid * 1e-6)
    vib = _vibration_offsets(cfg, t_mid)
    cx = (cfg.geometry.width - 1) / 2
    cy = (cfg.geometry.height - 1) / 2

    # (led, window) projection of every LED center at each window midpoint.
    z_all = z_mid[None, :] + led_pos[:, 2, None]
    scale = cfg.optics.focal_length_m / (z_all * cfg.optics.pixel_pitch_m)
    u_all = (led_pos[:, 0, None] + cfg.lateral_offset_m) * scale + cx
    v_all = led_pos[:, 1, None] * scale + cy + vib[None, :]
    in_view = (
        (u_all >= 0) & (u_all <= cfg.geometry.width - 1)
        & (v_all >= 0) & (v_all <= cfg.geometry.height - 1)
    ).all(axis=0)

    upper_sel = led_pos[:, 1] < 0
    lower_sel = led_pos[:, 1] > 0
    if upper_sel.any() and lower_sel.any():
        sep = v_all[lower_sel].mean(axis=0) - v_all[upper_sel].mean(axis=0)
    else:
        sep = np.full(n_win, np.nan)

    return GroundTruth(starts, z_mid, sep, in_view)


def write_truth_csv(truth: GroundTruth, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(TRUTH_CSV_HEADER + "\n")
        for i in range(len(truth)):
            f.write(
                f"{int(truth.window_start_us[i])},{truth.true_distance_m[i]:.6f},"
                f"{truth.true_sep_px[i]:.6f},{int(truth.in_view[i])}\n"
            )


def read_truth_csv(path) -> GroundTruth:
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().strip()
        if header != TRUTH_CSV_HEADER:
            raise FormatError(f"expected header {TRUTH_CSV_HEADER!r}, got {header!r}", line=1)
        starts, dists, seps, views = [], [], [], []
        for lineno, line in enumerate(f, start=2):
            fields = line.strip().split(",")
            if len(fields) != 4:
                raise FormatError(f"expected 4 fields, got {len(fields)}", line=lineno)
            try:
                starts.append(int(fields[0]))
                dists.append(float(fields[1]))
                seps.append(float(fields[2]))
                views.append(bool(int(fields[3])))
            except ValueError as exc:
                raise FormatError(f"malformed truth record: {exc}", line=lineno) from None
    return GroundTruth(
        np.array(starts, dtype=np.uint64),
        np.array(dists),
        np.array(seps),
        np.array(views, dtype=bool),
    )
