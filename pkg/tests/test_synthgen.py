from __future__ import annotations

import math

import numpy as np
import pytest

from evrange import (
    CameraState,
    FormatError,
    GroundTruth,
    OpticalConfig,
    ProjectionError,
    ScenarioConfig,
    SensorGeometry,
    build_led_bar,
    generate,
    project,
    read_truth_csv,
    write_truth_csv,
)
from evrange.synthgen import _transition_schedule

OPTICS = OpticalConfig(focal_length_m=0.035, pixel_pitch_m=4.86e-6, baseline_m=0.95)
GEOM = SensorGeometry(1280, 720)
FREQS = (5000.0, 10000.0, 20000.0, 10000.0, 5000.0)


def scenario(**kw):
    bar = kw.pop("led_positions", build_led_bar())
    freqs = kw.pop("blink_freqs_hz", FREQS * (len(bar) // len(FREQS)))
    base = dict(
        optics=OPTICS,
        geometry=GEOM,
        led_positions=bar,
        blink_freqs_hz=freqs,
        initial_distance_m=25.0,
        speed_mps=0.0,
        duration_s=0.009,
        noise_rate_eps=0.0,
        seed=42,
    )
    base.update(kw)
    return ScenarioConfig(**base)


# ---------------------------------------------------------------- projection


def test_project_axis_point_hits_grid_center():
    u, v = project((0.0, 0.0, 0.0), CameraState(z_m=25.0), OPTICS, GEOM)
    assert u == pytest.approx((1280 - 1) / 2)
    assert v == pytest.approx((720 - 1) / 2)


def test_project_group_separation_at_30m():
    cam = CameraState(z_m=30.0)
    _, v_up = project((0.0, -0.475, 0.0), cam, OPTICS, GEOM)
    _, v_lo = project((0.0, +0.475, 0.0), cam, OPTICS, GEOM)
    assert v_lo - v_up == pytest.approx(228.052126, abs=1e-4)


def test_project_halving_distance_doubles_offset():
    p = (0.1, -0.3, 0.0)
    u40, v40 = project(p, CameraState(z_m=40.0), OPTICS, GEOM)
    u20, v20 = project(p, CameraState(z_m=20.0), OPTICS, GEOM)
    cx, cy = (1280 - 1) / 2, (720 - 1) / 2
    assert u20 - cx == pytest.approx(2 * (u40 - cx), rel=1e-12)
    assert v20 - cy == pytest.approx(2 * (v40 - cy), rel=1e-12)


def test_project_behind_camera_raises():
    with pytest.raises(ProjectionError):
        project((0.0, 0.0, 0.0), CameraState(z_m=-1.0), OPTICS, GEOM)
    with pytest.raises(ProjectionError):
        project((0.0, 0.0, -5.0), CameraState(z_m=5.0), OPTICS, GEOM)


def test_project_vibration_moves_rows_only():
    a = project((0.0, 0.1, 0.0), CameraState(z_m=25.0), OPTICS, GEOM)
    b = project((0.0, 0.1, 0.0), CameraState(z_m=25.0, vibration_px=2.5), OPTICS, GEOM)
    assert b[0] == a[0]
    assert b[1] == a[1] + 2.5


def test_project_lateral_moves_columns_only():
    a = project((0.0, 0.1, 0.0), CameraState(z_m=25.0), OPTICS, GEOM)
    b = project((0.0, 0.1, 0.0), CameraState(z_m=25.0, lateral_m=0.5), OPTICS, GEOM)
    assert b[1] == a[1]
    assert b[0] == pytest.approx(a[0] + 0.5 * 0.035 / (25.0 * 4.86e-6), rel=1e-12)


# ---------------------------------------------------------------- led bar


def test_bar_centroids_sit_baseline_apart():
    bar = np.array(build_led_bar(baseline_m=0.95, led_pitch_m=0.01, leds_per_group=5))
    assert bar.shape == (10, 3)
    upper = bar[bar[:, 1] < 0]
    lower = bar[bar[:, 1] > 0]
    assert len(upper) == len(lower) == 5
    assert lower[:, 1].mean() - upper[:, 1].mean() == pytest.approx(0.95, rel=1e-12)


def test_bar_pitch_spacing():
    bar = np.array(build_led_bar(led_pitch_m=0.02, leds_per_group=3))
    ys = np.sort(bar[bar[:, 1] < 0][:, 1])
    assert np.allclose(np.diff(ys), 0.02)


def test_bar_single_group_variants():
    up = np.array(build_led_bar(groups="upper"))
    lo = np.array(build_led_bar(groups="lower"))
    assert len(up) == len(lo) == 5
    assert np.all(up[:, 1] < 0)
    assert np.all(lo[:, 1] > 0)
    with pytest.raises(ValueError):
        build_led_bar(groups="middle")


# ---------------------------------------------------------------- schedule


def test_transition_schedule_square_wave():
    cfg = scenario(led_positions=((0.0, 0.0, 0.0),), blink_freqs_hz=(5000.0,))
    t, led, pol = _transition_schedule(cfg, 1000.0)
    # 5 kHz: half period 100 us, transitions at 100..1000.
    assert np.allclose(t, np.arange(1, 11) * 100.0)
    assert np.all(led == 0)
    # LED starts ON: first transition is OFF (negative), then alternating.
    assert pol.tolist() == [0, 1, 0, 1, 0, 1, 0, 1, 0, 1]


def test_transition_schedule_merges_leds_in_time_order():
    cfg = scenario(
        led_positions=((0.0, 0.0, 0.0), (0.0, 0.1, 0.0)),
        blink_freqs_hz=(5000.0, 2500.0),
    )
    t, led, pol = _transition_schedule(cfg, 600.0)
    assert np.all(np.diff(t) >= 0)
    assert t.tolist() == [100.0, 200.0, 200.0, 300.0, 400.0, 400.0, 500.0, 600.0, 600.0]
    # Equal times keep LED order stable (LED 0 before LED 1).
    assert led.tolist() == [0, 0, 1, 0, 0, 1, 0, 0, 1]


def test_transition_schedule_too_slow_led_is_silent():
    cfg = scenario(led_positions=((0.0, 0.0, 0.0),), blink_freqs_hz=(100.0,))
    t, led, pol = _transition_schedule(cfg, 1000.0)  # half period 5000 us
    assert len(t) == 0


# ---------------------------------------------------------------- generate


def test_generate_stream_invariants():
    stream, truth = generate(scenario(noise_rate_eps=1.0e6))
    assert len(stream) > 0
    assert np.all(np.diff(stream.t.astype(np.int64)) >= 0)
    assert stream.t.max() <= 9000 - 1
    assert stream.x.max() < 1280 and stream.y.max() < 720
    assert set(np.unique(stream.p)) <= {0, 1}
    assert len(truth) == 3


def test_generate_is_seed_deterministic():
    s1, t1 = generate(scenario(noise_rate_eps=1.0e6, seed=7))
    s2, t2 = generate(scenario(noise_rate_eps=1.0e6, seed=7))
    s3, _ = generate(scenario(noise_rate_eps=1.0e6, seed=8))
    assert np.array_equal(s1.x, s2.x) and np.array_equal(s1.y, s2.y)
    assert np.array_equal(s1.t, s2.t) and np.array_equal(s1.p, s2.p)
    assert np.array_equal(t1.true_distance_m, t2.true_distance_m)
    assert not (len(s1) == len(s3) and np.array_equal(s1.t, s3.t))


def test_generate_event_count_matches_poisson_expectation():
    # One LED, no noise: the total count is Poisson with mean
    # n_transitions * events_per_edge * sum of the stencil weights
    # (= 2 pi sigma^2 for any fractional center at sigma 1.2).
    cfg = scenario(
        led_positions=((0.0, 0.0, 0.0),),
        blink_freqs_hz=(10000.0,),
        duration_s=0.05,
        seed=101,
    )
    stream, _ = generate(cfg)
    n_tr = 1000  # floor(50000 us / 50 us)
    mean = n_tr * 1.0 * 2 * math.pi * 1.2**2
    assert abs(len(stream) - mean) <= 4 * math.sqrt(mean)
    n_pos = int(np.sum(stream.p == 1))
    n_neg = len(stream) - n_pos
    assert abs(n_pos - n_neg) <= 4 * math.sqrt(mean)


def test_generate_scales_with_events_per_edge():
    base = scenario(
        led_positions=((0.0, 0.0, 0.0),), blink_freqs_hz=(10000.0,), duration_s=0.05
    )
    dense = scenario(
        led_positions=((0.0, 0.0, 0.0),),
        blink_freqs_hz=(10000.0,),
        duration_s=0.05,
        events_per_edge=4.0,
    )
    n1, _ = generate(base)
    n4, _ = generate(dense)
    assert len(n4) / len(n1) == pytest.approx(4.0, rel=0.1)


def test_generate_jitter_stays_near_transition_grid():
    cfg = scenario(
        led_positions=((0.0, 0.0, 0.0),),
        blink_freqs_hz=(2500.0,),  # half period 200 us
        duration_s=0.05,
        jitter_us=50,
    )
    stream, _ = generate(cfg)
    t = stream.t.astype(np.float64)
    dist = np.abs(t - 200.0 * np.rint(t / 200.0))
    assert np.max(dist) <= 50.0


def test_generate_drops_out_of_frame_stencil_cells():
    # An LED projecting 2.5 px from the right edge loses part of its
    # stencil; survivors must stay in bounds (construction validates).
    geom = SensorGeometry(64, 64)
    cfg = scenario(
        geometry=geom,
        led_positions=((0.125, 0.0, 0.0),),
        blink_freqs_hz=(10000.0,),
        initial_distance_m=30.0,
        duration_s=0.01,
    )
    u = 0.125 * 0.035 / (30.0 * 4.86e-6) + (64 - 1) / 2  # ~= 61.5
    assert 58 < u < 64
    stream, _ = generate(cfg)
    assert len(stream) > 0
    assert stream.x.max() <= 63


def test_generate_noise_only_scene():
    cfg = scenario(
        led_positions=(),
        blink_freqs_hz=(),
        noise_rate_eps=2.0e5,
        duration_s=0.01,
        seed=3,
    )
    stream, truth = generate(cfg)
    assert abs(len(stream) - 2000) <= 4 * math.sqrt(2000)
    assert len(truth) == 4
    assert np.all(np.isnan(truth.true_sep_px))
    assert np.all(truth.in_view)


def test_generate_empty_scene():
    cfg = scenario(led_positions=(), blink_freqs_hz=(), noise_rate_eps=0.0)
    stream, truth = generate(cfg)
    assert len(stream) == 0
    assert len(truth) == 3


def test_generate_rejects_trajectory_through_camera():
    cfg = scenario(initial_distance_m=1.0, speed_mps=-30.0, duration_s=0.2)
    with pytest.raises(ProjectionError):
        generate(cfg)


# ---------------------------------------------------------------- ground truth


def test_truth_stationary_values():
    _, truth = generate(scenario())
    assert truth.window_start_us.tolist() == [0, 3000, 6000]
    assert np.allclose(truth.true_distance_m, 25.0)
    assert np.allclose(truth.true_sep_px, 273.662551, atol=1e-4)
    assert np.all(truth.in_view)


def test_truth_moving_pass_arithmetic():
    cfg = scenario(initial_distance_m=20.0, speed_mps=5.56, duration_s=0.03)
    _, truth = generate(cfg)
    mid_s = (truth.window_start_us.astype(np.float64) + 1500.0) * 1e-6
    assert np.allclose(truth.true_distance_m, 20.0 + 5.56 * mid_s, rtol=1e-12)
    assert np.all(np.diff(truth.true_distance_m) > 0)
    assert np.all(np.diff(truth.true_sep_px) < 0)


def test_truth_sep_matches_centroid_projection():
    cfg = scenario(
        initial_distance_m=22.0,
        speed_mps=3.0,
        duration_s=0.012,
        vibration_amplitude_px=2.0,
        vibration_rate_px_per_ms=1.0,
        lateral_offset_m=0.4,
    )
    _, truth = generate(cfg)
    bar = np.array(cfg.led_positions)
    for i, start in enumerate(truth.window_start_us):
        z = truth.true_distance_m[i]
        cam = CameraState(z_m=z, lateral_m=0.4)
        v_up = np.mean([project(tuple(p), cam, OPTICS, GEOM)[1] for p in bar[bar[:, 1] < 0]])
        v_lo = np.mean([project(tuple(p), cam, OPTICS, GEOM)[1] for p in bar[bar[:, 1] > 0]])
        assert truth.true_sep_px[i] == pytest.approx(v_lo - v_up, rel=1e-9)


def test_truth_in_view_transition():
    # At 8 m the 855 px separation overflows the 720-row frame; the flag
    # must flip to in-view as the bar recedes past ~10 m.
    cfg = scenario(
        led_positions=build_led_bar(),
        blink_freqs_hz=(500.0,) * 10,
        initial_distance_m=8.0,
        speed_mps=5.56,
        duration_s=0.6,
    )
    _, truth = generate(cfg)
    assert not truth.in_view[0]
    assert truth.in_view[-1]
    flips = np.flatnonzero(np.diff(truth.in_view.astype(np.int8)))
    assert len(flips) == 1


def test_truth_out_of_view_laterally():
    cfg = scenario(lateral_offset_m=10.0)
    _, truth = generate(cfg)
    assert not np.any(truth.in_view)


# ---------------------------------------------------------------- truth csv


def test_truth_csv_exact_lines(tmp_path):
    truth = GroundTruth(
        np.array([0, 3000], dtype=np.uint64),
        np.array([25.0, 25.00834]),
        np.array([273.662551, float("nan")]),
        np.array([True, False]),
    )
    p = tmp_path / "truth.csv"
    write_truth_csv(truth, p)
    assert p.read_text() == (
        "window_start_us,true_distance_m,true_sep_px,in_view\n"
        "0,25.000000,273.662551,1\n"
        "3000,25.008340,nan,0\n"
    )


def test_truth_csv_roundtrip(tmp_path):
    _, truth = generate(scenario(initial_distance_m=20.0, speed_mps=5.56, duration_s=0.03))
    p = tmp_path / "truth.csv"
    write_truth_csv(truth, p)
    back = read_truth_csv(p)
    assert back.window_start_us.tolist() == truth.window_start_us.tolist()
    assert np.allclose(back.true_distance_m, truth.true_distance_m, atol=5e-7)
    assert np.allclose(back.true_sep_px, truth.true_sep_px, atol=5e-7)
    assert np.array_equal(back.in_view, truth.in_view)


def test_truth_csv_rejects_bad_header(tmp_path):
    p = tmp_path / "truth.csv"
    p.write_text("nope\n")
    with pytest.raises(FormatError, match="line 1"):
        read_truth_csv(p)


def test_truth_csv_rejects_short_record(tmp_path):
    p = tmp_path / "truth.csv"
    p.write_text("window_start_us,true_distance_m,true_sep_px,in_view\n0,1.0\n")
    with pytest.raises(FormatError, match="line 2"):
        read_truth_csv(p)


def test_truth_csv_rejects_bad_field(tmp_path):
    p = tmp_path / "truth.csv"
    p.write_text("window_start_us,true_distance_m,true_sep_px,in_view\n0,x,1.0,1\n")
    with pytest.raises(FormatError, match="line 2"):
        read_truth_csv(p)
