"""Flat key=value config files for the pipeline and for scenarios.

Format: one ``key = value`` pair per line, ``#`` starts a comment, blank
lines are ignored, keys are dotted lowercase. Unknown or duplicate keys are
errors so typos fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .events import SensorGeometry
from .filtering import CountThresholdConfig, HighPassConfig
from .poc import PocConfig
from .ranging import OpticalConfig
from .separation import DEFAULT_MIN_SEP_PX
from .synthgen import ScenarioConfig, build_led_bar

BUNDLED_SCENARIOS = ("pass_20_60m_20kmh", "pass_20_55m_30kmh")


def parse_kv_file(path) -> dict[str, str]:
    """Raw key -> value strings from a config file."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or not key or not value:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            if key in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value
    return out


class _KeyReader:
    """Typed access over the raw dict, tracking which keys were consumed."""

    def __init__(self, raw: dict[str, str], source: str):
        self.raw = raw
        self.source = source
        self.used: set[str] = set()

    def _fetch(self, key: str, default):
        if key in self.raw:
            self.used.add(key)
            return self.raw[key]
        if default is _REQUIRED:
            raise ConfigError(f"{self.source}: missing required config key {key!r}")
        return default

    def get_float(self, key: str, default=None) -> float:
        v = self._fetch(key, default)
        if isinstance(v, str):
            try:
                return float(v)
            except ValueError:
                raise ConfigError(f"{self.source}: key {key!r} is not a number: {v!r}") from None
        return v

    def get_int(self, key: str, default=None) -> int:
        v = self._fetch(key, default)
        if isinstance(v, str):
            try:
                return int(v)
            except ValueError:
                raise ConfigError(f"{self.source}: key {key!r} is not an integer: {v!r}") from None
        return v

    def get_bool(self, key: str, default=None) -> bool:
        v = self._fetch(key, default)
        if isinstance(v, str):
            lowered = v.lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ConfigError(f"{self.source}: key {key!r} is not a boolean: {v!r}")
        return v

    def get_str(self, key: str, default=None) -> str:
        return self._fetch(key, default)

    def get_float_list(self, key: str, default=None) -> tuple[float, ...]:
        v = self._fetch(key, default)
        if isinstance(v, str):
            try:
                return tuple(float(part) for part in v.split(","))
            except ValueError:
                raise ConfigError(f"{self.source}: key {key!r} is not a number list: {v!r}") from None
        return v

    def finish(self) -> None:
        unknown = sorted(set(self.raw) - self.used)
        if unknown:
            raise ConfigError(f"{self.source}: unknown config keys: {', '.join(unknown)}")


_REQUIRED = object()


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the estimation pipeline needs for one run."""

    optics: OpticalConfig
    highpass: HighPassConfig = HighPassConfig()
    count_threshold: CountThresholdConfig = CountThresholdConfig()
    window_us: int = 3000
    polarity: str = "both"
    roi_margin_px: int = 4
    min_sep_px: float = DEFAULT_MIN_SEP_PX
    poc: PocConfig = PocConfig()


def load_pipeline_config(path) -> PipelineConfig:
    r = _KeyReader(parse_kv_file(path), str(path))
    try:
        optics = OpticalConfig(
            focal_length_m=r.get_float("optics.focal_length_m", _REQUIRED),
            pixel_pitch_m=r.get_float("optics.pixel_pitch_m", _REQUIRED),
            baseline_m=r.get_float("optics.baseline_m", _REQUIRED),
        )
        cfg = PipelineConfig(
            optics=optics,
            highpass=HighPassConfig(r.get_int("filter.highpass_cutoff_us", 2000)),
            count_threshold=CountThresholdConfig(r.get_int("filter.min_count", 2)),
            window_us=r.get_int("accumulate.window_us", 3000),
            polarity=r.get_str("accumulate.polarity", "both"),
            roi_margin_px=r.get_int("accumulate.roi_margin_px", 4),
            min_sep_px=r.get_float("separation.min_sep_px", DEFAULT_MIN_SEP_PX),
            poc=PocConfig(
                min_peak=r.get_float("poc.min_peak", 0.05),
                pad_pow2=r.get_bool("poc.pad_pow2", True),
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    r.finish()
    if cfg.polarity not in ("both", "pos", "neg"):
        raise ConfigError(f"{path}: accumulate.polarity must be both/pos/neg, got {cfg.polarity!r}")
    if cfg.window_us <= 0:
        raise ConfigError(f"{path}: accumulate.window_us must be positive")
    return cfg


def load_scenario_config(path) -> ScenarioConfig:
    r = _KeyReader(parse_kv_file(path), str(path))
    try:
        optics = OpticalConfig(
            focal_length_m=r.get_float("optics.focal_length_m", 0.035),
            pixel_pitch_m=r.get_float("optics.pixel_pitch_m", 4.86e-6),
            baseline_m=r.get_float("bar.baseline_m", 0.95),
        )
        bar = build_led_bar(
            baseline_m=optics.baseline_m,
            led_pitch_m=r.get_float("bar.led_pitch_m", 0.01),
            leds_per_group=r.get_int("bar.leds_per_group", 5),
            groups=r.get_str("bar.groups", "both"),
        )
        freqs_one_group = r.get_float_list("bar.freqs_hz", (5000.0, 10000.0, 20000.0, 10000.0, 5000.0))
        n_groups = len(bar) // len(freqs_one_group)
        if len(bar) != n_groups * len(freqs_one_group):
            raise ValueError(
                f"{len(freqs_one_group)} frequencies do not cover {len(bar)} LEDs evenly"
            )
        cfg = ScenarioConfig(
            optics=optics,
            geometry=SensorGeometry(r.get_int("geometry.width", 1280), r.get_int("geometry.height", 720)),
            led_positions=bar,
            blink_freqs_hz=freqs_one_group * n_groups,
            initial_distance_m=r.get_float("scenario.initial_distance_m", _REQUIRED),
            speed_mps=r.get_float("scenario.speed_mps", _REQUIRED),
            duration_s=r.get_float("scenario.duration_s", _REQUIRED),
            lateral_offset_m=r.get_float("scenario.lateral_offset_m", 0.0),
            vibration_amplitude_px=r.get_float("vibration.amplitude_px", 0.0),
            vibration_rate_px_per_ms=r.get_float("vibration.rate_px_per_ms", 0.0),
            noise_rate_eps=r.get_float("noise.rate_eps", 1.0e6),
            psf_sigma_px=r.get_float("emission.psf_sigma_px", 1.2),
            events_per_edge=r.get_float("emission.events_per_edge", 1.0),
            jitter_us=r.get_int("emission.jitter_us", 50),
            truth_window_us=r.get_int("truth.window_us", 3000),
            seed=r.get_int("seed", 0),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    r.finish()
    return cfg


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package."""
    if name not in BUNDLED_SCENARIOS:
        raise ConfigError(
            f"unknown bundled scenario {name!r}; available: {', '.join(BUNDLED_SCENARIOS)}"
        )
    return Path(str(resources.files("evrange").joinpath("data", f"{name}.cfg")))


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """Accept a bundled scenario name or a config file path."""
    if name_or_path in BUNDLED_SCENARIOS:
        return load_scenario_config(bundled_scenario_path(name_or_path))
    p = Path(name_or_path)
    if not p.exists():
        raise ConfigError(
            f"scenario {name_or_path!r} is neither a bundled name "
            f"({', '.join(BUNDLED_SCENARIOS)}) nor an existing file"
        )
    return load_scenario_config(p)
