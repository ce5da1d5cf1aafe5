"""evrange: distance to a blinking LED marker bar from event-camera streams.

Pipeline: temporal high-pass -> windowed accumulation -> count threshold ->
ROI crop -> upper/lower group split -> phase-only correlation with subpixel
refinement -> triangulation. A synthetic scenario generator and an
evaluation harness close the loop.
"""

from .accumulation import CountFrame, accumulate, crop_to_roi, frame_to_pgm
from .config import (
    BUNDLED_SCENARIOS,
    PipelineConfig,
    bundled_scenario_path,
    load_pipeline_config,
    load_scenario_config,
    resolve_scenario,
)
from .errors import (
    ConfigError,
    EmptyRoiError,
    EvrangeError,
    FormatError,
    GeometryError,
    LowConfidenceError,
    NumericalIntegrityError,
    OrderingError,
    ProjectionError,
    SeparationError,
)
from .evaluation import ErrorReport, evaluate, write_report_csv
from .events import NEGATIVE, POSITIVE, Event, EventStream, SensorGeometry
from .filtering import (
    CountThresholdConfig,
    HighPassConfig,
    count_threshold,
    high_pass,
    highpass_backend,
)
from .io import read_events, write_events
from .poc import (
    PocConfig,
    PocResult,
    cross_power,
    dft2,
    idft2,
    measure_displacement,
    poc_surface,
    refine_subpixel,
    unwrap_index,
)
from .ranging import (
    OpticalConfig,
    RangeEstimate,
    distances,
    estimate_stream,
    read_estimates_csv,
    triangulate,
    valid_fraction,
    write_estimates_csv,
)
from .separation import SplitFrames, split, weighted_y
from .synthgen import (
    CameraState,
    GroundTruth,
    ScenarioConfig,
    build_led_bar,
    generate,
    project,
    read_truth_csv,
    write_truth_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BUNDLED_SCENARIOS",
    "CameraState",
    "ConfigError",
    "CountFrame",
    "CountThresholdConfig",
    "EmptyRoiError",
    "ErrorReport",
    "EvrangeError",
    "Event",
    "EventStream",
    "FormatError",
    "GeometryError",
    "GroundTruth",
    "HighPassConfig",
    "LowConfidenceError",
    "NEGATIVE",
    "NumericalIntegrityError",
    "OpticalConfig",
    "OrderingError",
    "POSITIVE",
    "PipelineConfig",
    "PocConfig",
    "PocResult",
    "ProjectionError",
    "RangeEstimate",
    "ScenarioConfig",
    "SensorGeometry",
    "SeparationError",
    "SplitFrames",
    "accumulate",
    "build_led_bar",
    "bundled_scenario_path",
    "count_threshold",
    "cross_power",
    "crop_to_roi",
    "dft2",
    "distances",
    "estimate_stream",
    "evaluate",
    "frame_to_pgm",
    "generate",
    "high_pass",
    "highpass_backend",
    "idft2",
    "load_pipeline_config",
    "load_scenario_config",
    "measure_displacement",
    "poc_surface",
    "project",
    "read_estimates_csv",
    "read_events",
    "read_truth_csv",
    "refine_subpixel",
    "resolve_scenario",
    "split",
    "triangulate",
    "unwrap_index",
    "valid_fraction",
    "weighted_y",
    "write_estimates_csv",
    "write_events",
    "write_report_csv",
    "write_truth_csv",
]
