"""Camera positioning from ceiling LED beacons.

Forward pinhole simulation, two- and three-beacon localization,
principal-point calibration, and Monte Carlo error analysis.
"""

from .analysis import ErrorReport, ReportComparison, compare_reports, error_stats
from .calibration import (
    CircleFit,
    DispersionSummary,
    calibrate_dispersion,
    calibrate_rotation,
    fit_circle,
    min_enclosing_circle,
)
from .camera import (
    MM_PER_CM,
    CameraIntrinsics,
    ImagePoint,
    PixelPoint,
    image_to_pixel,
    pixel_to_image,
)
from .errors import (
    BeaconBehindCamera,
    CoincidentProjection,
    DegenerateCircle,
    EmptyInput,
    InsufficientTracks,
    LengthMismatch,
    MissingDiagnostics,
    SceneConfigError,
    SingularGeometry,
    UnequalBeaconHeights,
    UnknownBeacon,
    VlpError,
)
from .positioning import (
    Detection,
    Diagnostics,
    LedBeacon,
    Method,
    PositionFix,
    estimate_height,
    locate_two,
    trilaterate_three,
    widest_pair,
)
from .simulator import (
    SWEEP_ANGLES_12,
    CameraPose,
    NoiseModel,
    SceneConfig,
    TrialRecord,
    default_grid,
    default_intrinsics,
    default_scene,
    derive_seed,
    generate_trials,
    observe,
    project,
    rotation_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BeaconBehindCamera",
    "CameraIntrinsics",
    "CameraPose",
    "CircleFit",
    "CoincidentProjection",
    "DegenerateCircle",
    "Detection",
    "Diagnostics",
    "DispersionSummary",
    "EmptyInput",
    "ErrorReport",
    "ImagePoint",
    "InsufficientTracks",
    "LedBeacon",
    "LengthMismatch",
    "Method",
    "MissingDiagnostics",
    "MM_PER_CM",
    "NoiseModel",
    "PixelPoint",
    "PositionFix",
    "ReportComparison",
    "SceneConfig",
    "SceneConfigError",
    "SingularGeometry",
    "SWEEP_ANGLES_12",
    "TrialRecord",
    "UnequalBeaconHeights",
    "UnknownBeacon",
    "VlpError",
    "calibrate_dispersion",
    "calibrate_rotation",
    "compare_reports",
    "default_grid",
    "default_intrinsics",
    "default_scene",
    "derive_seed",
    "error_stats",
    "estimate_height",
    "fit_circle",
    "generate_trials",
    "image_to_pixel",
    "locate_two",
    "min_enclosing_circle",
    "observe",
    "pixel_to_image",
    "project",
    "rotation_sweep",
    "trilaterate_three",
    "widest_pair",
]
