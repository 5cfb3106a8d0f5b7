"""Deterministic perception-to-haptics navigation toolkit: traversable-space
grid scoring, depth binning, the ten-motor belt wire protocol and unit
firmware emulation, a ground-truth scene renderer, a closed-loop trial
simulator, and paired nonparametric statistics.
"""

from .beltnet import (
    ClientId,
    CommandSlot,
    InMemoryBus,
    PublisherConfig,
    decode_command,
    encode_command,
    run_publisher,
    unit_slice,
)
from .clock import Clock, EmulatedClock, RealClock
from .depthmode import (
    DepthBinConfig,
    bin_fractions,
    cell_intensity,
    depth_command,
    rescale_depth,
)
from .errors import (
    ConfigError,
    DegenerateSample,
    InvalidDepth,
    MalformedPayload,
    NoFloor,
    SceneError,
    UnknownClient,
    VwError,
)
from .grid import (
    BeltCommand,
    BoundingBox,
    DepthMap,
    FloorMask,
    GridSpec,
    PixelRect,
    cell_rect,
    motor_index,
)
from .openpath import (
    CellScoreGrid,
    OpenPathConfig,
    adjusted_scores,
    open_path_command,
    postprocess_bbox,
    raw_scores,
    select_column,
)
from .pipeline import Session, SessionConfig, SyntheticBackend, run_session
from .scene import CameraModel, Cylinder, Scene, build_course, render_views
from .sim import (
    AgentState,
    CaneModel,
    SimParams,
    TrialMetrics,
    TrialRecord,
    compute_metrics,
    run_trial,
)
from .stats import (
    PairedSampleSet,
    exclude_outliers,
    summarize_experiment,
    wilcoxon_signed_rank,
)
from .unitemu import MotorState, UnitEmulator, UnitState

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "BeltCommand",
    "BoundingBox",
    "CameraModel",
    "CaneModel",
    "CellScoreGrid",
    "ClientId",
    "Clock",
    "CommandSlot",
    "ConfigError",
    "Cylinder",
    "DegenerateSample",
    "DepthBinConfig",
    "DepthMap",
    "EmulatedClock",
    "FloorMask",
    "GridSpec",
    "InMemoryBus",
    "InvalidDepth",
    "MalformedPayload",
    "MotorState",
    "NoFloor",
    "OpenPathConfig",
    "PairedSampleSet",
    "PixelRect",
    "PublisherConfig",
    "RealClock",
    "Scene",
    "SceneError",
    "Session",
    "SessionConfig",
    "SimParams",
    "SyntheticBackend",
    "TrialMetrics",
    "TrialRecord",
    "UnitEmulator",
    "UnitState",
    "UnknownClient",
    "VwError",
    "adjusted_scores",
    "bin_fractions",
    "build_course",
    "cell_intensity",
    "cell_rect",
    "compute_metrics",
    "decode_command",
    "depth_command",
    "encode_command",
    "exclude_outliers",
    "motor_index",
    "open_path_command",
    "postprocess_bbox",
    "raw_scores",
    "render_views",
    "rescale_depth",
    "run_publisher",
    "run_session",
    "run_trial",
    "select_column",
    "summarize_experiment",
    "unit_slice",
    "wilcoxon_signed_rank",
]
