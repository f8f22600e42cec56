"""Forced curve shortening flow on closed polygons, with theorem monitors."""

from .errors import (
    AdmissionError,
    BlowUpError,
    ChordArcError,
    ConfigError,
    CuspError,
    DegenerateEdgeError,
    ForcingConsistencyError,
    ForcingDomainError,
    GenerationError,
    NotCriticalPairError,
    OrientationError,
    SelfTouchingError,
    StiffnessCollapseError,
)
from .geometry import (
    DiscreteCurve,
    Frames,
    Point2,
    VertexFrame,
    enclosed_area,
    ensure_positive_orientation,
    is_embedded,
    read_curve,
    resample_uniform,
    total_length,
    turning_angles,
    vertex_frames,
    write_curve,
)

__all__ = [
    "AdmissionError",
    "BlowUpError",
    "ChordArcError",
    "ConfigError",
    "CuspError",
    "DegenerateEdgeError",
    "DiscreteCurve",
    "ForcingConsistencyError",
    "ForcingDomainError",
    "Frames",
    "GenerationError",
    "NotCriticalPairError",
    "OrientationError",
    "Point2",
    "SelfTouchingError",
    "StiffnessCollapseError",
    "VertexFrame",
    "enclosed_area",
    "ensure_positive_orientation",
    "is_embedded",
    "read_curve",
    "resample_uniform",
    "total_length",
    "turning_angles",
    "vertex_frames",
    "write_curve",
]
