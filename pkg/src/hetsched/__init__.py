"""Schedulability analysis and MILP deployment optimization for real-time
task sets that offload work to a single shared hardware accelerator."""

from hetsched.model import (
    Assignment,
    ChainSpec,
    Core,
    ImplType,
    ModelError,
    PlatformSpec,
    ProblemInstance,
    SegmentSpec,
    TaskSpec,
    Violation,
    builtin_waters,
    instance_from_json,
    instance_to_json,
    load_instance,
    scale_wcets,
    validate_assignment,
    validate_instance,
    waters_published_assignment,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ChainSpec",
    "Core",
    "ImplType",
    "ModelError",
    "PlatformSpec",
    "ProblemInstance",
    "SegmentSpec",
    "TaskSpec",
    "Violation",
    "builtin_waters",
    "instance_from_json",
    "instance_to_json",
    "load_instance",
    "scale_wcets",
    "validate_assignment",
    "validate_instance",
    "waters_published_assignment",
    "__version__",
]
