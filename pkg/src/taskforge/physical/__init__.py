"""Physical validation: volumes, scene spawning, collision/reach checks."""

from .evaluate import fact_satisfied, scene_violations
from .kernels import backend
from .scene import (
    Pose,
    SceneState,
    SpawnOutcome,
    check_collisions,
    check_reachability,
    spawn_scene,
)
from .validate import SubgoalCheck, ViabilityReport, preflight, validate_task
from .volumes import (
    EMPTY_VOLUME,
    RobotModel,
    SpawnParams,
    Volume,
    template_box,
    volume_for_entity,
    workspace_region,
)

__all__ = [
    "backend",
    "fact_satisfied",
    "scene_violations",
    "Pose",
    "SceneState",
    "SpawnOutcome",
    "check_collisions",
    "check_reachability",
    "spawn_scene",
    "SubgoalCheck",
    "ViabilityReport",
    "preflight",
    "validate_task",
    "EMPTY_VOLUME",
    "RobotModel",
    "SpawnParams",
    "Volume",
    "template_box",
    "volume_for_entity",
    "workspace_region",
]
