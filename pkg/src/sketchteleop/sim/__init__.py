"""Kinematic simulation of a mobile manipulator with a head camera.

World frame: z up, floor at z = 0, robot base starts at the origin facing
+x.  The camera rides the base on a fixed mount and follows the usual
vision convention (x right, y down, z forward in front of the lens).
"""

from .authority import SimAuthority
from .camera import CameraIntrinsics, CameraModel
from .geom import BasePose, EEPose
from .perception import (
    GraspTarget,
    InvalidDepth,
    NoObjectFound,
    ObservationFrame,
    PathOffFloor,
    PathTooShort,
    arrow_probe,
    backproject,
    detect_object,
    grasp_target,
    path_from_sketch,
)
from .scene import Scene, SceneObject, default_scene, load_scene

__all__ = [
    "BasePose",
    "CameraIntrinsics",
    "CameraModel",
    "EEPose",
    "GraspTarget",
    "InvalidDepth",
    "NoObjectFound",
    "ObservationFrame",
    "PathOffFloor",
    "PathTooShort",
    "Scene",
    "SceneObject",
    "SimAuthority",
    "arrow_probe",
    "backproject",
    "default_scene",
    "detect_object",
    "grasp_target",
    "load_scene",
    "path_from_sketch",
]
