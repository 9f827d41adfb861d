"""Pinhole camera on a fixed base mount.

Camera frame: x right, y down, z forward.  A ray through pixel (u, v) is
direction ((u - cx) / fx, (v - cy) / fy, 1) in the camera frame, so the
ray parameter equals the camera-frame z coordinate.  Depth maps store
that value, which makes backprojection an exact inverse of projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geom import BasePose

__all__ = [
    "CameraIntrinsics",
    "CameraModel",
    "backproject_pixel",
    "pixel_rays",
    "project_points",
]


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float = 260.0
    fy: float = 260.0
    cx: float = 160.0
    cy: float = 120.0
    width: int = 320
    height: int = 240


@dataclass(frozen=True)
class CameraModel:
    """Intrinsics plus the rigid mount that fixes the camera to the base.

    The mount raises the camera above the base origin and pitches it down
    by ``mount_pitch`` radians toward the floor in front of the robot.
    """

    intrinsics: CameraIntrinsics = CameraIntrinsics()
    mount_xyz: tuple[float, float, float] = (0.05, 0.0, 1.25)
    mount_pitch: float = 0.5

    def rotation_in_base(self) -> np.ndarray:
        """Camera-to-base rotation; columns are the camera axes in base frame."""
        c, s = np.cos(self.mount_pitch), np.sin(self.mount_pitch)
        x_axis = np.array([0.0, -1.0, 0.0])
        y_axis = np.array([-s, 0.0, -c])
        z_axis = np.array([c, 0.0, -s])
        return np.column_stack([x_axis, y_axis, z_axis])

    def pose_in_world(self, base: BasePose) -> np.ndarray:
        """4x4 camera-to-world transform for the given base pose."""
        m = np.eye(4)
        m[:3, :3] = base.matrix()[:3, :3] @ self.rotation_in_base()
        m[:3, 3] = base.matrix()[:3, :3] @ np.asarray(self.mount_xyz) + base.position()
        return m


def pixel_rays(intr: CameraIntrinsics) -> np.ndarray:
    """(H, W, 3) camera-frame ray directions, one per pixel center."""
    u = np.arange(intr.width, dtype=float)
    v = np.arange(intr.height, dtype=float)
    uu, vv = np.meshgrid(u, v)
    return np.stack([(uu - intr.cx) / intr.fx, (vv - intr.cy) / intr.fy, np.ones_like(uu)], axis=-1)


def backproject_pixel(
    u: float, v: float, depth: float, camera_pose: np.ndarray, intr: CameraIntrinsics
) -> np.ndarray:
    """World point for a pixel and its stored depth (camera-frame z)."""
    p_cam = np.array([(u - intr.cx) / intr.fx * depth, (v - intr.cy) / intr.fy * depth, depth])
    return camera_pose[:3, :3] @ p_cam + camera_pose[:3, 3]


def project_points(
    points: np.ndarray, camera_pose: np.ndarray, intr: CameraIntrinsics
) -> tuple[np.ndarray, np.ndarray]:
    """Project world points; returns (n, 2) pixels and (n,) camera depths."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rel = (pts - camera_pose[:3, 3]) @ camera_pose[:3, :3]
    z = rel[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = intr.fx * rel[:, 0] / z + intr.cx
        v = intr.fy * rel[:, 1] / z + intr.cy
    return np.stack([u, v], axis=-1), z
