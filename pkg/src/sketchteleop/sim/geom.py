"""Small pose types shared across the simulation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["BasePose", "EEPose", "rotz"]


def rotz(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class BasePose:
    """Planar pose of the mobile base: position on the floor plus heading."""

    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = rotz(self.yaw)
        m[0, 3] = self.x
        m[1, 3] = self.y
        return m

    def forward(self) -> np.ndarray:
        return np.array([np.cos(self.yaw), np.sin(self.yaw), 0.0])

    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, 0.0])


@dataclass(frozen=True, eq=False)
class EEPose:
    """Gripper pose in the world: position plus a 3x3 rotation.

    The rotation's third column is the approach axis (the direction the
    fingers point).
    """

    position: np.ndarray
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(3))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float).reshape(3, 3))

    def approach_axis(self) -> np.ndarray:
        return self.rotation[:, 2].copy()

    def with_position(self, position) -> "EEPose":
        return EEPose(np.asarray(position, dtype=float), self.rotation.copy())

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.position
        return m

    @staticmethod
    def from_matrix(m: np.ndarray) -> "EEPose":
        m = np.asarray(m, dtype=float)
        return EEPose(m[:3, 3].copy(), m[:3, :3].copy())

    def allclose(self, other: "EEPose", tol: float = 1e-9) -> bool:
        return bool(
            np.allclose(self.position, other.position, atol=tol)
            and np.allclose(self.rotation, other.rotation, atol=tol)
        )


def orthonormal_from_approach(approach: np.ndarray, hint: np.ndarray | None = None) -> np.ndarray:
    """Build a gripper rotation whose third column is ``approach``.

    The first column is chosen horizontal when possible, falling back to
    ``hint`` (or +x) when the approach axis is vertical.
    """
    z = np.asarray(approach, dtype=float)
    z = z / np.linalg.norm(z)
    up = np.array([0.0, 0.0, 1.0])
    x = np.cross(up, z)
    if np.linalg.norm(x) < 1e-9:
        x = np.array([1.0, 0.0, 0.0]) if hint is None else np.asarray(hint, dtype=float)
        x = x - z * np.dot(x, z)
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    return np.column_stack([x, y, z])
