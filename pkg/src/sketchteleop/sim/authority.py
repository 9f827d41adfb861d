"""The single owner of simulated world state.

Everything kinematic: the base integrates a commanded twist, the gripper
teleports wherever the planner steps it, a grasped object rides the
gripper, a released object settles straight down onto whatever support
lies under it.  Pushing is modeled as the gripper sweeping an object's
footprint sideways.
"""

from __future__ import annotations

import numpy as np

from ..interpret import ConstraintState
from .camera import CameraModel
from .geom import BasePose, EEPose, orthonormal_from_approach
from .perception import ObservationFrame
from .render import render
from .scene import Scene, SceneObject, default_scene

__all__ = ["SimAuthority"]

_GRASP_RANGE = 0.04
_GRIPPER_RADIUS = 0.05


class SimAuthority:
    """Mutable world: scene solids, base pose, gripper pose, held object."""

    def __init__(self, scene: Scene | None = None, camera: CameraModel | None = None):
        self.scene = scene or default_scene()
        self.camera = camera or CameraModel()
        self._objects: list[SceneObject] = list(self.scene.objects)
        self.base = BasePose()
        self._ee_local = EEPose(
            np.array([0.45, 0.0, 0.85]), orthonormal_from_approach([1.0, 0.0, 0.0])
        )
        self._held: int | None = None
        self._held_offset = np.zeros(3)
        self._twist = (0.0, 0.0)
        self.wrist_angle = 0.0
        self.time_s = 0.0
        self.last_grasp_pose: EEPose | None = None
        self._frame_counter = 0

    # -- state access --------------------------------------------------

    @property
    def held_object(self) -> int | None:
        return self._held

    @property
    def holding(self) -> bool:
        return self._held is not None

    def constraint_state(self) -> ConstraintState:
        return ConstraintState(holding=self.holding, held_object=self._held)

    def object_for(self, instance_id: int) -> SceneObject:
        if not 1 <= instance_id <= len(self._objects):
            raise KeyError(f"no object with instance id {instance_id}")
        return self._objects[instance_id - 1]

    def object_center(self, instance_id: int) -> np.ndarray:
        return np.asarray(self.object_for(instance_id).center, dtype=float)

    def instance_id(self, name: str) -> int:
        return self.scene.instance_id(name)

    @property
    def ee_pose(self) -> EEPose:
        world = self.base.matrix() @ self._ee_local.matrix()
        return EEPose.from_matrix(world)

    # -- observation ---------------------------------------------------

    def next_frame_id(self) -> str:
        """Mint the next observation id without rendering anything."""
        self._frame_counter += 1
        return f"frame-{self._frame_counter:05d}"

    def observe(self, frame_id: str | None = None) -> ObservationFrame:
        if frame_id is None:
            frame_id = self.next_frame_id()
        pose = self.camera.pose_in_world(self.base)
        result = render(tuple(self._objects), pose, self.camera.intrinsics)
        return ObservationFrame(
            rgb=result.rgb,
            depth=result.depth,
            instances=result.instances,
            camera_pose=pose,
            intrinsics=self.camera.intrinsics,
            frame_id=frame_id,
            graspable_ids=self.scene.graspable_ids(),
            support_ids=self.scene.support_ids(),
        )

    # -- base motion ---------------------------------------------------

    def set_base_twist(self, forward: float, yaw_rate: float) -> None:
        self._twist = (float(forward), float(yaw_rate))

    def step(self, dt: float) -> None:
        v, w = self._twist
        self.base = BasePose(
            x=self.base.x + v * np.cos(self.base.yaw) * dt,
            y=self.base.y + v * np.sin(self.base.yaw) * dt,
            yaw=self.base.yaw + w * dt,
        )
        self.time_s += dt

    # -- gripper motion ------------------------------------------------

    def set_ee_pose(self, world: EEPose) -> None:
        old = self.ee_pose.position
        base_inv = np.linalg.inv(self.base.matrix())
        self._ee_local = EEPose.from_matrix(base_inv @ world.matrix())
        self._sweep_push(old, world.position, world.rotation)
        self._carry_held()

    def _carry_held(self) -> None:
        if self._held is None:
            return
        ee = self.ee_pose
        center = ee.position + ee.rotation @ self._held_offset
        self._objects[self._held - 1] = self._objects[self._held - 1].moved_to(center)

    def _sweep_push(self, old_pos: np.ndarray, new_pos: np.ndarray, rotation: np.ndarray) -> None:
        """Displace any object whose expanded footprint the gripper enters.

        Only lateral sweeps push: when the gripper travels along its own
        finger axis the open fingers thread around objects instead, which
        is what lets a side approach reach a grasp without bulldozing the
        target out of reach.
        """
        delta = new_pos - old_pos
        total = float(np.linalg.norm(delta))
        if total < 1e-12 or (abs(delta[0]) < 1e-12 and abs(delta[1]) < 1e-12):
            return
        if abs(float(np.dot(delta / total, rotation[:, 2]))) > 0.7:
            return
        for idx, obj in enumerate(self._objects, start=1):
            if not obj.graspable or idx == self._held:
                continue
            lo, hi = obj.aabb()
            inside_xy = (
                lo[0] - _GRIPPER_RADIUS <= new_pos[0] <= hi[0] + _GRIPPER_RADIUS
                and lo[1] - _GRIPPER_RADIUS <= new_pos[1] <= hi[1] + _GRIPPER_RADIUS
            )
            overlap_z = lo[2] - 0.01 <= new_pos[2] <= hi[2] + 0.02
            if inside_xy and overlap_z:
                center = np.asarray(obj.center) + np.array([delta[0], delta[1], 0.0])
                self._objects[idx - 1] = obj.moved_to(center)

    # -- grasp / release / wrist ----------------------------------------

    def grasp(self) -> bool:
        if self._held is not None:
            return False
        ee = self.ee_pose
        best_id, best_dist = None, _GRASP_RANGE
        for idx, obj in enumerate(self._objects, start=1):
            if not obj.graspable:
                continue
            dist = float(np.linalg.norm(np.asarray(obj.center) - ee.position))
            if dist <= best_dist:
                best_id, best_dist = idx, dist
        if best_id is None:
            return False
        self._held = best_id
        center = np.asarray(self._objects[best_id - 1].center, dtype=float)
        self._held_offset = ee.rotation.T @ (center - ee.position)
        self.last_grasp_pose = ee
        return True

    def release(self) -> int | None:
        """Open the gripper; the object settles onto the support below it."""
        if self._held is None:
            return None
        idx = self._held
        obj = self._objects[idx - 1]
        self._held = None
        self._held_offset = np.zeros(3)
        cx, cy = obj.center[0], obj.center[1]
        best_top = 0.0  # the floor
        for sid in self.scene.support_ids():
            support = self._objects[sid - 1]
            lo, hi = support.aabb()
            if lo[0] <= cx <= hi[0] and lo[1] <= cy <= hi[1]:
                if support.top_z() <= obj.bottom_z() + 1e-6 and support.top_z() > best_top:
                    best_top = support.top_z()
        half_z = float(obj.half_extents()[2])
        self._objects[idx - 1] = obj.moved_to((cx, cy, best_top + half_z))
        return idx

    def rotate_wrist(self, delta: float) -> None:
        self.wrist_angle += float(delta)
