"""Vectorized ray caster producing RGB, depth, and instance maps.

Every pixel gets one ray.  Depth stores the camera-frame z of the nearest
hit (0 where the ray escapes to the sky); the instance map stores the
1-based object id, with 0 shared by floor and sky.  Colors are flat per
object, with a light checker on the floor so motion is visible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraIntrinsics, pixel_rays
from .scene import SceneObject

__all__ = ["RenderResult", "render"]

_SKY = np.array([200, 215, 230], dtype=np.uint8)
_FLOOR_A = np.array([120, 120, 120], dtype=np.uint8)
_FLOOR_B = np.array([104, 104, 104], dtype=np.uint8)
_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class RenderResult:
    rgb: np.ndarray  # (H, W, 3) uint8
    depth: np.ndarray  # (H, W) float32, 0 = sky
    instances: np.ndarray  # (H, W) int32, 0 = floor/background


def _sphere_t(origin, dirs, center, radius):
    m = origin - np.asarray(center)
    a = np.einsum("hwc,hwc->hw", dirs, dirs)
    b = 2.0 * np.einsum("hwc,c->hw", dirs, m)
    c = float(np.dot(m, m) - radius * radius)
    disc = b * b - 4.0 * a * c
    t = np.full(a.shape, np.inf)
    ok = disc >= 0.0
    root = np.sqrt(np.where(ok, disc, 0.0))
    near = (-b - root) / (2.0 * a)
    t[ok & (near > _EPS)] = near[ok & (near > _EPS)]
    return t


def _box_t(origin, dirs, lo, hi):
    d = np.where(np.abs(dirs) < 1e-12, 1e-12, dirs)
    t1 = (lo - origin) / d
    t2 = (hi - origin) / d
    tmin = np.minimum(t1, t2).max(axis=-1)
    tmax = np.maximum(t1, t2).min(axis=-1)
    hit = (tmax >= tmin) & (tmax > _EPS) & (tmin > _EPS)
    return np.where(hit, tmin, np.inf)


def _cylinder_t(origin, dirs, center, radius, z_lo, z_hi):
    m = origin - np.asarray(center)
    dx, dy, dz = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    a = dx * dx + dy * dy
    b = 2.0 * (dx * m[0] + dy * m[1])
    c = float(m[0] * m[0] + m[1] * m[1] - radius * radius)
    disc = b * b - 4.0 * a * c
    best = np.full(a.shape, np.inf)

    ok = (disc >= 0.0) & (a > 1e-18)
    root = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        near = (-b - root) / (2.0 * a)
    z_at = origin[2] + near * dz
    side = ok & (near > _EPS) & (z_at >= z_lo) & (z_at <= z_hi)
    best[side] = near[side]

    for z_cap in (z_lo, z_hi):
        with np.errstate(divide="ignore", invalid="ignore"):
            t_cap = (z_cap - origin[2]) / np.where(np.abs(dz) < 1e-12, 1e-12, dz)
        px = origin[0] + t_cap * dx - center[0]
        py = origin[1] + t_cap * dy - center[1]
        cap = (t_cap > _EPS) & (px * px + py * py <= radius * radius)
        best = np.where(cap & (t_cap < best), t_cap, best)
    return best


def _object_t(origin, dirs, obj: SceneObject):
    if obj.kind == "sphere":
        return _sphere_t(origin, dirs, obj.center, obj.dims[0])
    if obj.kind == "box":
        lo, hi = obj.aabb()
        return _box_t(origin, dirs, lo, hi)
    radius, height = obj.dims
    z_lo = obj.center[2] - height / 2.0
    z_hi = obj.center[2] + height / 2.0
    return _cylinder_t(origin, dirs, obj.center, radius, z_lo, z_hi)


_RAY_CACHE: dict[CameraIntrinsics, np.ndarray] = {}


def _rays_for(intr: CameraIntrinsics) -> np.ndarray:
    rays = _RAY_CACHE.get(intr)
    if rays is None:
        rays = pixel_rays(intr)
        rays.setflags(write=False)
        _RAY_CACHE[intr] = rays
    return rays


def _pixel_window(obj: SceneObject, origin, rotation, intr: CameraIntrinsics):
    """Conservative pixel rect that contains the object's silhouette.

    The silhouette of a convex solid lies inside the convex hull of its
    projected bounding-box corners, so rays outside that rect cannot hit
    it.  Returns None when the rect misses the image entirely; falls back
    to the full frame when any corner is at or behind the image plane,
    where the bound stops holding.
    """
    lo, hi = obj.aabb()
    corners = np.array(
        [[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])]
    )
    cam = (corners - origin) @ rotation
    z = cam[:, 2]
    if np.any(z <= 1e-9):
        return 0, intr.width, 0, intr.height
    u = intr.fx * cam[:, 0] / z + intr.cx
    v = intr.fy * cam[:, 1] / z + intr.cy
    u0 = max(int(np.floor(u.min())) - 1, 0)
    u1 = min(int(np.ceil(u.max())) + 2, intr.width)
    v0 = max(int(np.floor(v.min())) - 1, 0)
    v1 = min(int(np.ceil(v.max())) + 2, intr.height)
    if u0 >= u1 or v0 >= v1:
        return None
    return u0, u1, v0, v1


def render(
    objects: tuple[SceneObject, ...], camera_pose: np.ndarray, intr: CameraIntrinsics
) -> RenderResult:
    origin = camera_pose[:3, 3]
    rotation = camera_pose[:3, :3]
    dirs = _rays_for(intr) @ rotation.T

    best_t = np.full((intr.height, intr.width), np.inf)
    best_id = np.zeros((intr.height, intr.width), dtype=np.int32)

    # floor plane z = 0 claims instance id 0 but a real depth
    dz = dirs[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_floor = np.where(dz < -1e-12, -origin[2] / dz, np.inf)
    floor_hit = t_floor < best_t
    best_t[floor_hit] = t_floor[floor_hit]

    for idx, obj in enumerate(objects, start=1):
        window = _pixel_window(obj, origin, rotation, intr)
        if window is None:
            continue
        u0, u1, v0, v1 = window
        sub = (slice(v0, v1), slice(u0, u1))
        t = _object_t(origin, dirs[sub], obj)
        sub_t = best_t[sub]
        closer = t < sub_t
        sub_t[closer] = t[closer]
        best_id[sub][closer] = idx

    rgb = np.empty((intr.height, intr.width, 3), dtype=np.uint8)
    rgb[:] = _SKY
    on_floor = np.isfinite(best_t) & (best_id == 0)
    if on_floor.any():
        hits = origin + best_t[on_floor, None] * dirs[on_floor]
        checker = (np.floor(hits[:, 0] / 0.5) + np.floor(hits[:, 1] / 0.5)).astype(int) % 2
        rgb[on_floor] = np.where(checker[:, None] == 0, _FLOOR_A, _FLOOR_B)
    for idx, obj in enumerate(objects, start=1):
        rgb[best_id == idx] = np.asarray(obj.color, dtype=np.uint8)

    depth = np.where(np.isfinite(best_t), best_t, 0.0).astype(np.float32)
    return RenderResult(rgb=rgb, depth=depth, instances=best_id)
