"""Scene description: a flat list of solids on a ground plane.

Scenes load from JSON.  Supported solid kinds are axis-aligned boxes,
z-aligned cylinders, and spheres; each entry carries flags saying whether
the robot may grasp it and whether other objects may rest on top of it.
Instance ids are 1-based in file order; id 0 is the floor/background.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = ["Scene", "SceneObject", "default_scene", "load_scene"]

_KINDS = ("box", "cylinder", "sphere")


@dataclass(frozen=True)
class SceneObject:
    name: str
    kind: str
    center: tuple[float, float, float]
    # box: full edge lengths; cylinder: (radius, height); sphere: (radius,)
    dims: tuple[float, ...]
    graspable: bool = False
    support: bool = False
    color: tuple[int, int, int] = (180, 180, 180)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown solid kind {self.kind!r}")
        need = {"box": 3, "cylinder": 2, "sphere": 1}[self.kind]
        if len(self.dims) != need:
            raise ValueError(f"{self.kind} wants {need} dims, got {len(self.dims)}")
        if any(d <= 0 for d in self.dims):
            raise ValueError(f"{self.name}: dims must be positive")

    def half_extents(self) -> np.ndarray:
        if self.kind == "box":
            return np.asarray(self.dims, dtype=float) / 2.0
        if self.kind == "cylinder":
            r, h = self.dims
            return np.array([r, r, h / 2.0])
        r = self.dims[0]
        return np.array([r, r, r])

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center, dtype=float)
        h = self.half_extents()
        return c - h, c + h

    def top_z(self) -> float:
        return float(self.center[2] + self.half_extents()[2])

    def bottom_z(self) -> float:
        return float(self.center[2] - self.half_extents()[2])

    def moved_to(self, center) -> "SceneObject":
        return replace(self, center=(float(center[0]), float(center[1]), float(center[2])))


@dataclass(frozen=True)
class Scene:
    name: str
    objects: tuple[SceneObject, ...]

    def __post_init__(self) -> None:
        names = [o.name for o in self.objects]
        if len(set(names)) != len(names):
            raise ValueError("object names must be unique")

    def instance_id(self, name: str) -> int:
        for i, obj in enumerate(self.objects, start=1):
            if obj.name == name:
                return i
        raise KeyError(name)

    def object_for(self, instance_id: int) -> SceneObject:
        if not 1 <= instance_id <= len(self.objects):
            raise KeyError(f"no object with instance id {instance_id}")
        return self.objects[instance_id - 1]

    def graspable_ids(self) -> frozenset[int]:
        return frozenset(i for i, o in enumerate(self.objects, start=1) if o.graspable)

    def support_ids(self) -> frozenset[int]:
        return frozenset(i for i, o in enumerate(self.objects, start=1) if o.support)


def _object_from_dict(entry: dict) -> SceneObject:
    try:
        kind = entry["kind"]
        dims_key = {"box": "size", "cylinder": "size", "sphere": "size"}[kind]
    except KeyError as exc:
        raise ValueError(f"scene entry missing or bad kind: {entry!r}") from exc
    return SceneObject(
        name=entry["name"],
        kind=kind,
        center=tuple(float(c) for c in entry["center"]),
        dims=tuple(float(d) for d in entry[dims_key]),
        graspable=bool(entry.get("graspable", False)),
        support=bool(entry.get("support", False)),
        color=tuple(int(c) for c in entry.get("color", (180, 180, 180))),
    )


def scene_from_dict(data: dict) -> Scene:
    objects = tuple(_object_from_dict(e) for e in data.get("objects", []))
    return Scene(name=str(data.get("name", "unnamed")), objects=objects)


def load_scene(path: str | Path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return scene_from_dict(json.load(fh))


def default_scene() -> Scene:
    """The packaged tabletop room used by the demos and scenario suites."""
    text = resources.files("sketchteleop").joinpath("scenes", "wrs_room.json").read_text("utf-8")
    return scene_from_dict(json.loads(text))
