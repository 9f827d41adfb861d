"""
What the head camera sees, and how pixels become floor points
=============================================================

The simulated room renders to three aligned buffers: colour, metric
depth, and per-pixel instance ids. Any pixel with depth can be thrown
back through the pinhole model into the world, which is how a stroke
drawn on the video turns into a route on the floor.
"""

import os

import numpy as np
from PIL import Image

from sketchteleop.sim.authority import SimAuthority
from sketchteleop.sim.camera import backproject_pixel, project_points

auth = SimAuthority()
frame = auth.observe()

h, w = frame.depth.shape
print(f"frame {frame.frame_id}: {w}x{h}, depth "
      f"{frame.depth[frame.depth > 0].min():.2f}..{frame.depth.max():.2f} m")

# tally which instance owns how many pixels
ids, counts = np.unique(frame.instances, return_counts=True)
print()
print("instance coverage:")
for inst, count in zip(ids, counts):
    name = "(sky / nothing)" if inst == 0 else auth.object_for(int(inst)).name
    print(f"  id {inst:>2} {name:<16} {count:>6} px")

os.makedirs("demos/out", exist_ok=True)
Image.fromarray(frame.rgb).save("demos/out/room.png")
print()
print("wrote demos/out/room.png")

# --- round trip: pixel -> world -> pixel ------------------------------

# pick the centre pixel of each visible object and send it out and back
print()
print("backprojection round trip:")
for inst in ids:
    if inst == 0:
        continue
    vs, us = np.nonzero(frame.instances == inst)
    i = len(vs) // 2
    u, v = int(us[i]), int(vs[i])
    d = float(frame.depth[v, u])
    world = backproject_pixel(u, v, d, frame.camera_pose, frame.intrinsics)
    uv, _ = project_points(world[None, :], frame.camera_pose, frame.intrinsics)
    err = float(np.hypot(uv[0, 0] - u, uv[0, 1] - v))
    name = auth.object_for(int(inst)).name
    print(f"  {name:<16} pixel ({u:>3},{v:>3}) depth {d:.2f} m"
          f" -> world ({world[0]:+.2f},{world[1]:+.2f},{world[2]:+.2f})"
          f" -> back, error {err:.1e} px")

# --- a floor stroke becomes a drive route ------------------------------

# scan up from the image bottom for a clear band of floor, draw a
# straight stroke across it, and lift it into world coordinates
from sketchteleop.sim.perception import path_from_sketch
from sketchteleop.strokes import SketchSet, Stroke

floor = (frame.instances == 0) & (frame.depth > 0)
row = next(v for v in range(h - 1, -1, -1) if floor[v].sum() > 150)
us = np.nonzero(floor[row])[0]
xy = np.array([[u, row] for u in range(int(us[10]), int(us[-10]), 4)], float)
sketch = SketchSet(strokes=(Stroke(xy=xy),), frame_id=frame.frame_id)

route = path_from_sketch(frame, sketch)
print()
print(f"stroke across image row {row} -> {len(route)} waypoints on the floor:")
for p in route:
    print(f"  ({p[0]:+.2f}, {p[1]:+.2f}, z={p[2]:.1f})")
