"""Reading, resampling and writing BVH motion files.

The parser is a faithful model of the file: channel order, units and end
sites survive untouched. Conversion to radians/quaternions happens later,
in the kinematics layer.
"""

from pathlib import Path

import numpy as np

from dqmotion import bvh

DATA = Path(__file__).parent / "data"

clip = bvh.parse_file(DATA / "walk.bvh")
skeleton = clip.skeleton

print("=== skeleton ===")
print(f"{skeleton.num_joints} joints ({skeleton.num_joints - skeleton.num_encoded} end sites), "
      f"{skeleton.channel_count} channels per frame")
for joint in skeleton.joints[:6]:
    parent = "-" if joint.parent is None else skeleton.names[joint.parent]
    print(f"  {joint.name:10s} parent={parent:8s} offset={joint.offset}")
print("  ...")

print()
print("=== motion ===")
print(f"{clip.num_frames} frames at {clip.fps:.0f} fps (frame time {clip.frame_time:.6f} s)")
print("first frame, first 9 channels:", clip.frames[0, :9])

print()
print("=== subsampling ===")
fast = bvh.parse_file(DATA / "arm_120fps.bvh")
slow = bvh.subsample(fast, 30.0)
print(f"{fast.fps:.0f} fps with {fast.num_frames} frames "
      f"-> {slow.fps:.0f} fps with {slow.num_frames} frames (every 4th kept)")

print()
print("=== writing ===")
text = bvh.write(slow)
print("\n".join(text.splitlines()[:8]))
print("...")
reparsed = bvh.parse(text)
print("write -> parse is a fixed point:",
      reparsed.skeleton == slow.skeleton
      and bool(np.max(np.abs(reparsed.frames - slow.frames)) < 1e-5))
