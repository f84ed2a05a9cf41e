"""Dual-quaternion algebra from the ground up.

A dual quaternion packs a rotation and a translation into one 8-vector:
the first four components are an ordinary rotation quaternion, the last
four carry the displacement. This script walks through construction,
composition, normalization and the antipodal property.
"""

import numpy as np

from dqmotion import dualquat, quat

np.set_printoptions(precision=4, suppress=True)

print("=== building rigid transforms ===")
# A 90 degree turn about z, followed by a translation along x.
turn = quat.from_euler([0.0, 0.0, np.pi / 2], "ZYX")
move = np.array([2.0, 0.0, 0.0])
d = dualquat.from_rotation_translation(turn, move)
print("rotation quaternion:", turn)
print("dual quaternion:    ", d)

p = np.array([1.0, 0.0, 0.0])
print(f"point {p} maps to {dualquat.transform_point(d, p)}")
print("(rotate x->y, then shift by +2x: expected [2, 1, 0])")

print()
print("=== composition mirrors matrix products ===")
lift = dualquat.from_rotation_translation(quat.identity(), [0.0, 0.0, 1.0])
combined = dualquat.mul(lift, d)  # apply d first, then lift
print("lift(base) o turn+move:", dualquat.transform_point(combined, p))
print("step by step:          ", dualquat.transform_point(lift, dualquat.transform_point(d, p)))

print()
print("=== the unit conditions and normalization ===")
print("magnitude of a unit dq:", dualquat.magnitude(d))
drifted = d * 1.7
drifted[4:] += 0.3  # simulate drift off the unit manifold
norm_res, ortho_res = dualquat.unitary_residual(drifted)
print(f"drifted residuals: norm {norm_res:+.4f}, orthogonality {ortho_res:+.4f}")
repaired = dualquat.normalize(drifted)
norm_res, ortho_res = dualquat.unitary_residual(repaired)
print(f"after normalize:   norm {norm_res:+.2e}, orthogonality {ortho_res:+.2e}")

print()
print("=== the antipodal property ===")
flipped = dualquat.antipode(d)
print("d and -d move a point identically:")
print("  d:", dualquat.transform_point(d, p), "  -d:", dualquat.transform_point(flipped, p))
print("but as 8-vectors they are far apart:", np.linalg.norm(d - flipped))
print("(this is why encoded sequences need the sign correction)")

print()
print("=== recovering rotation and translation ===")
print("rotation back:   ", dualquat.rotation(d))
print("translation back:", dualquat.translation(d))
angles = quat.to_euler(dualquat.rotation(d), "ZYX")
print("euler angles (x, y, z):", np.degrees(angles), "degrees")
