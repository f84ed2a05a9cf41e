"""Hierarchical transforms between local (parent-relative) and current
(root-centered) coordinates.

Two deliberately separate implementations of the same kinematics live
here: the dual-quaternion chain (`local_to_current` / `current_to_local`)
and a homogeneous-matrix forward kinematics (`matrix_fk`) kept free of any
dual-quaternion code so the two can verify each other.

Root translation never enters either chain; it is carried alongside as a
plain 3-vector, and all current-frame positions are relative to the root.
"""

from dataclasses import dataclass

import numpy as np

from . import _rotmat, dualquat, quat
from .bvh import MotionClip, ROTATION_CHANNELS, POSITION_CHANNELS, Skeleton
from .errors import NotUnitError, UnsupportedChannelError


@dataclass
class LocalPose:
    """Per-joint local rotations plus the separate root displacement.

    joint_rotations has one row per joint in skeleton order; end sites
    (and any channel-less joints) carry the identity quaternion.
    """

    skeleton: Skeleton
    root_translation: np.ndarray  # (3,)
    joint_rotations: np.ndarray  # (J, 4) unit quaternions

    def __post_init__(self):
        self.root_translation = np.asarray(self.root_translation, dtype=float).reshape(3)
        self.joint_rotations = np.asarray(self.joint_rotations, dtype=float)
        expected = (self.skeleton.num_joints, 4)
        if self.joint_rotations.shape != expected:
            raise ValueError(f"joint_rotations must have shape {expected}")


@dataclass
class CurrentPose:
    """Per-joint unit dual quaternions relative to the root.

    The root entry is a pure rotation (zero dual part); the root
    translation rides along unchanged.
    """

    skeleton: Skeleton
    root_translation: np.ndarray  # (3,)
    joint_dq: np.ndarray  # (J, 8)

    def __post_init__(self):
        self.root_translation = np.asarray(self.root_translation, dtype=float).reshape(3)
        self.joint_dq = np.asarray(self.joint_dq, dtype=float)
        expected = (self.skeleton.num_joints, 8)
        if self.joint_dq.shape != expected:
            raise ValueError(f"joint_dq must have shape {expected}")


def current_chain(skeleton: Skeleton, rotations: np.ndarray) -> np.ndarray:
    """(..., J, 4) local rotations to (..., J, 8) current dual quaternions.

    The root becomes a pure-rotation dual quaternion; each child is its
    parent's current transform times its own local (rotation + offset)
    transform. Leading axes (e.g. time) are processed in one sweep.
    """
    rotations = np.asarray(rotations, dtype=float)
    current = np.zeros(rotations.shape[:-1] + (8,))
    for idx, joint in enumerate(skeleton.joints):
        rot = rotations[..., idx, :]
        if joint.parent is None:
            norms = np.linalg.norm(rot, axis=-1)
            if np.any(np.abs(norms - 1.0) > dualquat.UNIT_TOLERANCE):
                raise NotUnitError("root rotation is not a unit quaternion")
            current[..., idx, :4] = rot / norms[..., None]
        else:
            offset = np.broadcast_to(joint.offset, rot.shape[:-1] + (3,))
            local = dualquat.from_rotation_translation(rot, offset)
            current[..., idx, :] = dualquat.mul(current[..., joint.parent, :], local)
    return current


def local_to_current(pose: LocalPose) -> CurrentPose:
    """Chain one pose's local transforms into root-relative dual quaternions.

    The translation of joint j's entry is j's position relative to the
    root; batched callers use `current_chain` directly.
    """
    return CurrentPose(
        skeleton=pose.skeleton,
        root_translation=pose.root_translation.copy(),
        joint_dq=current_chain(pose.skeleton, pose.joint_rotations),
    )


def current_to_local_dq(pose: CurrentPose) -> np.ndarray:
    """Per-joint local dual quaternions recovered from current ones.

    Each entry is inverse(parent current) * own current; its rotation is
    the joint's local rotation and its translation is the joint offset as
    actually encoded, which the offset loss compares against the skeleton.
    """
    current = pose.joint_dq
    if not dualquat.is_unit(current):
        raise NotUnitError("current pose entries must be unit dual quaternions")
    parents = pose.skeleton.parent_indices
    local = np.empty_like(current)
    for idx in range(len(current)):
        if parents[idx] < 0:
            local[idx] = current[idx]
        else:
            local[idx] = dualquat.mul(dualquat.conjugate(current[parents[idx]]), current[idx])
    return local


def current_to_local(pose: CurrentPose) -> LocalPose:
    """Inverse of local_to_current (rotations recovered up to sign)."""
    local = current_to_local_dq(pose)
    return LocalPose(
        skeleton=pose.skeleton,
        root_translation=pose.root_translation.copy(),
        joint_rotations=local[:, :4].copy(),
    )


def matrix_fk(pose: LocalPose) -> tuple[np.ndarray, np.ndarray]:
    """Root-centered forward kinematics via homogeneous matrices.

    Returns (J, 3, 3) current rotation matrices and (J, 3) current
    positions. This path never touches dual quaternions; it is the
    verification oracle for the chain above.
    """
    skeleton = pose.skeleton
    n = skeleton.num_joints
    rotations = np.empty((n, 3, 3))
    positions = np.empty((n, 3))
    local_mats = _rotmat.quat_to_matrix(quat.normalize(pose.joint_rotations))
    for idx, joint in enumerate(skeleton.joints):
        if joint.parent is None:
            rotations[idx] = local_mats[idx]
            positions[idx] = 0.0
        else:
            parent = joint.parent
            rotations[idx] = rotations[parent] @ local_mats[idx]
            positions[idx] = positions[parent] + rotations[parent] @ joint.offset
    return rotations, positions


# ---------------------------------------------------------------------------
# clip conversion (the degrees/radians boundary)
# ---------------------------------------------------------------------------

def _channel_layout(skeleton: Skeleton):
    """Column index of every channel, grouped per joint."""
    layout = []
    column = 0
    for joint in skeleton.joints:
        entry = {"position": {}, "rotation": []}
        for tag in joint.channels:
            if tag in POSITION_CHANNELS:
                entry["position"][tag[0]] = column
            elif tag in ROTATION_CHANNELS:
                entry["rotation"].append((tag[0], column))
            else:
                raise UnsupportedChannelError(0, f"unknown channel tag {tag!r}")
            column += 1
        layout.append(entry)
    return layout


def clip_to_local(clip: MotionClip) -> list[LocalPose]:
    """Expand a raw clip into per-frame LocalPoses (radians, quaternions)."""
    skeleton = clip.skeleton
    layout = _channel_layout(skeleton)
    n_frames = clip.num_frames
    n_joints = skeleton.num_joints

    rotations = np.zeros((n_frames, n_joints, 4))
    rotations[..., 0] = 1.0
    for idx, entry in enumerate(layout):
        if not entry["rotation"]:
            continue
        order = "".join(axis for axis, _ in entry["rotation"])
        angles = np.zeros((n_frames, 3))
        for axis, column in entry["rotation"]:
            angles[:, "XYZ".index(axis)] = np.radians(clip.frames[:, column])
        rotations[:, idx] = quat.from_euler(angles, order)

    root_translation = np.zeros((n_frames, 3))
    for axis, column in layout[0]["position"].items():
        root_translation[:, "XYZ".index(axis)] = clip.frames[:, column]

    return [
        LocalPose(
            skeleton=skeleton,
            root_translation=root_translation[f],
            joint_rotations=rotations[f],
        )
        for f in range(n_frames)
    ]


def local_to_clip(poses: list[LocalPose], template: Skeleton, frame_time: float) -> MotionClip:
    """Flatten LocalPoses back into a raw channel matrix (degrees)."""
    if not poses:
        raise ValueError("need at least one pose")
    layout = _channel_layout(template)
    frames = np.zeros((len(poses), template.channel_count))
    for f, pose in enumerate(poses):
        if pose.skeleton is not template and pose.skeleton != template:
            raise ValueError("pose skeleton does not match the template")
        for axis, column in layout[0]["position"].items():
            frames[f, column] = pose.root_translation["XYZ".index(axis)]
        for idx, entry in enumerate(layout):
            if not entry["rotation"]:
                continue
            order = "".join(axis for axis, _ in entry["rotation"])
            angles = quat.to_euler(pose.joint_rotations[idx], order)
            for axis, column in entry["rotation"]:
                frames[f, column] = np.degrees(angles["XYZ".index(axis)])
    return MotionClip(skeleton=template, frame_time=frame_time, frames=frames)
