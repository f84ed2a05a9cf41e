"""Flat feature encodings of pose sequences.

A pose sequence becomes an (F, 3 + D*J) matrix: the first three columns
hold the root translation, followed by J per-joint blocks of width D.
J counts the skeleton's non-end-site joints. Six block layouts are
supported:

==============================  ===  =========================================
kind                             D   per-joint block
==============================  ===  =========================================
positions                        3   root-relative position
quaternions                      4   local rotation quaternion (w, x, y, z)
ortho6d                          6   first two columns of the local rotation
                                     matrix (column-major)
quaternions_positions            7   local quaternion, then position
dualquat                         8   root-relative unit dual quaternion
ortho6d_positions                9   six-value block, then position
==============================  ===  =========================================

Quaternion and dual-quaternion blocks receive the antipodal sign
correction along time at encode time, once; the correction never changes
the rigid transform a block encodes.
"""

import enum
import json
from dataclasses import dataclass

import numpy as np

from . import _rotmat, dualquat, quat
from .bvh import Skeleton
from .errors import (
    DegenerateNormError,
    NotInvertibleError,
    ShapeMismatchError,
    TooFewFramesError,
)
from .kinematics import LocalPose, current_chain

#: Smallest standard deviation kept when fitting normalization statistics.
STD_FLOOR = 1e-8


class ReprKind(enum.Enum):
    POSITIONS = "positions"
    QUATERNIONS = "quaternions"
    ORTHO6D = "ortho6d"
    QUATERNIONS_POSITIONS = "quaternions_positions"
    DUALQUAT = "dualquat"
    ORTHO6D_POSITIONS = "ortho6d_positions"

    @property
    def block_dim(self) -> int:
        return _BLOCK_DIMS[self]

    @property
    def has_positions(self) -> bool:
        """Whether per-joint positions can be read off the blocks."""
        return self in (
            ReprKind.POSITIONS,
            ReprKind.QUATERNIONS_POSITIONS,
            ReprKind.DUALQUAT,
            ReprKind.ORTHO6D_POSITIONS,
        )

    @property
    def has_rotations(self) -> bool:
        return self is not ReprKind.POSITIONS

    @property
    def sign_sensitive(self) -> bool:
        """Kinds whose blocks carry an antipodal sign (q and -q collide)."""
        return self in (ReprKind.QUATERNIONS, ReprKind.DUALQUAT)


_BLOCK_DIMS = {
    ReprKind.POSITIONS: 3,
    ReprKind.QUATERNIONS: 4,
    ReprKind.ORTHO6D: 6,
    ReprKind.QUATERNIONS_POSITIONS: 7,
    ReprKind.DUALQUAT: 8,
    ReprKind.ORTHO6D_POSITIONS: 9,
}


@dataclass
class NormalizationStats:
    """Per-column mean and (floored) standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(-1)
        self.std = np.asarray(self.std, dtype=float).reshape(-1)
        if self.mean.shape != self.std.shape:
            raise ShapeMismatchError("mean and std must have the same width")
        if np.any(self.std <= 0.0):
            raise ValueError("std must be strictly positive")

    @property
    def width(self) -> int:
        return self.mean.shape[0]


@dataclass
class EncodedClip:
    """Frame-major encoded motion plus its layout metadata.

    `stats` present means the features are stored standardized with those
    statistics; decode and the non-MSE losses want raw features.
    """

    kind: ReprKind
    skeleton: Skeleton
    frame_time: float
    features: np.ndarray  # (F, 3 + D*J)
    stats: NormalizationStats | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        expected = 3 + self.kind.block_dim * self.skeleton.num_encoded
        if self.features.ndim != 2 or self.features.shape[1] != expected:
            raise ShapeMismatchError(
                f"{self.kind.value} features for this skeleton must have width {expected}"
            )
        if self.features.shape[0] < 1:
            raise ValueError("need at least one frame")
        if self.stats is not None and self.stats.width != self.features.shape[1]:
            raise ShapeMismatchError("stats width does not match features")

    @property
    def num_frames(self) -> int:
        return self.features.shape[0]

    @property
    def width(self) -> int:
        return self.features.shape[1]

    @property
    def joint_count(self) -> int:
        return self.skeleton.num_encoded

    @property
    def standardized(self) -> bool:
        return self.stats is not None

    @property
    def root_translation(self) -> np.ndarray:
        return self.features[:, :3]

    def joint_blocks(self) -> np.ndarray:
        """(F, J, D) view of the per-joint blocks."""
        f = self.num_frames
        return self.features[:, 3:].reshape(f, self.joint_count, self.kind.block_dim)


# ---------------------------------------------------------------------------
# antipodal sign correction
# ---------------------------------------------------------------------------

def _seed_signs(first: np.ndarray) -> np.ndarray:
    """Frame-0 sign choice: leading component non-negative, ties broken by
    the first nonzero component."""
    lead = first[..., 0]
    signs = np.where(lead > 0, 1.0, np.where(lead < 0, -1.0, 0.0))
    undecided = np.argwhere(signs == 0.0)
    for index in map(tuple, undecided):
        block = first[index]
        nonzero = block[block != 0.0]
        signs[index] = 1.0 if nonzero.size == 0 or nonzero[0] > 0 else -1.0
    return signs


def antipodal_correct(blocks: np.ndarray) -> np.ndarray:
    """Pick the sign of each quaternion / dual-quaternion block so that it
    is nearest (in Euclidean distance) to the previous corrected frame.

    `blocks` has shape (F, ..., D) with time first. Equivalent condition:
    after correction every consecutive dot product is >= 0. Frame 0 uses
    the deterministic seed rule above. Sign flips never change the rigid
    transform a block encodes.
    """
    blocks = np.asarray(blocks, dtype=float)
    if blocks.shape[0] == 0:
        raise TooFewFramesError("antipodal correction needs at least one frame")
    dots = np.sum(blocks[:-1] * blocks[1:], axis=-1)
    steps = np.where(dots < 0, -1.0, 1.0)
    signs = np.concatenate(
        [_seed_signs(blocks[0])[None], steps], axis=0
    ).cumprod(axis=0)
    return blocks * signs[..., None]


# ---------------------------------------------------------------------------
# encode
# ---------------------------------------------------------------------------

def _local_rotation_stack(poses: list[LocalPose], indices) -> np.ndarray:
    return np.stack([pose.joint_rotations[indices, :] for pose in poses])


def _current_dq_stack(poses: list[LocalPose], indices) -> np.ndarray:
    rotations = np.stack([pose.joint_rotations for pose in poses])
    return current_chain(poses[0].skeleton, rotations)[:, indices, :]


def _ortho6d_of_quats(quats: np.ndarray) -> np.ndarray:
    """First two columns of each rotation matrix, column-major."""
    m = _rotmat.quat_to_matrix(quats)
    return np.concatenate([m[..., :, 0], m[..., :, 1]], axis=-1)


def encode(poses: list[LocalPose], kind: ReprKind, frame_time: float = 1.0 / 30.0) -> EncodedClip:
    """Encode a pose sequence under the requested representation."""
    if not poses:
        raise TooFewFramesError("need at least one pose")
    skeleton = poses[0].skeleton
    for pose in poses[1:]:
        if pose.skeleton is not skeleton and pose.skeleton != skeleton:
            raise ShapeMismatchError("poses reference different skeletons")
    indices = list(skeleton.encoded_indices)
    roots = np.stack([pose.root_translation for pose in poses])

    if kind is ReprKind.DUALQUAT:
        blocks = antipodal_correct(_current_dq_stack(poses, indices))
    elif kind is ReprKind.QUATERNIONS:
        blocks = antipodal_correct(quat.normalize(_local_rotation_stack(poses, indices)))
    elif kind is ReprKind.POSITIONS:
        blocks = dualquat.translation(_current_dq_stack(poses, indices))
    elif kind is ReprKind.ORTHO6D:
        blocks = _ortho6d_of_quats(quat.normalize(_local_rotation_stack(poses, indices)))
    elif kind is ReprKind.QUATERNIONS_POSITIONS:
        current = _current_dq_stack(poses, indices)
        quats = antipodal_correct(quat.normalize(_local_rotation_stack(poses, indices)))
        blocks = np.concatenate([quats, dualquat.translation(current)], axis=-1)
    elif kind is ReprKind.ORTHO6D_POSITIONS:
        current = _current_dq_stack(poses, indices)
        six = _ortho6d_of_quats(quat.normalize(_local_rotation_stack(poses, indices)))
        blocks = np.concatenate([six, dualquat.translation(current)], axis=-1)
    else:  # pragma: no cover
        raise ValueError(kind)

    features = np.concatenate([roots, blocks.reshape(len(poses), -1)], axis=1)
    return EncodedClip(kind=kind, skeleton=skeleton, frame_time=frame_time, features=features)


# ---------------------------------------------------------------------------
# decode
# ---------------------------------------------------------------------------

def _gram_schmidt(blocks: np.ndarray) -> np.ndarray:
    """Rotation matrices from six-value blocks; always orthonormal."""
    a = blocks[..., :3]
    b = blocks[..., 3:6]
    na = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(na <= 1e-12):
        raise DegenerateNormError("degenerate first column in six-value block")
    x = a / na
    b_perp = b - np.sum(x * b, axis=-1, keepdims=True) * x
    nb = np.linalg.norm(b_perp, axis=-1, keepdims=True)
    if np.any(nb <= 1e-12):
        raise DegenerateNormError("six-value block columns are collinear")
    y = b_perp / nb
    z = np.cross(x, y)
    return np.stack([x, y, z], axis=-1)  # columns x, y, z


def _quats_from_ortho6d(blocks: np.ndarray) -> np.ndarray:
    mats = _gram_schmidt(blocks)
    flat = mats.reshape(-1, 3, 3)
    return np.stack([_rotmat.matrix_to_quat(m) for m in flat]).reshape(blocks.shape[:-1] + (4,))


def decode(clip: EncodedClip) -> list[LocalPose]:
    """Recover local poses; the inverse of encode for rotation-bearing kinds.

    Positions alone cannot be inverted (limb roll is unobservable), so the
    positions kind raises NotInvertibleError. Standardized clips must be
    destandardized first.
    """
    if clip.standardized:
        raise ValueError("clip is standardized; call destandardize first")
    if clip.kind is ReprKind.POSITIONS:
        raise NotInvertibleError("positions carry no rotations to decode")

    skeleton = clip.skeleton
    indices = list(skeleton.encoded_indices)
    blocks = clip.joint_blocks()
    f = clip.num_frames

    if clip.kind is ReprKind.DUALQUAT:
        current = dualquat.normalize(blocks)[..., :4]
        # Local rotations fall out of parent-conjugate products; offsets
        # come from the skeleton, and end sites stay at identity.
        rotations = np.zeros((f, skeleton.num_joints, 4))
        rotations[..., 0] = 1.0
        row_of = {joint: row for row, joint in enumerate(indices)}
        for row, joint_idx in enumerate(indices):
            parent = skeleton.joints[joint_idx].parent
            if parent is None:
                rotations[:, joint_idx] = current[:, row]
            else:
                rotations[:, joint_idx] = quat.mul(
                    quat.conjugate(current[:, row_of[parent]]), current[:, row]
                )
        return [
            LocalPose(skeleton, clip.root_translation[frame].copy(), rotations[frame])
            for frame in range(f)
        ]

    if clip.kind in (ReprKind.QUATERNIONS, ReprKind.QUATERNIONS_POSITIONS):
        quats = quat.normalize(blocks[..., :4])
    else:  # ortho6d variants
        quats = _quats_from_ortho6d(blocks[..., :6])

    poses = []
    for frame in range(f):
        rotations = np.zeros((skeleton.num_joints, 4))
        rotations[:, 0] = 1.0
        rotations[indices] = quats[frame]
        poses.append(LocalPose(skeleton, clip.root_translation[frame].copy(), rotations))
    return poses


# ---------------------------------------------------------------------------
# standardization
# ---------------------------------------------------------------------------

def fit_stats(clip: EncodedClip) -> NormalizationStats:
    """Column means and population standard deviations, std floored."""
    if clip.num_frames < 2:
        raise TooFewFramesError("need at least 2 frames to fit statistics")
    mean = clip.features.mean(axis=0)
    std = np.maximum(clip.features.std(axis=0), STD_FLOOR)
    return NormalizationStats(mean=mean, std=std)


def standardize(clip: EncodedClip, stats: NormalizationStats) -> EncodedClip:
    """Affine map (x - mean) / std; the result carries the stats."""
    if stats.width != clip.width:
        raise ShapeMismatchError(
            f"stats width {stats.width} does not match clip width {clip.width}"
        )
    return EncodedClip(
        kind=clip.kind,
        skeleton=clip.skeleton,
        frame_time=clip.frame_time,
        features=(clip.features - stats.mean) / stats.std,
        stats=stats,
    )


def destandardize(clip: EncodedClip, stats: NormalizationStats | None = None) -> EncodedClip:
    """Exact inverse of standardize; the result carries no stats."""
    if stats is None:
        stats = clip.stats
    if stats is None:
        raise ValueError("clip carries no stats and none were given")
    if stats.width != clip.width:
        raise ShapeMismatchError(
            f"stats width {stats.width} does not match clip width {clip.width}"
        )
    return EncodedClip(
        kind=clip.kind,
        skeleton=clip.skeleton,
        frame_time=clip.frame_time,
        features=clip.features * stats.std + stats.mean,
        stats=None,
    )


# ---------------------------------------------------------------------------
# diagnostic JSON
# ---------------------------------------------------------------------------

def to_debug_json(clip: EncodedClip) -> str:
    """Human-inspectable dump. Diagnostic only: decimal text, not the
    bit-exact interchange format (that is the binary container)."""
    payload = {
        "kind": clip.kind.value,
        "frames": clip.num_frames,
        "width": clip.width,
        "block_dim": clip.kind.block_dim,
        "joints": clip.joint_count,
        "frame_time": clip.frame_time,
        "standardized": clip.standardized,
        "skeleton": clip.skeleton.to_dict(),
        "features": clip.features.tolist(),
    }
    if clip.stats is not None:
        payload["stats"] = {
            "mean": clip.stats.mean.tolist(),
            "std": clip.stats.std.tolist(),
        }
    return json.dumps(payload, indent=2)
