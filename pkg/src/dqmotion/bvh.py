"""BVH motion-capture file model: parse, write, subsample.

The parser is a faithful file model: channel values stay in file units
(degrees for rotations), channel order is preserved verbatim per joint,
and End Site blocks are retained as channel-less joints so end-effector
offsets survive. Degrees/radians conversion happens exactly once, in the
kinematics layer, never here.

Accepted input is tolerant about whitespace (spaces, tabs, CRLF); output
is canonical: LF newlines, two-space indentation, six decimal places.
"""

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadRateError,
    BvhSyntaxError,
    ChannelMismatchError,
    UnsupportedChannelError,
)

POSITION_CHANNELS = ("Xposition", "Yposition", "Zposition")
ROTATION_CHANNELS = ("Xrotation", "Yrotation", "Zrotation")
_CHANNEL_TAGS = set(POSITION_CHANNELS) | set(ROTATION_CHANNELS)


@dataclass
class JointSpec:
    """One node of the hierarchy, end sites included."""

    name: str
    parent: int | None
    offset: np.ndarray
    channels: tuple[str, ...]
    is_end_site: bool = False

    def __post_init__(self):
        self.offset = np.asarray(self.offset, dtype=float).reshape(3)
        self.channels = tuple(self.channels)

    @property
    def rotation_order(self) -> str:
        """Composition order of the rotation channels, e.g. 'ZYX'."""
        return "".join(tag[0] for tag in self.channels if tag in ROTATION_CHANNELS)


@dataclass(eq=False)
class Skeleton:
    """Joint hierarchy in topological order; joint 0 is the single root."""

    joints: list[JointSpec]

    def __post_init__(self):
        if not self.joints:
            raise ValueError("skeleton needs at least one joint")
        if self.joints[0].parent is not None:
            raise ValueError("joint 0 must be the root (parent None)")
        names = set()
        for idx, joint in enumerate(self.joints):
            if idx > 0 and (joint.parent is None or not 0 <= joint.parent < idx):
                raise ValueError(f"joint {joint.name!r} breaks topological parent order")
            if joint.name in names:
                raise ValueError(f"duplicate joint name {joint.name!r}")
            names.add(joint.name)
            if not np.all(np.isfinite(joint.offset)):
                raise ValueError(f"non-finite offset on joint {joint.name!r}")
            for tag in joint.channels:
                if tag not in _CHANNEL_TAGS:
                    raise ValueError(f"unknown channel tag {tag!r}")
            if len(set(joint.channels)) != len(joint.channels):
                raise ValueError(f"duplicate channel tag on joint {joint.name!r}")
            if joint.is_end_site and joint.channels:
                raise ValueError("end sites carry no channels")
            if idx > 0 and not joint.is_end_site:
                if any(tag in POSITION_CHANNELS for tag in joint.channels):
                    raise ValueError("position channels are only allowed on the root")
            if idx > 0 and self.joints[joint.parent].is_end_site:
                raise ValueError("end sites cannot have children")

    # -- derived views -----------------------------------------------------

    @property
    def root_index(self) -> int:
        return 0

    @property
    def num_joints(self) -> int:
        return len(self.joints)

    @property
    def names(self) -> list[str]:
        return [j.name for j in self.joints]

    @property
    def parent_indices(self) -> np.ndarray:
        """Parent index per joint, -1 for the root."""
        return np.array([-1 if j.parent is None else j.parent for j in self.joints])

    @property
    def offsets(self) -> np.ndarray:
        return np.array([j.offset for j in self.joints])

    @property
    def channel_count(self) -> int:
        return sum(len(j.channels) for j in self.joints)

    @property
    def encoded_indices(self) -> tuple[int, ...]:
        """Joints that enter feature vectors: everything but end sites."""
        return tuple(i for i, j in enumerate(self.joints) if not j.is_end_site)

    @property
    def num_encoded(self) -> int:
        return len(self.encoded_indices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Skeleton):
            return NotImplemented
        if len(self.joints) != len(other.joints):
            return False
        return all(
            a.name == b.name
            and a.parent == b.parent
            and a.channels == b.channels
            and a.is_end_site == b.is_end_site
            and np.array_equal(a.offset, b.offset)
            for a, b in zip(self.joints, other.joints)
        )

    def to_dict(self) -> dict:
        return {
            "joints": [
                {
                    "name": j.name,
                    "parent": j.parent,
                    "offset": [float(v) for v in j.offset],
                    "channels": list(j.channels),
                    "end_site": j.is_end_site,
                }
                for j in self.joints
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Skeleton":
        return cls(
            [
                JointSpec(
                    name=j["name"],
                    parent=j["parent"],
                    offset=np.array(j["offset"], dtype=float),
                    channels=tuple(j["channels"]),
                    is_end_site=bool(j["end_site"]),
                )
                for j in data["joints"]
            ]
        )


@dataclass
class MotionClip:
    """Raw motion: a skeleton plus the frame matrix exactly as stored."""

    skeleton: Skeleton
    frame_time: float
    frames: np.ndarray  # (F, C), rotations in degrees, root translation in file units

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float)
        if self.frames.ndim != 2 or self.frames.shape[0] < 1:
            raise ValueError("frames must be a (F >= 1, C) matrix")
        if self.frames.shape[1] != self.skeleton.channel_count:
            raise ValueError(
                f"frame width {self.frames.shape[1]} != declared channel count "
                f"{self.skeleton.channel_count}"
            )
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("non-finite channel values")
        if not (self.frame_time > 0):
            raise ValueError("frame_time must be positive")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def fps(self) -> float:
        return 1.0 / self.frame_time


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

@dataclass
class _Tokens:
    """Line-oriented token stream that remembers line numbers for errors."""

    lines: list[tuple[int, list[str]]]
    pos: int = 0
    last_line: int = field(default=0)

    @classmethod
    def from_text(cls, text: str) -> "_Tokens":
        lines = []
        for number, raw in enumerate(text.splitlines(), start=1):
            tokens = raw.replace("\t", " ").split()
            if tokens:
                lines.append((number, tokens))
        return cls(lines)

    def eof(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self) -> list[str]:
        if self.eof():
            raise BvhSyntaxError(self.last_line, "unexpected end of file")
        return self.lines[self.pos][1]

    def next(self) -> list[str]:
        tokens = self.peek()
        self.last_line = self.lines[self.pos][0]
        self.pos += 1
        return tokens

    @property
    def line(self) -> int:
        if self.eof():
            return self.last_line
        return self.lines[self.pos][0]

    def error(self, message: str) -> BvhSyntaxError:
        return BvhSyntaxError(self.last_line, message)


def _parse_offset(tokens: _Tokens) -> np.ndarray:
    row = tokens.next()
    if row[0] != "OFFSET" or len(row) != 4:
        raise tokens.error("expected 'OFFSET x y z'")
    try:
        return np.array([float(v) for v in row[1:]])
    except ValueError:
        raise tokens.error("OFFSET values must be numeric") from None


def _parse_channels(tokens: _Tokens) -> tuple[str, ...]:
    row = tokens.next()
    if row[0] != "CHANNELS" or len(row) < 2:
        raise tokens.error("expected 'CHANNELS n tags...'")
    try:
        count = int(row[1])
    except ValueError:
        raise tokens.error("CHANNELS count must be an integer") from None
    tags = tuple(row[2:])
    if len(tags) != count:
        raise tokens.error(f"CHANNELS declares {count} tags but lists {len(tags)}")
    for tag in tags:
        if tag not in _CHANNEL_TAGS:
            raise UnsupportedChannelError(tokens.last_line, f"unknown channel tag {tag!r}")
    return tags


def _expect(tokens: _Tokens, literal: str):
    row = tokens.next()
    if row != [literal]:
        raise tokens.error(f"expected {literal!r}")


def _parse_joint(tokens: _Tokens, joints: list[JointSpec], parent: int | None, keyword: str):
    header = tokens.next()
    if header[0] != keyword or len(header) < 2:
        raise tokens.error(f"expected '{keyword} name'")
    name = "_".join(header[1:])
    index = len(joints)
    _expect(tokens, "{")
    offset = _parse_offset(tokens)
    channels = _parse_channels(tokens)
    if parent is not None and any(tag in POSITION_CHANNELS for tag in channels):
        raise BvhSyntaxError(tokens.last_line, "position channels are only allowed on the root")
    joints.append(JointSpec(name=name, parent=parent, offset=offset, channels=channels))

    saw_end_site = False
    while True:
        row = tokens.peek()
        if row[0] == "JOINT":
            _parse_joint(tokens, joints, index, "JOINT")
        elif row[:2] == ["End", "Site"]:
            if saw_end_site:
                raise BvhSyntaxError(tokens.line, "multiple End Site blocks in one joint")
            saw_end_site = True
            tokens.next()
            _expect(tokens, "{")
            end_offset = _parse_offset(tokens)
            joints.append(
                JointSpec(
                    name=f"{name}_end",
                    parent=index,
                    offset=end_offset,
                    channels=(),
                    is_end_site=True,
                )
            )
            _expect(tokens, "}")
        elif row == ["}"]:
            tokens.next()
            return
        else:
            raise BvhSyntaxError(tokens.line, f"unexpected token {row[0]!r} in joint block")


def parse(text: str | bytes) -> MotionClip:
    """Parse BVH text into a MotionClip.

    Raises BvhSyntaxError (line-anchored) on malformed structure,
    UnsupportedChannelError on unknown channel tags, and
    ChannelMismatchError when a motion row width disagrees with the
    declared channels.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8-sig")  # some exporters prepend a BOM
    tokens = _Tokens.from_text(text)

    if tokens.eof() or tokens.next() != ["HIERARCHY"]:
        raise tokens.error("expected 'HIERARCHY'")
    joints: list[JointSpec] = []
    _parse_joint(tokens, joints, None, "ROOT")
    if tokens.peek()[0] == "ROOT":
        raise BvhSyntaxError(tokens.line, "multiple ROOT joints are not supported")
    _expect(tokens, "MOTION")

    row = tokens.next()
    if row[0] != "Frames:" or len(row) != 2:
        raise tokens.error("expected 'Frames: n'")
    try:
        num_frames = int(row[1])
    except ValueError:
        raise tokens.error("frame count must be an integer") from None
    if num_frames < 1:
        raise tokens.error("frame count must be at least 1")

    row = tokens.next()
    if row[:2] != ["Frame", "Time:"] or len(row) != 3:
        raise tokens.error("expected 'Frame Time: t'")
    try:
        frame_time = float(row[2])
    except ValueError:
        raise tokens.error("frame time must be numeric") from None
    if not frame_time > 0:
        raise tokens.error("frame time must be positive")

    try:
        skeleton = Skeleton(joints)
    except ValueError as exc:
        raise BvhSyntaxError(tokens.last_line, str(exc)) from None

    width = skeleton.channel_count
    frames = np.empty((num_frames, width))
    for i in range(num_frames):
        row = tokens.next()
        if len(row) != width:
            raise ChannelMismatchError(
                tokens.last_line,
                f"motion row has {len(row)} values, {width} channels declared",
            )
        try:
            frames[i] = [float(v) for v in row]
        except ValueError:
            raise ChannelMismatchError(tokens.last_line, "non-numeric channel value") from None
        if not np.all(np.isfinite(frames[i])):
            raise ChannelMismatchError(tokens.last_line, "non-finite channel value")
    if not tokens.eof():
        raise BvhSyntaxError(tokens.line, "trailing content after declared frames")

    try:
        return MotionClip(skeleton=skeleton, frame_time=frame_time, frames=frames)
    except ValueError as exc:
        raise BvhSyntaxError(tokens.last_line, str(exc)) from None


def parse_file(path) -> MotionClip:
    with open(path, "rb") as handle:
        return parse(handle.read())


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

def _write_joint(out: list[str], skeleton: Skeleton, index: int, depth: int):
    joint = skeleton.joints[index]
    pad = "  " * depth
    if joint.is_end_site:
        out.append(f"{pad}End Site")
        out.append(f"{pad}{{")
        out.append(f"{pad}  OFFSET {joint.offset[0]:.6f} {joint.offset[1]:.6f} {joint.offset[2]:.6f}")
        out.append(f"{pad}}}")
        return
    keyword = "ROOT" if joint.parent is None else "JOINT"
    out.append(f"{pad}{keyword} {joint.name}")
    out.append(f"{pad}{{")
    out.append(f"{pad}  OFFSET {joint.offset[0]:.6f} {joint.offset[1]:.6f} {joint.offset[2]:.6f}")
    if joint.channels:
        out.append(f"{pad}  CHANNELS {len(joint.channels)} " + " ".join(joint.channels))
    else:
        out.append(f"{pad}  CHANNELS 0")
    for child, spec in enumerate(skeleton.joints):
        if spec.parent == index:
            _write_joint(out, skeleton, child, depth + 1)
    out.append(f"{pad}}}")


def write(clip: MotionClip) -> str:
    """Serialize a MotionClip as canonical BVH text."""
    out = ["HIERARCHY"]
    _write_joint(out, clip.skeleton, 0, 0)
    out.append("MOTION")
    out.append(f"Frames: {clip.num_frames}")
    out.append(f"Frame Time: {clip.frame_time:.6f}")
    for row in clip.frames:
        out.append(" ".join(f"{v:.6f}" for v in row))
    return "\n".join(out) + "\n"


def write_file(path, clip: MotionClip):
    """Write BVH atomically: the target appears only on success."""
    text = write(clip)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# subsampling
# ---------------------------------------------------------------------------

def subsample(clip: MotionClip, target_fps: float) -> MotionClip:
    """Integer-stride frame decimation to approximately target_fps.

    Keeps every k-th frame with k = round(source_fps / target_fps); the
    frame time scales by k. Raises BadRateError when the target exceeds
    the source rate.
    """
    if not target_fps > 0:
        raise BadRateError("target fps must be positive")
    source_fps = clip.fps
    if target_fps > source_fps + 1e-9:
        raise BadRateError(
            f"target rate {target_fps:g} fps exceeds source rate {source_fps:g} fps"
        )
    stride = max(1, round(source_fps / target_fps))
    return MotionClip(
        skeleton=clip.skeleton,
        frame_time=clip.frame_time * stride,
        frames=clip.frames[::stride].copy(),
    )
