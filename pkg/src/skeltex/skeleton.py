"""Skeleton sequence model and the NTU-style text format.

The on-disk layout is line oriented::

    T
    B                      # bodies in frame 1
    <body_id> [extra ...]  # one header line per body
    [25]                   # optional joint-count line (present in NTU files)
    x y z [extra ...]      # 25 joint lines
    ...

Real NTU RGB+D ``.skeleton`` files carry ten fields on the body header line
and twelve per joint, plus a joint-count line; all of that is accepted and
only ``body_id`` and ``x y z`` are kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

NUM_JOINTS = 25

# 0-based indices; NTU documentation numbers joints 1..25.
JOINT_NAMES = (
    "base_of_spine",      # 0
    "middle_of_spine",    # 1
    "neck",               # 2
    "head",               # 3
    "left_shoulder",      # 4
    "left_elbow",         # 5
    "left_wrist",         # 6
    "left_hand",          # 7
    "right_shoulder",     # 8
    "right_elbow",        # 9
    "right_wrist",        # 10
    "right_hand",         # 11
    "left_hip",           # 12
    "left_knee",          # 13
    "left_ankle",         # 14
    "left_foot",          # 15
    "right_hip",          # 16
    "right_knee",         # 17
    "right_ankle",        # 18
    "right_foot",         # 19
    "spine_shoulder",     # 20
    "left_hand_tip",      # 21
    "left_thumb",         # 22
    "right_hand_tip",     # 23
    "right_thumb",        # 24
)
JOINT = {name: i for i, name in enumerate(JOINT_NAMES)}

BASE_OF_SPINE = JOINT["base_of_spine"]
MIDDLE_OF_SPINE = JOINT["middle_of_spine"]
SPINE_SHOULDER = JOINT["spine_shoulder"]
LEFT_HIP = JOINT["left_hip"]
RIGHT_HIP = JOINT["right_hip"]

# Kinematic tree, 24 bones.
BONES = (
    (0, 1), (1, 20), (20, 2), (2, 3),
    (20, 4), (4, 5), (5, 6), (6, 7), (7, 21), (7, 22),
    (20, 8), (8, 9), (9, 10), (10, 11), (11, 23), (11, 24),
    (0, 12), (12, 13), (13, 14), (14, 15),
    (0, 16), (16, 17), (17, 18), (18, 19),
)


class SkeletonParseError(ValueError):
    """Malformed skeleton file; ``line`` is 1-based."""

    def __init__(self, message: str, path: Union[str, Path, None] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        if path is not None:
            where = f"{path}:{line}" if line is not None else f"{path}"
        else:
            where = f"line {line}" if line is not None else ""
        super().__init__(f"{where}: {message}" if where else message)


class SkeletonDataError(ValueError):
    """Well-formed file carrying unusable values (NaN/Inf coordinates)."""

    def __init__(self, message: str, frame: int, joint: int):
        self.frame = frame
        self.joint = joint
        super().__init__(f"frame {frame}, joint {joint}: {message}")


@dataclass
class BodyFrame:
    body_id: str
    joints: np.ndarray  # (25, 3) float64

    def __post_init__(self):
        self.body_id = str(self.body_id)
        self.joints = np.asarray(self.joints, dtype=np.float64)
        if self.joints.shape != (NUM_JOINTS, 3):
            raise ValueError(f"expected ({NUM_JOINTS}, 3) joints, got {self.joints.shape}")

    def __eq__(self, other):
        if not isinstance(other, BodyFrame):
            return NotImplemented
        return self.body_id == other.body_id and np.array_equal(self.joints, other.joints)


@dataclass
class SkeletonSequence:
    frames: List[List[BodyFrame]]
    source_id: str = "sequence"

    def __post_init__(self):
        if len(self.frames) < 1:
            raise ValueError("a skeleton sequence needs at least one frame")

    @property
    def T(self) -> int:
        return len(self.frames)

    def body_ids(self) -> List[str]:
        """Distinct body ids in order of first appearance."""
        seen = {}
        for frame in self.frames:
            for body in frame:
                seen.setdefault(body.body_id, None)
        return list(seen)

    def empty_frames(self) -> List[int]:
        return [t for t, frame in enumerate(self.frames) if not frame]

    def bodies_per_frame(self) -> dict:
        hist = {}
        for frame in self.frames:
            hist[len(frame)] = hist.get(len(frame), 0) + 1
        return dict(sorted(hist.items()))

    def __eq__(self, other):
        if not isinstance(other, SkeletonSequence):
            return NotImplemented
        return self.source_id == other.source_id and self.frames == other.frames


def body_id_key(body_id: str):
    """Sort key: numeric ids compare as integers, others as strings after them."""
    try:
        return (0, int(body_id), "")
    except ValueError:
        return (1, 0, body_id)


class _Lines:
    def __init__(self, text: str, path):
        self.lines = text.splitlines()
        self.pos = 0
        self.path = path

    def next_tokens(self, what: str) -> List[str]:
        while self.pos < len(self.lines):
            self.pos += 1
            toks = self.lines[self.pos - 1].split()
            if toks:
                return toks
        raise SkeletonParseError(f"unexpected end of file while reading {what}", self.path, self.pos + 1)

    def peek_tokens(self) -> Optional[List[str]]:
        pos = self.pos
        while pos < len(self.lines):
            toks = self.lines[pos].split()
            if toks:
                return toks
            pos += 1
        return None

    def error(self, message: str) -> SkeletonParseError:
        return SkeletonParseError(message, self.path, self.pos)


def _parse_int(lines: _Lines, toks: List[str], what: str) -> int:
    try:
        value = int(toks[0])
    except ValueError:
        raise lines.error(f"expected integer {what}, got {toks[0]!r}") from None
    if value < 0:
        raise lines.error(f"negative {what}: {value}")
    return value


def parse_skeleton_text(text: str, source_id: str = "sequence", path=None) -> SkeletonSequence:
    lines = _Lines(text, path)
    toks = lines.next_tokens("frame count")
    if len(toks) != 1:
        raise lines.error("header must hold a single frame count")
    n_frames = _parse_int(lines, toks, "frame count")
    if n_frames < 1:
        raise lines.error("frame count must be positive")

    frames = []
    for t in range(n_frames):
        toks = lines.next_tokens(f"body count of frame {t}")
        n_bodies = _parse_int(lines, toks, f"body count of frame {t}")
        bodies = []
        for _ in range(n_bodies):
            body_id = lines.next_tokens(f"body header in frame {t}")[0]
            nxt = lines.peek_tokens()
            if nxt is not None and len(nxt) == 1:
                toks = lines.next_tokens("joint count")
                n_joints = _parse_int(lines, toks, "joint count")
                if n_joints != NUM_JOINTS:
                    raise lines.error(f"body {body_id} in frame {t} declares {n_joints} joints, expected {NUM_JOINTS}")
            joints = np.empty((NUM_JOINTS, 3))
            for j in range(NUM_JOINTS):
                toks = lines.next_tokens(f"joint {j} of body {body_id} in frame {t}")
                if len(toks) < 3:
                    raise lines.error(
                        f"body {body_id} in frame {t} has {j} joints, expected {NUM_JOINTS}"
                        f" (line holds {len(toks)} field(s), a joint needs 3)")
                try:
                    xyz = [float(v) for v in toks[:3]]
                except ValueError:
                    raise lines.error(f"non-numeric coordinate in {toks[:3]}") from None
                if not all(math.isfinite(v) for v in xyz):
                    raise SkeletonDataError("non-finite coordinate", frame=t, joint=j)
                joints[j] = xyz
            bodies.append(BodyFrame(body_id, joints))
        frames.append(bodies)

    if lines.peek_tokens() is not None:
        lines.next_tokens("trailing data")
        raise lines.error(f"trailing data after {n_frames} declared frames")
    return SkeletonSequence(frames, source_id)


def parse_skeleton_file(path: Union[str, Path]) -> SkeletonSequence:
    path = Path(path)
    return parse_skeleton_text(path.read_text(), source_id=path.stem, path=path)


def format_skeleton(seq: SkeletonSequence) -> str:
    # repr() round-trips float64 exactly
    out = [str(seq.T)]
    for frame in seq.frames:
        out.append(str(len(frame)))
        for body in frame:
            out.append(body.body_id)
            out.extend(f"{x!r} {y!r} {z!r}" for x, y, z in body.joints.tolist())
    return "\n".join(out) + "\n"


def write_skeleton_file(seq: SkeletonSequence, path: Union[str, Path]) -> None:
    Path(path).write_text(format_skeleton(seq))


def from_arrays(tracks: Sequence[np.ndarray], body_ids: Sequence[str], source_id: str = "sequence",
                present: Optional[Sequence[np.ndarray]] = None) -> SkeletonSequence:
    """Build a sequence from per-body ``(T, 25, 3)`` arrays.

    ``present`` optionally masks, per body, which frames the body appears in.
    """
    T = len(tracks[0])
    frames = []
    for t in range(T):
        frame = []
        for b, track in enumerate(tracks):
            if present is not None and not present[b][t]:
                continue
            frame.append(BodyFrame(body_ids[b], track[t].copy()))
        frames.append(frame)
    return SkeletonSequence(frames, source_id)
