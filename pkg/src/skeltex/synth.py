"""Parametric synthetic action sequences for desk-scale testing.

Each class animates a fixed rest pose by rotating a limb chain (or shifting a
joint group) along a sinusoid. The seed perturbs amplitude, tempo, phase,
body size, camera placement and adds small joint jitter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .skeleton import JOINT, NUM_JOINTS, SkeletonSequence, from_arrays

# metres, person facing the camera along -z, y up
REST_POSE = np.array([
    [0.00, 1.00, 0.00],   # base_of_spine
    [0.00, 1.25, 0.00],   # middle_of_spine
    [0.00, 1.52, 0.00],   # neck
    [0.00, 1.65, 0.00],   # head
    [-0.18, 1.42, 0.00],  # left_shoulder
    [-0.20, 1.15, 0.00],  # left_elbow
    [-0.21, 0.92, 0.00],  # left_wrist
    [-0.21, 0.85, 0.00],  # left_hand
    [0.18, 1.42, 0.00],   # right_shoulder
    [0.20, 1.15, 0.00],   # right_elbow
    [0.21, 0.92, 0.00],   # right_wrist
    [0.21, 0.85, 0.00],   # right_hand
    [-0.10, 0.98, 0.00],  # left_hip
    [-0.10, 0.55, 0.02],  # left_knee
    [-0.10, 0.10, 0.00],  # left_ankle
    [-0.10, 0.05, 0.10],  # left_foot
    [0.10, 0.98, 0.00],   # right_hip
    [0.10, 0.55, 0.02],   # right_knee
    [0.10, 0.10, 0.00],   # right_ankle
    [0.10, 0.05, 0.10],   # right_foot
    [0.00, 1.45, 0.00],   # spine_shoulder
    [-0.21, 0.78, 0.00],  # left_hand_tip
    [-0.18, 0.86, 0.03],  # left_thumb
    [0.21, 0.78, 0.00],   # right_hand_tip
    [0.18, 0.86, 0.03],   # right_thumb
])
assert REST_POSE.shape == (NUM_JOINTS, 3)

_J = JOINT
RIGHT_ARM = [_J[n] for n in ("right_elbow", "right_wrist", "right_hand", "right_hand_tip", "right_thumb")]
RIGHT_FOREARM = RIGHT_ARM[1:]
LEFT_ARM = [_J[n] for n in ("left_elbow", "left_wrist", "left_hand", "left_hand_tip", "left_thumb")]
RIGHT_LEG = [_J[n] for n in ("right_knee", "right_ankle", "right_foot")]
UPPER_BODY = [_J[n] for n in ("middle_of_spine", "spine_shoulder", "neck", "head")] + \
    [_J[n] for n in ("left_shoulder", "right_shoulder")] + LEFT_ARM + RIGHT_ARM
ABOVE_KNEES = [j for j in range(NUM_JOINTS) if j not in
               (_J["left_ankle"], _J["left_foot"], _J["right_ankle"], _J["right_foot"],
                _J["left_knee"], _J["right_knee"])]


@dataclass(frozen=True)
class MotionClass:
    name: str
    kind: str                 # "rotate" or "shift"
    joints: Tuple[int, ...]
    pivot: int                # rotate: joint the chain turns about
    axis: Tuple[float, float, float]
    amplitude: float          # radians for rotate, metres for shift
    cycles: float             # sinusoid periods over the sequence
    offset: float = 0.0       # constant added to the rotation angle
    one_sided: bool = False   # (1 - cos)/2 profile instead of sin


MOTION_CLASSES = (
    MotionClass("arm_raise", "rotate", tuple(RIGHT_ARM), _J["right_shoulder"], (0, 0, 1), 2.4, 1.0, one_sided=True),
    MotionClass("squat", "shift", tuple(ABOVE_KNEES), 0, (0, -1, 0), 0.35, 2.0, one_sided=True),
    MotionClass("wave", "rotate", tuple(RIGHT_FOREARM), _J["right_elbow"], (0, 0, 1), 0.5, 4.0, offset=2.6),
    MotionClass("kick", "rotate", tuple(RIGHT_LEG), _J["right_hip"], (1, 0, 0), -1.2, 2.0, one_sided=True),
    MotionClass("bow", "rotate", tuple(UPPER_BODY), _J["base_of_spine"], (1, 0, 0), -0.9, 1.0, one_sided=True),
)
CLASS_NAMES = tuple(m.name for m in MOTION_CLASSES)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    x, y, z = axis
    k = np.array([[0, -z, y], [z, 0, -x], [-y, x, 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random proper rotation (QR of a Gaussian matrix)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _profile(motion: MotionClass, phase_t: np.ndarray) -> np.ndarray:
    if motion.one_sided:
        return (1 - np.cos(phase_t)) / 2
    return np.sin(phase_t)


def animate(motion: MotionClass, T: int, amplitude: float, cycles: float, phase: float,
            rest: np.ndarray = REST_POSE) -> np.ndarray:
    """Return ``(T, 25, 3)`` joint positions for one motion on ``rest``."""
    t = np.arange(T) / max(T - 1, 1)
    s = amplitude * _profile(motion, 2 * np.pi * cycles * t + phase)
    out = np.repeat(rest[None], T, axis=0)
    idx = list(motion.joints)
    if motion.kind == "shift":
        out[:, idx] += s[:, None, None] * np.asarray(motion.axis, dtype=float)
        return out
    pivot = rest[motion.pivot]
    for i in range(T):
        if s[i] == 0.0 and motion.offset == 0.0:
            continue
        rot = rotation_matrix(motion.axis, motion.offset + s[i])
        out[i, idx] = (rest[idx] - pivot) @ rot.T + pivot
    return out


def synthesize_sequence(class_id: int, seed: int, T: int, *, amplitude_scale: float = 1.0,
                        noise: float = 0.005, bodies: int = 1,
                        source_id: Optional[str] = None) -> SkeletonSequence:
    """Deterministic synthetic sequence of motion class ``class_id``.

    With ``amplitude_scale=0`` and ``noise=0`` the rest pose is repeated
    ``T`` times (still subject to the seeded camera placement). ``bodies=2``
    adds a second, mostly idle person standing beside the first.
    """
    if not 0 <= class_id < len(MOTION_CLASSES):
        raise ValueError(f"unknown class_id {class_id}; expected 0..{len(MOTION_CLASSES) - 1}")
    if T < 2:
        raise ValueError(f"T must be at least 2, got {T}")
    if bodies not in (1, 2):
        raise ValueError("bodies must be 1 or 2")

    rng = np.random.default_rng([seed, class_id])
    motion = MOTION_CLASSES[class_id]
    size = rng.uniform(0.9, 1.1)
    amp = motion.amplitude * amplitude_scale * rng.uniform(0.85, 1.15)
    cycles = motion.cycles * rng.uniform(0.9, 1.1)
    phase = rng.uniform(-0.3, 0.3) if not motion.one_sided else 0.0
    yaw = rng.uniform(-0.5, 0.5)
    shift = np.array([rng.uniform(-0.5, 0.5), rng.uniform(-0.2, 0.2), rng.uniform(2.5, 3.5)])

    rest = REST_POSE * size
    tracks = [animate(motion, T, amp, cycles, phase, rest)]
    if bodies == 2:
        idle = MOTION_CLASSES[2]  # a small wave
        second = animate(idle, T, 0.15 * amplitude_scale, 1.0, 0.0, REST_POSE * rng.uniform(0.9, 1.1))
        second = second + np.array([0.9, 0.0, 0.3])
        tracks.append(second)

    cam = rotation_matrix((0, 1, 0), yaw)
    out = []
    for track in tracks:
        track = track @ cam.T + shift
        if noise > 0:
            track = track + rng.normal(0.0, noise, track.shape)
        out.append(track)
    ids = [str(1000 + 7 * class_id + b) for b in range(len(out))]
    return from_arrays(out, ids, source_id or f"synth_c{class_id}_s{seed}_t{T}")
