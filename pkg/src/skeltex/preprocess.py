"""Two-subject normalization: main-subject selection, shadow subject, spine scaling."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .skeleton import (BASE_OF_SPINE, LEFT_HIP, MIDDLE_OF_SPINE, NUM_JOINTS, RIGHT_HIP,
                       SPINE_SHOULDER, SkeletonSequence, body_id_key, from_arrays)

log = logging.getLogger(__name__)

DEGENERATE_EPS = 1e-9


class EmptySequenceError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


@dataclass
class Track:
    """One person's joints over the whole sequence.

    Frames where the body was not observed have ``present[t] == False``; their
    joints are filled from the nearest observed frame (previous first).
    """
    body_id: str
    joints: np.ndarray   # (T, 25, 3)
    present: np.ndarray  # (T,) bool

    @property
    def T(self) -> int:
        return len(self.joints)

    def copy(self) -> "Track":
        return Track(self.body_id, self.joints.copy(), self.present.copy())


@dataclass
class NormalizedSequence:
    main: np.ndarray            # (T, 25, 3)
    auxiliary: np.ndarray       # (T, 25, 3)
    shadow_flag: bool           # auxiliary is a copy of main in every frame
    shadow_frames: np.ndarray   # (T,) bool, frames whose auxiliary is the shadow
    source_id: str = "sequence"
    main_id: str = "main"
    auxiliary_id: str = "auxiliary"

    @property
    def T(self) -> int:
        return len(self.main)

    def joints(self) -> np.ndarray:
        """``(T, 50, 3)``: main joints 0..24 then auxiliary joints 25..49."""
        return np.concatenate([self.main, self.auxiliary], axis=1)

    def to_skeleton(self) -> SkeletonSequence:
        aux_id = self.auxiliary_id
        if aux_id == self.main_id:
            aux_id = f"{self.main_id}_shadow"
        return from_arrays([self.main, self.auxiliary], [self.main_id, aux_id], self.source_id)


def _fill_missing(joints: np.ndarray, present: np.ndarray) -> np.ndarray:
    observed = np.flatnonzero(present)
    if len(observed) == 0:
        raise EmptySequenceError("track has no observed frames")
    out = joints.copy()
    for t in np.flatnonzero(~present):
        before = observed[observed < t]
        src = before[-1] if len(before) else observed[0]
        out[t] = joints[src]
    return out


def tracks_from_sequence(seq: SkeletonSequence) -> List[Track]:
    """Group bodies by id into per-person tracks, ordered by body id."""
    ids = sorted(seq.body_ids(), key=body_id_key)
    T = seq.T
    tracks = []
    for body_id in ids:
        joints = np.zeros((T, NUM_JOINTS, 3))
        present = np.zeros(T, dtype=bool)
        for t, frame in enumerate(seq.frames):
            for body in frame:
                if body.body_id == body_id and not present[t]:
                    joints[t] = body.joints
                    present[t] = True
        tracks.append(Track(body_id, _fill_missing(joints, present), present))
    return tracks


def body_frame_transform(frame: np.ndarray) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Rotation and origin taking one camera-space frame to body coordinates.

    Returns ``(R, origin, degenerate)`` with body coordinates ``R @ (p - origin)``.
    """
    origin = frame[MIDDLE_OF_SPINE]
    spine = frame[SPINE_SHOULDER] - frame[BASE_OF_SPINE]
    hips = frame[RIGHT_HIP] - frame[LEFT_HIP]
    spine_norm = np.linalg.norm(spine)
    if spine_norm < DEGENERATE_EPS or np.linalg.norm(hips) < DEGENERATE_EPS:
        return np.eye(3), origin, True
    y = spine / spine_norm
    x = hips - (hips @ y) * y
    x_norm = np.linalg.norm(x)
    if x_norm < DEGENERATE_EPS:
        return np.eye(3), origin, True
    x = x / x_norm
    z = np.cross(x, y)
    return np.stack([x, y, z]), origin, False


def to_body_coordinates(joints: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Express ``(T, 25, 3)`` joints in the per-frame body frame.

    Origin at the middle of the spine, +y along base-of-spine -> spine-shoulder,
    +x along the hip axis (left -> right hip) made orthogonal to y, z = x cross y.
    Degenerate frames keep the camera orientation (translation only) and are
    flagged in the returned ``(T,)`` mask.
    """
    joints = np.asarray(joints, dtype=float)
    out = np.empty_like(joints)
    flags = np.zeros(len(joints), dtype=bool)
    for t, frame in enumerate(joints):
        rot, origin, flags[t] = body_frame_transform(frame)
        out[t] = (frame - origin) @ rot.T
    return out, flags


def variation_score(track: Track) -> float:
    """Sum over joints and axes of the temporal variance, in body coordinates."""
    body, _ = to_body_coordinates(track.joints[track.present])
    return float(body.var(axis=0).sum())


def select_main_subject(seq: SkeletonSequence) -> Tuple[Track, Optional[Track]]:
    """Main = most varying track, other = runner-up; ties go to the lower body id."""
    tracks = tracks_from_sequence(seq)
    if not tracks:
        raise EmptySequenceError(f"{seq.source_id}: no bodies in any frame")
    scored = sorted(((-variation_score(tr), body_id_key(tr.body_id), i) for i, tr in enumerate(tracks)))
    if len(tracks) > 2:
        log.info("%s: %d bodies, keeping the two most varying", seq.source_id, len(tracks))
    main = tracks[scored[0][2]]
    other = tracks[scored[1][2]] if len(scored) > 1 else None
    return main, other


def make_shadow(main: Track) -> Track:
    return main.copy()


def normalize_spine(joints: np.ndarray) -> np.ndarray:
    """Scale every frame about its base of spine so the base->middle spine length is 1.

    Frames with a vanishing spine reuse the last valid frame's scale.
    """
    joints = np.asarray(joints, dtype=float)
    base = joints[:, BASE_OF_SPINE:BASE_OF_SPINE + 1]
    lengths = np.linalg.norm(joints[:, MIDDLE_OF_SPINE] - joints[:, BASE_OF_SPINE], axis=-1)
    scale = lengths.copy()
    last = None
    for t, length in enumerate(lengths):
        if length < DEGENERATE_EPS:
            if last is None:
                raise NormalizationError(f"spine length {length:g} in frame {t} and no earlier valid frame")
            scale[t] = last
        else:
            last = length
    return base + (joints - base) / scale[:, None, None]


def preprocess(seq: SkeletonSequence) -> NormalizedSequence:
    main, other = select_main_subject(seq)
    if other is None:
        aux = make_shadow(main)
        shadow_frames = np.ones(main.T, dtype=bool)
    else:
        aux = other.copy()
        shadow_frames = ~other.present
        aux.joints[shadow_frames] = main.joints[shadow_frames]
    main_joints = normalize_spine(main.joints)
    aux_joints = normalize_spine(aux.joints)
    return NormalizedSequence(
        main=main_joints,
        auxiliary=aux_joints,
        shadow_flag=bool(shadow_frames.all()),
        shadow_frames=shadow_frames,
        source_id=seq.source_id,
        main_id=main.body_id,
        auxiliary_id=aux.body_id,
    )
