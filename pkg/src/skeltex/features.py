"""Evaluate a selection plan over a normalized sequence."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import geometry
from .preprocess import NormalizedSequence
from .selection import SelectionPlan, VECTOR_FAMILIES


@dataclass
class FeatureMatrix:
    family: str
    strategy: str
    values: np.ndarray    # (N, T) scalars or (N, T, 3) vectors
    subjects: np.ndarray  # (N,) "main" / "auxiliary" / "cross"

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 3

    @property
    def label(self) -> str:
        return f"{self.family}-{self.strategy}"


def evaluate(family: str, joints: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Feature values for ``(T, J, 3)`` joints; returns ``(N, T)`` or ``(N, T, 3)``."""
    p = np.swapaxes(joints, 0, 1)  # (J, T, 3) so rows come out first
    if family == "JJd":
        return geometry.jj_distance(p[index[:, 0]], p[index[:, 1]])
    if family == "JJv":
        return geometry.jj_vector(p[index[:, 0]], p[index[:, 1]])
    if family == "JJo":
        return geometry.jj_orientation(p[index[:, 0]], p[index[:, 1]])
    if family == "JLd":
        return geometry.jl_distance(p[index[:, 0]], p[index[:, 1]], p[index[:, 2]])
    if family == "LLa":
        o1 = geometry.jj_orientation(p[index[:, 0]], p[index[:, 1]])
        o2 = geometry.jj_orientation(p[index[:, 2]], p[index[:, 3]])
        return geometry.ll_angle(o1, o2)
    raise ValueError(f"unknown feature family {family!r}")


def extract_features(seq: NormalizedSequence, plan: SelectionPlan, chunk: int = 65536) -> FeatureMatrix:
    joints = seq.joints()
    parts = [evaluate(plan.family, joints, plan.index[i:i + chunk]) for i in range(0, max(len(plan), 1), chunk)]
    values = np.concatenate(parts) if parts else np.empty((0, seq.T))
    return FeatureMatrix(plan.family, plan.strategy, values, plan.row_subjects())


def write_feature_csv(m: FeatureMatrix, path: Union[str, Path]) -> None:
    """Header ``row,family,subject,<T or 3T value columns>``; vectors are frame-major x,y,z."""
    if m.is_vector:
        cols = [f"t{t}_{c}" for t in range(m.T) for c in "xyz"]
        flat = m.values.reshape(m.N, -1)
    else:
        cols = [f"t{t}" for t in range(m.T)]
        flat = m.values
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "family", "subject"] + cols)
        for h in range(m.N):
            w.writerow([h, m.family, m.subjects[h]] + [repr(v) for v in flat[h].tolist()])


def read_feature_csv(path: Union[str, Path], strategy: str = "") -> FeatureMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    body = rows[1:]  # rows[0] is the header
    family = body[0][1] if body else ""
    values = np.array([[float(v) for v in r[3:]] for r in body]).reshape(len(body), -1)
    if family in VECTOR_FAMILIES:
        values = values.reshape(len(body), -1, 3)
    subjects = np.array([r[2] for r in body], dtype=object)
    return FeatureMatrix(family, strategy, values, subjects)
