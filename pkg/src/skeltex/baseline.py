"""Nearest-centroid stand-in for the per-image CNN.

Images are bilinearly shrunk to 32x32, flattened, and compared with class
centroids through a Gaussian similarity so scores stay strictly positive for
multiplicative fusion.

Models are stored as ``.npz`` archives with arrays ``centroids`` (C, d),
``classes`` (C,), ``tau`` (scalar), ``label`` (str) and ``size`` (int).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Tuple, Union

import numpy as np

from .encode import TextureImage, bilinear_resize
from .fusion import ScoreVector

FEATURE_SIZE = 32


class TrainingError(ValueError):
    pass


@dataclass
class CentroidModel:
    centroids: np.ndarray  # (C, d)
    classes: np.ndarray    # (C,) class ids, ascending
    tau: float
    label: str = ""
    size: int = FEATURE_SIZE

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "wb") as fh:
            np.savez(fh, centroids=self.centroids, classes=self.classes, tau=np.float64(self.tau),
                     label=np.str_(self.label), size=np.int64(self.size))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CentroidModel":
        with np.load(path, allow_pickle=False) as z:
            return cls(z["centroids"], z["classes"], float(z["tau"]), str(z["label"]), int(z["size"]))


def featurize(img, size: int = FEATURE_SIZE) -> np.ndarray:
    pixels = img.pixels if isinstance(img, TextureImage) else np.asarray(img)
    x = pixels.astype(float) / 255.0
    small = np.stack([bilinear_resize(x[..., c], size, size) for c in range(3)], axis=-1)
    return small.reshape(-1)


def _bandwidth(centroids: np.ndarray) -> float:
    """Mean pairwise squared distance between centroids (1 if undefined or zero)."""
    c = len(centroids)
    if c < 2:
        return 1.0
    d2 = ((centroids[:, None, :] - centroids[None, :, :]) ** 2).sum(-1)
    tau = float(d2[np.triu_indices(c, 1)].mean())
    return tau if tau > 0 else 1.0


def train(samples: Iterable[Tuple[np.ndarray, int]], n_classes: int = None, label: str = "",
          size: int = FEATURE_SIZE) -> CentroidModel:
    samples = list(samples)
    if not samples:
        raise TrainingError("no training samples")
    X = np.stack([np.asarray(v, dtype=float) for v, _ in samples])
    y = np.array([int(c) for _, c in samples])
    classes = np.arange(n_classes) if n_classes is not None else np.unique(y)
    missing = [int(c) for c in classes if not np.any(y == c)]
    if missing:
        raise TrainingError(f"no training samples for class(es) {missing}")
    centroids = np.stack([X[y == c].mean(axis=0) for c in classes])
    return CentroidModel(centroids, classes, _bandwidth(centroids), label, size)


def score(model: CentroidModel, v) -> ScoreVector:
    v = np.asarray(v, dtype=float)
    if v.shape != model.centroids.shape[1:]:
        raise ValueError(f"feature length {v.shape} does not match model {model.centroids.shape[1:]}")
    d2 = ((model.centroids - v) ** 2).sum(axis=1)
    # floor at the smallest normal float so a far sample never zeroes a fused class
    return ScoreVector(model.label, np.maximum(np.exp(-d2 / model.tau), np.finfo(float).tiny))
