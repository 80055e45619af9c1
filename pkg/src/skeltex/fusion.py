"""Late fusion of per-model class scores by element-wise multiplication."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .encode import IMAGE_LABELS

# JJo-JS2-EM2 is left out of the final fusion by default.
DEFAULT_FUSION_LABELS = tuple(lab for lab in IMAGE_LABELS if lab != "JJo-JS2-EM2")


class FusionError(ValueError):
    pass


@dataclass
class ScoreVector:
    model_label: str
    scores: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        if self.scores.ndim != 1 or len(self.scores) < 1:
            raise FusionError(f"{self.model_label}: scores must be a non-empty 1-D vector")
        if not np.all(np.isfinite(self.scores)) or np.any(self.scores < 0):
            raise FusionError(f"{self.model_label}: scores must be finite and non-negative")


def multiply_fuse(vectors: Sequence[ScoreVector]) -> np.ndarray:
    """Element-wise product, multiplied left to right in sorted ``model_label`` order.

    The fixed order makes the result bit-identical for any input permutation.
    """
    if not vectors:
        raise FusionError("nothing to fuse")
    lengths = {len(v.scores) for v in vectors}
    if len(lengths) != 1:
        raise FusionError(f"score vectors differ in length: {sorted(lengths)}")
    ordered = sorted(vectors, key=lambda v: (v.model_label, v.scores.tobytes()))
    fused = ordered[0].scores.copy()
    for v in ordered[1:]:
        fused = fused * v.scores
    return fused


def predict(fused) -> int:
    """Index of the largest score; the first one on ties."""
    fused = np.asarray(fused)
    if fused.size == 0:
        raise FusionError("cannot predict from an empty score vector")
    return int(np.argmax(fused))


SCORE_HEADER = ("model_label", "sample_id")


def write_scores_csv(path: Union[str, Path], rows: Iterable[tuple]) -> None:
    """``rows`` are ``(model_label, sample_id, scores)``."""
    rows = list(rows)
    n = len(rows[0][2]) if rows else 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(SCORE_HEADER) + [f"score_{i}" for i in range(n)])
        for label, sample, scores in rows:
            w.writerow([label, sample] + [repr(float(s)) for s in scores])


def read_scores_csv(path: Union[str, Path]) -> Dict[str, List[ScoreVector]]:
    """Scores grouped by sample id."""
    out: Dict[str, List[ScoreVector]] = defaultdict(list)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if tuple(header[:2]) != SCORE_HEADER or not all(h.startswith("score_") for h in header[2:]):
            raise FusionError(f"{path}: unexpected header {header}")
        for row in reader:
            if not row:
                continue
            out[row[1].strip()].append(ScoreVector(row[0].strip(), [float(x) for x in row[2:]]))
    return dict(out)


def fuse_samples(score_sets: Sequence[Dict[str, List[ScoreVector]]],
                 labels: Optional[Sequence[str]] = None) -> Dict[str, int]:
    """Predict every sample from the union of the given score files.

    With ``labels``, only vectors from those models are multiplied.
    """
    merged: Dict[str, List[ScoreVector]] = defaultdict(list)
    for scores in score_sets:
        for sample, vecs in scores.items():
            merged[sample].extend(vecs)
    preds = {}
    for sample in sorted(merged):
        vecs = [v for v in merged[sample] if labels is None or v.model_label in labels]
        if not vecs:
            raise FusionError(f"sample {sample}: no scores from the selected models")
        preds[sample] = predict(multiply_fuse(vecs))
    return preds


def accuracy(preds: Dict[str, int], truth: Dict[str, int]) -> float:
    keys = [k for k in preds if k in truth]
    if not keys:
        raise FusionError("no predicted sample has a ground-truth label")
    return sum(preds[k] == truth[k] for k in keys) / len(keys)
