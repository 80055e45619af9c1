"""Texture-image encodings of feature matrices.

Rows of an image index features, columns index frames. Every encoding
row-normalizes over the original frames, resizes with corner-aligned
bilinear interpolation and only then maps to color.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional

import numpy as np

from .features import FeatureMatrix, extract_features
from .png import encode_png, write_png
from .preprocess import NormalizedSequence
from .selection import SCALAR_FAMILIES, VECTOR_FAMILIES, SelectionTables, build_selection_plan

DEFAULT_SIZE = 256
DEGENERATE_RANGE = 1e-12


@dataclass(frozen=True)
class ImageSpec:
    label: str
    family: str
    strategy: str
    encoding: str


IMAGE_SPECS = (
    ImageSpec("JJv-JS1-EM2", "JJv", "JS1", "EM2"),
    ImageSpec("JJv-JS2-EM2", "JJv", "JS2", "EM2"),
    ImageSpec("JJv-JS3-EM2", "JJv", "JS3", "EM2"),
    ImageSpec("JJo-JS1-EM2", "JJo", "JS1", "EM2"),
    ImageSpec("JJo-JS2-EM2", "JJo", "JS2", "EM2"),
    ImageSpec("JJo-JS3-EM2", "JJo", "JS3", "EM2"),
    ImageSpec("JJd-JS1-EM1", "JJd", "JS1", "EM1"),
    ImageSpec("JJd-JS2-EM1", "JJd", "JS2", "EM1"),
    ImageSpec("JJd-JS3-EM1", "JJd", "JS3", "EM1"),
    ImageSpec("JLd-LS1-EM3", "JLd", "LS1", "EM3"),
    ImageSpec("JLd-LS2-EM1", "JLd", "LS2", "EM1"),
    ImageSpec("LLa-LS1-EM3", "LLa", "LS1", "EM3"),
    ImageSpec("Com-EM4", "Com", "JS1&LS1", "EM4"),
)
IMAGE_LABELS = tuple(s.label for s in IMAGE_SPECS)
SPEC_BY_LABEL = {s.label: s for s in IMAGE_SPECS}


class EncodingError(ValueError):
    pass


@dataclass
class TextureImage:
    pixels: np.ndarray  # (H, W, 3) uint8
    label: str = ""

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def png_bytes(self) -> bytes:
        return encode_png(self.pixels)

    def save(self, path) -> None:
        write_png(path, self.pixels)


def normalize_rows(values) -> np.ndarray:
    """Map each row to [0, 1] by its own min and max; constant rows become 0."""
    values = np.asarray(values, dtype=float)
    lo = values.min(axis=1, keepdims=True)
    span = values.max(axis=1, keepdims=True) - lo
    flat = span < DEGENERATE_RANGE
    out = (values - lo) / np.where(flat, 1.0, span)
    out[np.broadcast_to(flat, out.shape)] = 0.0
    return out


def _axis_weights(n_src: int, n_dst: int):
    if n_dst == 1 or n_src == 1:
        pos = np.zeros(n_dst)
    else:
        pos = np.arange(n_dst) * (n_src - 1) / (n_dst - 1)
    i0 = np.minimum(np.floor(pos).astype(np.int64), n_src - 1)
    i1 = np.minimum(i0 + 1, n_src - 1)
    return i0, i1, pos - i0


def bilinear_resize(m, H: int, W: int) -> np.ndarray:
    """Corner-aligned bilinear resize of an ``(N, T)`` array to ``(H, W)``.

    Output ``(h, w)`` samples the source at ``(h(N-1)/(H-1), w(T-1)/(W-1))``.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or min(m.shape) < 1:
        raise ValueError(f"expected a non-empty 2-D array, got shape {m.shape}")
    r0, r1, fr = _axis_weights(m.shape[0], H)
    c0, c1, fc = _axis_weights(m.shape[1], W)
    rows = m[r0] * (1 - fr)[:, None] + m[r1] * fr[:, None]
    return rows[:, c0] * (1 - fc) + rows[:, c1] * fc


def jet_colorbar(u):
    """Piecewise-linear jet: 0 -> dark blue (0, 0, .5), .5 -> (.5, 1, .5), 1 -> dark red (.5, 0, 0)."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    r = np.clip(np.minimum(4 * u - 1.5, 4.5 - 4 * u), 0.0, 1.0)
    g = np.clip(np.minimum(4 * u - 0.5, 3.5 - 4 * u), 0.0, 1.0)
    b = np.clip(np.minimum(2.5 - 4 * u, 4 * u + 0.5), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1)


def quantize(v) -> np.ndarray:
    """[0, 1] reals to 8-bit with round-half-up."""
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def _resized(values, H, W) -> np.ndarray:
    return np.clip(bilinear_resize(normalize_rows(values), H, W), 0.0, 1.0)


def _require_scalar(m: FeatureMatrix, what: str):
    if m.is_vector or m.family not in SCALAR_FAMILIES:
        raise EncodingError(f"{what} needs a scalar feature matrix, got {m.label}")


def encode_em1(m: FeatureMatrix, H: int = DEFAULT_SIZE, W: int = DEFAULT_SIZE) -> TextureImage:
    _require_scalar(m, "EM1")
    return TextureImage(quantize(jet_colorbar(_resized(m.values, H, W))), f"{m.label}-EM1")


def encode_em2(m: FeatureMatrix, H: int = DEFAULT_SIZE, W: int = DEFAULT_SIZE) -> TextureImage:
    if not m.is_vector or m.family not in VECTOR_FAMILIES:
        raise EncodingError(f"EM2 needs a vector feature matrix, got {m.label}")
    rgb = np.stack([_resized(m.values[..., c], H, W) for c in range(3)], axis=-1)
    return TextureImage(quantize(rgb), f"{m.label}-EM2")


def encode_em3(m_main: FeatureMatrix, m_aux: FeatureMatrix, H: int = DEFAULT_SIZE,
               W: int = DEFAULT_SIZE) -> TextureImage:
    """Red = inverted main-subject features, green = auxiliary, blue = min(4RG, 1)."""
    _require_scalar(m_main, "EM3")
    _require_scalar(m_aux, "EM3")
    if m_main.values.shape != m_aux.values.shape or m_main.family != m_aux.family:
        raise EncodingError(f"EM3 needs aligned matrices, got {m_main.label} {m_main.values.shape} "
                            f"and {m_aux.label} {m_aux.values.shape}")
    r = 1.0 - normalize_rows(m_main.values)
    g = normalize_rows(m_aux.values)
    b = np.clip(4.0 * r * g, 0.0, 1.0)
    rgb = np.stack([np.clip(bilinear_resize(c, H, W), 0.0, 1.0) for c in (r, g, b)], axis=-1)
    return TextureImage(quantize(rgb), f"{m_main.label}-EM3")


def encode_em4_composite(jjd: FeatureMatrix, jld: FeatureMatrix, lla: FeatureMatrix,
                         H: int = DEFAULT_SIZE, W: int = DEFAULT_SIZE) -> TextureImage:
    for m in (jjd, jld, lla):
        _require_scalar(m, "EM4")
    rgb = np.stack([_resized(m.values, H, W) for m in (jjd, jld, lla)], axis=-1)
    return TextureImage(quantize(rgb), "Com-EM4")


class _FeatureCache:
    def __init__(self, seq: NormalizedSequence, tables: SelectionTables):
        self.seq, self.tables, self.cache = seq, tables, {}

    def get(self, family: str, strategy: str, subject: Optional[str] = None) -> FeatureMatrix:
        key = (family, strategy, subject)
        if key not in self.cache:
            plan = build_selection_plan(family, strategy, self.tables)
            if subject is not None:
                plan = plan.for_subject(subject)
            self.cache[key] = extract_features(self.seq, plan)
        return self.cache[key]


def generate_image_set(seq: NormalizedSequence, labels: Optional[Iterable[str]] = None,
                       tables: SelectionTables = SelectionTables(),
                       size: int = DEFAULT_SIZE) -> Dict[str, TextureImage]:
    """Encode ``seq`` into the requested images (all 13 by default), keyed by label."""
    labels = IMAGE_LABELS if labels is None else tuple(labels)
    unknown = [lab for lab in labels if lab not in SPEC_BY_LABEL]
    if unknown:
        raise EncodingError(f"unknown image labels {unknown}")
    feats = _FeatureCache(seq, tables)
    out = {}
    for label in IMAGE_LABELS:
        if label not in labels:
            continue
        spec = SPEC_BY_LABEL[label]
        if spec.encoding == "EM1":
            img = encode_em1(feats.get(spec.family, spec.strategy), size, size)
        elif spec.encoding == "EM2":
            img = encode_em2(feats.get(spec.family, spec.strategy), size, size)
        elif spec.encoding == "EM3":
            img = encode_em3(feats.get(spec.family, spec.strategy, "main"),
                             feats.get(spec.family, spec.strategy, "auxiliary"), size, size)
        else:
            img = encode_em4_composite(feats.get("JJd", "JS1"), feats.get("JLd", "LS1", "main"),
                                       feats.get("LLa", "LS1", "main"), size, size)
        img.label = label
        out[label] = img
    return out


def image_filename(source_id: str, label: str) -> str:
    return f"{source_id}__{label}.png"


def write_image_set(images: Dict[str, TextureImage], source_id: str, out_dir) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for label, img in images.items():
        path = out_dir / image_filename(source_id, label)
        img.save(path)
        paths[label] = path
    return paths
