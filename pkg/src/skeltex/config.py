"""Pipeline configuration, stored as JSON.

Schema (all keys optional; missing keys take the defaults)::

    {
      "selection": {"js2": [12 ints], "js3": [11 ints],
                    "ls1": [[a, b], ... 39 lines], "adjacency": [[a, b], ...]},
      "image_size": 256,
      "labels": [subset of the 13 image labels],
      "fusion_labels": [labels multiplied by `fuse`],
      "synthetic": {"classes": 5, "per_class": 20, "frames": 40, "seed": 0},
      "out_dir": "out"
    }

Joint indices are 0-based NTU indices (0 = base of spine, 1 = middle of spine).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

from .encode import DEFAULT_SIZE, IMAGE_LABELS
from .fusion import DEFAULT_FUSION_LABELS
from .selection import SelectionTables
from .skeleton import NUM_JOINTS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticParams:
    classes: int = 5
    per_class: int = 20
    frames: int = 40
    seed: int = 0


@dataclass(frozen=True)
class PipelineConfig:
    selection: SelectionTables = field(default_factory=SelectionTables)
    image_size: int = DEFAULT_SIZE
    labels: Tuple[str, ...] = IMAGE_LABELS
    fusion_labels: Tuple[str, ...] = DEFAULT_FUSION_LABELS
    synthetic: SyntheticParams = field(default_factory=SyntheticParams)
    out_dir: str = "out"

    def __post_init__(self):
        s = self.selection
        joints = list(s.js2) + list(s.js3) + [j for line in s.ls1 for j in line] + \
            [j for edge in s.adjacency for j in edge]
        bad = sorted({j for j in joints if not 0 <= j < NUM_JOINTS})
        if bad:
            raise ConfigError(f"joint indices outside 0..{NUM_JOINTS - 1}: {bad}")
        if self.image_size < 2:
            raise ConfigError(f"image_size must be at least 2, got {self.image_size}")
        for key in ("labels", "fusion_labels"):
            extra = [lab for lab in getattr(self, key) if lab not in IMAGE_LABELS]
            if extra:
                raise ConfigError(f"{key}: unknown image labels {extra}")

    def to_dict(self) -> dict:
        return {
            "selection": self.selection.to_dict(),
            "image_size": self.image_size,
            "labels": list(self.labels),
            "fusion_labels": list(self.fusion_labels),
            "synthetic": vars(self.synthetic).copy(),
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        unknown = set(d) - {"selection", "image_size", "labels", "fusion_labels", "synthetic", "out_dir"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        default = cls()
        return cls(
            selection=SelectionTables.from_dict(d.get("selection", {})),
            image_size=int(d.get("image_size", default.image_size)),
            labels=tuple(d.get("labels", default.labels)),
            fusion_labels=tuple(d.get("fusion_labels", default.fusion_labels)),
            synthetic=SyntheticParams(**{**vars(default.synthetic), **d.get("synthetic", {})}),
            out_dir=str(d.get("out_dir", default.out_dir)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path: Optional[Union[str, Path]] = None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None
    return PipelineConfig.from_dict(data)
