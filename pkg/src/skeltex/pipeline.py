"""End-to-end runs and the built-in self-test."""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import geometry
from .config import PipelineConfig
from .encode import IMAGE_LABELS, generate_image_set, image_filename, write_image_set
from .png import write_atomic
from .preprocess import preprocess
from .selection import SelectionConfigError, SelectionTables, build_selection_plan, expected_dimension
from .skeleton import BodyFrame, SkeletonSequence, parse_skeleton_file
from .synth import random_rotation, synthesize_sequence

log = logging.getLogger(__name__)

GOLDEN_DIR = Path(__file__).with_name("golden")
MANIFEST_NAME = "manifest.json"

# name -> zero-argument factory
FIXTURES: Dict[str, Callable[[], SkeletonSequence]] = {
    "fixture_single": lambda: synthesize_sequence(0, 7, 24, noise=0.0, source_id="fixture_single"),
    "fixture_pair": lambda: synthesize_sequence(3, 11, 24, noise=0.0, bodies=2, source_id="fixture_pair"),
}


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def process_sequence(path, config: PipelineConfig, out_dir) -> dict:
    """Parse, normalize and encode one file; never raises (errors go in the record)."""
    record = {"input": str(path), "source_id": Path(path).stem, "status": "ok", "outputs": {}}
    try:
        seq = parse_skeleton_file(path)
        record["source_id"] = seq.source_id
        images = generate_image_set(preprocess(seq), config.labels, config.selection, config.image_size)
        paths = write_image_set(images, seq.source_id, out_dir)
        record["outputs"] = {label: {"file": p.name, "sha256": sha256_file(p)} for label, p in paths.items()}
    except Exception as e:  # a bad sequence must not take down the run
        log.error("%s: %s: %s", record["source_id"], type(e).__name__, e)
        record["status"] = "failed"
        record["error"] = f"{type(e).__name__}: {e}"
    return record


def _process_packed(args):
    path, config_dict, out_dir = args
    return process_sequence(path, PipelineConfig.from_dict(config_dict), out_dir)


def run_pipeline(config: PipelineConfig, inputs: Sequence, out_dir=None, jobs: int = 1):
    """Encode every input into ``out_dir`` and write ``manifest.json``.

    Returns ``(exit_status, manifest)``; the status is 0 only if every input
    produced all of its images.
    """
    out_dir = Path(out_dir or config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs = [str(p) for p in inputs]
    if jobs > 1 and len(inputs) > 1:
        payload = [(p, config.to_dict(), str(out_dir)) for p in inputs]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_process_packed, payload))
    else:
        records = [process_sequence(p, config, out_dir) for p in inputs]

    manifest = {
        "config_sha256": config.digest(),
        "labels": list(config.labels),
        "image_size": config.image_size,
        "sequences": records,
    }
    write_atomic(out_dir / MANIFEST_NAME, (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode())
    ok = all(r["status"] == "ok" and set(r["outputs"]) == set(config.labels) for r in records)
    return (0 if ok else 1), manifest


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def _dimension_checks(tables: SelectionTables) -> List[Check]:
    out = []
    combos = [("JJd", "JS1"), ("JJd", "JS2"), ("JJd", "JS3"), ("JLd", "LS1"), ("LLa", "LS1"),
              ("JJd", "FULL"), ("JJv", "FULL"), ("JLd", "FULL")]
    for family, strategy in combos:
        name = f"dimension {family}-{strategy}"
        want = expected_dimension(family, strategy)
        if family in ("JJv", "JJo"):
            want *= 3
        try:
            got = build_selection_plan(family, strategy, tables).dimension
            out.append(Check(name, got == want, f"{got}, expected {want}"))
        except SelectionConfigError as e:
            out.append(Check(name, False, str(e)))
    try:
        ls2 = len(build_selection_plan("JLd", "LS2", tables))
        out.append(Check("dimension JLd-LS2 (reported)", ls2 > 0, f"{ls2} rows"))
    except SelectionConfigError as e:
        out.append(Check("dimension JLd-LS2 (reported)", False, str(e)))
    return out


def _geometry_checks(n: int = 1000, seed: int = 0) -> List[Check]:
    rng = np.random.default_rng(seed)
    pj, pk, pm = (rng.normal(size=(n, 3)) for _ in range(3))
    u = (pm - pk) / np.linalg.norm(pm - pk, axis=1, keepdims=True)
    rel = pj - pk
    proj = np.linalg.norm(rel - (rel * u).sum(1, keepdims=True) * u, axis=1)
    jl_err = float(np.abs(geometry.jl_distance(pj, pk, pm) - proj).max())

    o1 = geometry.jj_orientation(pj, pk)
    o2 = geometry.jj_orientation(pm, pk)
    dot = np.clip((o1 * o2).sum(1), -1, 1)
    la_err = float(np.abs(geometry.ll_angle(o1, o2) - np.arccos(dot)).max())

    d_err = float(np.abs(geometry.jj_distance(pj, pk) - np.sqrt(((pj - pk) ** 2).sum(1))).max())
    return [
        Check("oracle jl_distance vs projection", jl_err <= 1e-9, f"max err {jl_err:.2e}"),
        Check("oracle ll_angle vs arccos", la_err <= 1e-9, f"max err {la_err:.2e}"),
        Check("oracle jj_distance vs sqrt of squares", d_err <= 1e-12, f"max err {d_err:.2e}"),
    ]


def rigid_copy(seq: SkeletonSequence, rotation, translation) -> SkeletonSequence:
    frames = [[BodyFrame(b.body_id, b.joints @ np.asarray(rotation).T + translation) for b in f]
              for f in seq.frames]
    return SkeletonSequence(frames, seq.source_id)


INVARIANT_LABELS = ("JJd-JS1-EM1", "JJd-JS2-EM1", "JJd-JS3-EM1", "JLd-LS1-EM3", "JLd-LS2-EM1",
                    "LLa-LS1-EM3", "Com-EM4")


def _invariance_checks(tables: SelectionTables, size: int) -> List[Check]:
    rng = np.random.default_rng(1)
    bad = []
    for class_id in range(2):
        seq = synthesize_sequence(class_id, 5, 20)
        base = generate_image_set(preprocess(seq), INVARIANT_LABELS, tables, size)
        for k in range(2):
            moved = rigid_copy(seq, random_rotation(rng), rng.uniform(-3, 3, 3))
            imgs = generate_image_set(preprocess(moved), INVARIANT_LABELS, tables, size)
            bad += [f"class {class_id} motion {k} {lab}" for lab in INVARIANT_LABELS
                    if not np.array_equal(imgs[lab].pixels, base[lab].pixels)]
    return [Check("rigid-motion invariance EM1/EM3/EM4", not bad, "; ".join(bad[:3]))]


def write_golden(out_dir=GOLDEN_DIR) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, make in FIXTURES.items():
        write_image_set(generate_image_set(preprocess(make())), name, out_dir)


def _golden_checks(golden_dir: Path) -> List[Check]:
    out = []
    for name, make in FIXTURES.items():
        images = generate_image_set(preprocess(make()))
        for label in IMAGE_LABELS:
            path = golden_dir / image_filename(name, label)
            if not path.exists():
                out.append(Check(f"golden {name} {label}", False, f"missing {path}"))
                continue
            same = path.read_bytes() == images[label].png_bytes()
            out.append(Check(f"golden {name} {label}", same, "" if same else f"{path.name} differs"))
    return out


def selftest(config: PipelineConfig = PipelineConfig(), golden_dir=None) -> List[Check]:
    checks = _dimension_checks(config.selection)
    checks += _geometry_checks()
    try:
        checks += _invariance_checks(config.selection, min(config.image_size, 64))
    except SelectionConfigError as e:
        checks.append(Check("rigid-motion invariance EM1/EM3/EM4", False, str(e)))
    if config.selection == SelectionTables():
        checks += _golden_checks(Path(golden_dir) if golden_dir else GOLDEN_DIR)
    else:
        log.info("non-default selection tables: golden-image checks skipped")
    return checks
