"""Command-line entry point: ``skeltex <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import logging
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import baseline, fusion
from .config import ConfigError, PipelineConfig, load_config
from .encode import IMAGE_LABELS, generate_image_set, write_image_set
from .features import extract_features, write_feature_csv
from .png import read_png
from .preprocess import preprocess
from .selection import FAMILIES, STRATEGIES, build_selection_plan
from .skeleton import parse_skeleton_file, write_skeleton_file
from .synth import CLASS_NAMES, synthesize_sequence

log = logging.getLogger("skeltex")

IMAGE_RE = re.compile(r"^(?P<sample>.+)__(?P<label>[^_].*)\.png$")


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config)
    changes = {}
    if getattr(args, "size", None):
        changes["image_size"] = args.size
    if getattr(args, "labels", None):
        changes["labels"] = tuple(x.strip() for x in args.labels.split(",") if x.strip())
    if getattr(args, "out", None):
        changes["out_dir"] = str(args.out)
    return replace(cfg, **changes) if changes else cfg


def _read_truth(path) -> dict:
    """``sample_id,class`` CSV (header optional)."""
    truth = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip() in ("sample_id", ""):
                continue
            truth[row[0].strip()] = int(row[1])
    return truth


def _images_for(image_dir, label: str) -> dict:
    out = {}
    for p in sorted(Path(image_dir).glob("*.png")):
        m = IMAGE_RE.match(p.name)
        if m and m["label"] == label:
            out[m["sample"]] = p
    return out


def cmd_parse(args) -> int:
    status = 0
    for path in args.inputs:
        try:
            seq = parse_skeleton_file(path)
        except ValueError as e:
            print(f"{path}: INVALID: {e}")
            status = 1
            continue
        hist = ", ".join(f"{b} bodies: {n}" for b, n in seq.bodies_per_frame().items())
        print(f"{path}: T={seq.T}; frames by body count: {hist}; body ids: {' '.join(seq.body_ids())}")
    return status


def cmd_preprocess(args) -> int:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for path in args.inputs:
        norm = preprocess(parse_skeleton_file(path))
        dest = out / f"{norm.source_id}.normalized.skeleton"
        write_skeleton_file(norm.to_skeleton(), dest)
        print(f"{path}: T={norm.T} main={norm.main_id} auxiliary={norm.auxiliary_id} "
              f"shadow={'yes' if norm.shadow_flag else 'no'} shadow_frames={int(norm.shadow_frames.sum())}/{norm.T}"
              f" -> {dest}")
    return 0


def cmd_extract(args) -> int:
    cfg = _config(args)
    norm = preprocess(parse_skeleton_file(args.input))
    plan = build_selection_plan(args.family, args.strategy, cfg.selection)
    if args.subject:
        plan = plan.for_subject(args.subject)
    m = extract_features(norm, plan)
    out = Path(args.out or f"{norm.source_id}__{plan.label}.csv")
    write_feature_csv(m, out)
    print(f"{plan.label}: {m.N} rows x {m.T} frames -> {out}")
    return 0


def cmd_encode(args) -> int:
    cfg = _config(args)
    out = Path(cfg.out_dir)
    for path in args.inputs:
        seq = parse_skeleton_file(path)
        images = generate_image_set(preprocess(seq), cfg.labels, cfg.selection, cfg.image_size)
        paths = write_image_set(images, seq.source_id, out)
        print(f"{path}: {len(paths)} images -> {out}")
    return 0


def cmd_synth(args) -> int:
    out = Path(args.out or "synthetic")
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for c in range(args.classes):
        for i in range(args.per_class):
            seed = args.seed * 100003 + i
            seq = synthesize_sequence(c, seed, args.frames, bodies=args.bodies,
                                      source_id=f"c{c:02d}_{CLASS_NAMES[c]}_{i:03d}")
            write_skeleton_file(seq, out / f"{seq.source_id}.skeleton")
            rows.append((seq.source_id, c))
    with open(out / "truth.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "class"])
        w.writerows(rows)
    print(f"{len(rows)} sequences -> {out}")
    return 0


def cmd_train_baseline(args) -> int:
    truth = _read_truth(args.truth)
    images = _images_for(args.images, args.image_label)
    samples = [(baseline.featurize(read_png(p)), truth[s]) for s, p in images.items() if s in truth]
    n_classes = max(truth.values()) + 1
    model = baseline.train(samples, n_classes, args.image_label)
    model.save(args.model)
    print(f"{args.image_label}: {len(samples)} samples, {model.n_classes} classes, tau={model.tau:.4g} -> {args.model}")
    return 0


def cmd_score_baseline(args) -> int:
    model = baseline.CentroidModel.load(args.model)
    images = _images_for(args.images, model.label)
    if args.truth:
        keep = _read_truth(args.truth)
        images = {s: p for s, p in images.items() if s in keep}
    rows = [(model.label, s, baseline.score(model, baseline.featurize(read_png(p))).scores)
            for s, p in images.items()]
    fusion.write_scores_csv(args.out, rows)
    print(f"{model.label}: scored {len(rows)} images -> {args.out}")
    return 0


def cmd_fuse(args) -> int:
    cfg = _config(args)
    models = tuple(args.models.split(",")) if args.models else cfg.fusion_labels
    preds = fusion.fuse_samples([fusion.read_scores_csv(p) for p in args.scores], models)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_id", "prediction"])
            w.writerows(sorted(preds.items()))
    else:
        for sample, pred in preds.items():
            print(f"{sample},{pred}")
    if args.truth:
        print(f"accuracy {fusion.accuracy(preds, _read_truth(args.truth)):.4f} over {len(preds)} samples")
    return 0


def cmd_run(args) -> int:
    from .pipeline import run_pipeline
    cfg = _config(args)
    status, manifest = run_pipeline(cfg, args.inputs, cfg.out_dir, args.jobs)
    failed = [r["source_id"] for r in manifest["sequences"] if r["status"] != "ok"]
    print(f"{len(manifest['sequences']) - len(failed)}/{len(manifest['sequences'])} sequences encoded -> "
          f"{cfg.out_dir}" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return status


def cmd_selftest(args) -> int:
    from .pipeline import selftest, write_golden
    if args.write_golden:
        write_golden(args.write_golden)
        print(f"golden images written to {args.write_golden}")
        return 0
    checks = selftest(_config(args), args.golden_dir)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline config (see --print-default-config)")
    common.add_argument("--out", help="output directory or file")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="skeltex", description="Skeleton sequences to texture images.")
    p.add_argument("--print-default-config", action="store_true", help="print the default config and exit")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("parse", parents=[common], help="validate skeleton files and summarize them")
    s.add_argument("inputs", nargs="+")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("preprocess", parents=[common], help="write the normalized two-subject sequence")
    s.add_argument("inputs", nargs="+")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("extract", parents=[common], help="write one feature matrix as CSV")
    s.add_argument("input")
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--strategy", choices=STRATEGIES, required=True)
    s.add_argument("--subject", choices=("main", "auxiliary"), help="re-target a single-subject (LS1) plan")
    s.set_defaults(func=cmd_extract)

    image_flags = argparse.ArgumentParser(add_help=False)
    image_flags.add_argument("--size", type=int, help="image height and width")
    image_flags.add_argument("--labels", help=f"comma-separated subset of: {','.join(IMAGE_LABELS)}")

    s = sub.add_parser("encode", parents=[common, image_flags], help="encode sequences into texture images")
    s.add_argument("inputs", nargs="+")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("run", parents=[common, image_flags], help="full pipeline with a run manifest")
    s.add_argument("inputs", nargs="*")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("synth", parents=[common], help="write synthetic skeleton files and truth.csv")
    s.add_argument("--classes", type=int, default=len(CLASS_NAMES), choices=range(1, len(CLASS_NAMES) + 1))
    s.add_argument("--per-class", type=int, default=20)
    s.add_argument("--frames", type=int, default=40)
    s.add_argument("--bodies", type=int, default=1, choices=(1, 2))
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("train-baseline", parents=[common], help="fit a nearest-centroid model on one image type")
    s.add_argument("--images", required=True, help="directory of <sample>__<label>.png files")
    s.add_argument("--truth", required=True, help="CSV of sample_id,class")
    s.add_argument("--image-label", required=True, choices=IMAGE_LABELS)
    s.add_argument("--model", required=True, help="output .npz")
    s.set_defaults(func=cmd_train_baseline)

    s = sub.add_parser("score-baseline", parents=[common], help="score images into a fusion CSV")
    s.add_argument("--images", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--truth", help="only score samples listed in this CSV")
    s.set_defaults(func=cmd_score_baseline)

    s = sub.add_parser("fuse", parents=[common], help="multiply score CSVs and predict")
    s.add_argument("scores", nargs="+")
    s.add_argument("--truth", help="CSV of sample_id,class; prints accuracy")
    s.add_argument("--models", help="comma-separated model labels to fuse (default from config)")
    s.set_defaults(func=cmd_fuse)

    s = sub.add_parser("selftest", parents=[common], help="run built-in invariant and golden checks")
    s.add_argument("--golden-dir", help="directory of golden PNGs (default: packaged)")
    s.add_argument("--write-golden", metavar="DIR", help="regenerate golden PNGs into DIR and exit")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_default_config:
        sys.stdout.write(PipelineConfig().to_json())
        return 0
    if not getattr(args, "func", None):
        parser.print_help()
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "score-baseline" and not args.out:
        parser.error("score-baseline needs --out")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as e:
        log.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
