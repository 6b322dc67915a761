"""Command-line pipeline driver.

One subcommand per stage; stages communicate only through files, so any stage
can be replaced by an external tool honoring the formats. Every run writes a
JSON run-report (effective params, sha256 of inputs and outputs, counts) with
no timestamps, so identical inputs and config reproduce identical bytes.

Exit codes: 0 success, 1 validation failure, 2 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import coverage as coverage_mod
from . import curation, disocclusion, pseudolabel, tensorio, transfer
from . import manifest as manifest_mod
from .coco import load_coco, save_coco
from .errors import FileFormatError, IntegrityError, StampError
from .model import Dataset, mask_from_json, mask_to_json, rle_decode, rle_encode

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

_REQUIRED = object()


@dataclass(frozen=True)
class Config:
    """Structured config file plus flag overrides; flags win."""

    payload: dict
    base: Path

    @classmethod
    def load(cls, path: str | None) -> "Config":
        if path is None:
            return cls(payload={}, base=Path.cwd())
        p = Path(path)
        try:
            with open(p, encoding="utf-8") as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise FileFormatError(f"{p}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{p}: invalid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise FileFormatError(f"{p}: config must be a JSON object")
        return cls(payload=payload, base=p.parent)

    def path(self, key: str, override: str | None = None, required: bool = True) -> Path | None:
        if override is not None:
            return Path(override)
        raw = self.payload.get("paths", {}).get(key)
        if raw is None:
            if required:
                raise IntegrityError(
                    f"no {key!r} path given (config paths.{key} or flag)"
                )
            return None
        p = Path(raw)
        return p if p.is_absolute() else self.base / p

    def param(self, section: str, key: str, override=None, default=_REQUIRED):
        if override is not None:
            return override
        sec = self.payload.get(section, {})
        if key in sec:
            return sec[key]
        if default is _REQUIRED:
            raise IntegrityError(f"missing config parameter {section}.{key}")
        return default


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _hash_path(path: Path) -> str:
    """Content hash of a file, or of a directory tree (sorted rel-path:sha lines)."""
    if path.is_dir():
        lines = []
        for child in sorted(path.rglob("*")):
            if child.is_file():
                lines.append(f"{child.relative_to(path).as_posix()}:{_sha256_file(child)}")
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()
    return _sha256_file(path)


def _write_report(
    out_dir: Path,
    stage: str,
    params: dict,
    inputs: dict[str, Path],
    outputs: dict[str, Path],
    counts: dict,
    warnings: list[str] | None = None,
) -> dict:
    report = {
        "stage": stage,
        "params": params,
        "inputs": {
            name: {"path": str(p), "sha256": _hash_path(p)} for name, p in inputs.items()
        },
        "outputs": {
            name: {"path": str(p), "sha256": _hash_path(p)} for name, p in outputs.items()
        },
        "counts": counts,
    }
    if warnings:
        report["warnings"] = warnings
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    with open(out_dir / f"{stage}.report.json", "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text, end="")
    return report


def _out_dir(cfg: Config, args) -> Path:
    out = cfg.path("out_dir", args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- validate

_TENSOR_SUFFIXES = {".flw1", ".trk1", ".emb1"}


def _sniff_json(path: Path) -> str:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if isinstance(payload, list):
        return "predictions"
    if isinstance(payload, dict):
        if "images" in payload and "annotations" in payload:
            return "dataset"
        if "size" in payload and "counts" in payload:
            return "mask"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool)
               for v in payload.values()):
            return "scores"
    raise FileFormatError(f"{path}: unrecognized JSON document")


def _validate_one(path: Path) -> list[dict]:
    """Validation reports for one path (a clip root may expand to several)."""
    if path.is_dir():
        if (path / transfer.CLIP_MANIFEST).is_file():
            transfer.load_clip(path.parent, path.name)
            return [{"path": str(path), "format": "clip", "ok": True}]
        clip_ids = transfer.discover_clips(path)
        if not clip_ids:
            raise FileFormatError(f"{path}: no clip manifests found")
        reports = []
        for clip_id in clip_ids:
            transfer.load_clip(path, clip_id)
            reports.append({"path": str(path / clip_id), "format": "clip", "ok": True})
        return reports

    suffix = path.suffix.lower()
    if suffix in _TENSOR_SUFFIXES:
        report = tensorio.validate_file(path)
        report["path"] = str(path)
        return [report]
    if suffix == ".ndjson":
        manifest_mod.parse_manifest(path)
        return [{"path": str(path), "format": "manifest", "ok": True}]
    if suffix == ".json":
        kind = _sniff_json(path)
        if kind == "dataset":
            load_coco(path)
        elif kind == "predictions":
            pseudolabel.load_predictions(path)
        elif kind == "scores":
            tensorio.load_scores(path)
        elif kind == "mask":
            with open(path, encoding="utf-8") as fh:
                mask_from_json(json.load(fh))
        return [{"path": str(path), "format": kind, "ok": True}]
    raise FileFormatError(f"{path}: unknown file type {suffix!r}")


def cmd_validate(args) -> int:
    results = []
    worst = EXIT_OK
    for raw in args.paths:
        path = Path(raw)
        try:
            results.extend(_validate_one(path))
        except StampError as exc:
            kind = EXIT_IO if isinstance(exc.__cause__, OSError) else EXIT_VALIDATION
            results.append({"path": raw, "ok": False, "error": str(exc)})
            worst = max(worst, kind)
        except OSError as exc:
            results.append({"path": raw, "ok": False, "error": str(exc)})
            worst = max(worst, EXIT_IO)
    for res in results:
        if res["ok"]:
            print(f"PASS {res['path']} ({res.get('format', '?')})")
        else:
            failed = [c for c in res.get("checks", []) if not c["ok"]]
            detail = res.get("error") or "; ".join(
                f"{c['name']}: {c['detail']}" for c in failed
            )
            print(f"FAIL {res['path']}: {detail}")
            unreadable = any(c["name"] == "readable" for c in failed)
            worst = max(worst, EXIT_IO if unreadable else EXIT_VALIDATION)
    if args.report is not None:
        text = json.dumps({"results": results}, indent=2, sort_keys=True) + "\n"
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return worst


# ---------------------------------------------------------------- transfer

def cmd_transfer(args) -> int:
    cfg = Config.load(args.config)
    out = _out_dir(cfg, args)
    dataset_path = cfg.path("dataset", args.dataset)
    clips_dir = cfg.path("clips_dir", args.clips_dir)
    stride = int(cfg.param("curation", "stride", args.stride, 5))
    count = int(cfg.param("curation", "count", args.frames, 8))
    offset = int(cfg.param("curation", "offset", args.offset, 0))
    min_area = float(cfg.param("curation", "min_area", args.min_area, 1.0))

    ds = load_coco(dataset_path)
    clip_ids = transfer.discover_clips(clips_dir)
    if not clip_ids:
        raise IntegrityError(f"{clips_dir}: no clips found")
    clips = [transfer.load_clip(clips_dir, cid) for cid in clip_ids]
    out_ds = ds
    per_clip = {}
    for clip in sorted(clips, key=lambda c: c.clip_id):
        frames = curation.select_frames(clip.frame_count, stride, count, offset)
        before = len(out_ds.annotations)
        out_ds = transfer.transfer_annotations(out_ds, clip, frames, min_area)
        per_clip[clip.clip_id] = len(out_ds.annotations) - before
    out_path = out / "transferred.json"
    save_coco(out_ds, out_path)

    _write_report(
        out,
        "transfer",
        params={"stride": stride, "count": count, "offset": offset, "min_area": min_area},
        inputs={"dataset": dataset_path, "clips_dir": clips_dir},
        outputs={"dataset": out_path},
        counts={
            "clips": len(clips),
            "images_added": len(out_ds.images) - len(ds.images),
            "annotations_added": len(out_ds.annotations) - len(ds.annotations),
            "per_clip_annotations": per_clip,
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------- disocclude

def cmd_disocclude(args) -> int:
    cfg = Config.load(args.config)
    out = _out_dir(cfg, args)
    flows_dir = cfg.path("flows_dir", args.flows_dir)
    params = disocclusion.DenseMaskParams(
        tau_vis=float(cfg.param("dense_mask", "tau_vis", args.tau_vis, 0.9)),
        tau_conf=float(cfg.param("dense_mask", "tau_conf", args.tau_conf, 0.1)),
        sigma=float(cfg.param("dense_mask", "sigma", args.sigma, 8.0)),
        tau_w=float(cfg.param("dense_mask", "tau_w", args.tau_w, 0.5)),
    )
    flow_paths = sorted(Path(flows_dir).glob("*.flw1"))
    if not flow_paths:
        raise IntegrityError(f"{flows_dir}: no .flw1 files found")

    masks_root = out / "masks"
    frames = 0
    valid_sum = 0.0
    for flow_path in flow_paths:
        clip_id = flow_path.stem
        field = tensorio.load_flow(flow_path)
        clip_dir = masks_root / clip_id
        clip_dir.mkdir(parents=True, exist_ok=True)
        for t in range(field.frames):
            mask = disocclusion.dense_validity_mask(field, t, params)
            with open(clip_dir / f"{t}.json", "w", encoding="utf-8") as fh:
                json.dump(mask_to_json(rle_encode(mask)), fh,
                          sort_keys=True, separators=(",", ":"))
                fh.write("\n")
            valid_sum += disocclusion.mask_valid_fraction(mask)
            frames += 1

    _write_report(
        out,
        "disocclude",
        params={"tau_vis": params.tau_vis, "tau_conf": params.tau_conf,
                "sigma": params.sigma, "tau_w": params.tau_w},
        inputs={"flows_dir": flows_dir},
        outputs={"masks_dir": masks_root},
        counts={"clips": len(flow_paths), "frames": frames,
                "mean_valid_fraction": valid_sum / frames},
    )
    return EXIT_OK


# ---------------------------------------------------------------- pseudo

def _mask_for_image(masks_dir: Path, image) -> np.ndarray:
    prov = image.provenance
    mask_path = masks_dir / prov.clip_id / f"{prov.frame_index}.json"
    with open(mask_path, encoding="utf-8") as fh:
        mask = mask_from_json(json.load(fh))
    if (mask.height, mask.width) != (image.height, image.width):
        raise IntegrityError(
            f"{mask_path}: mask is {mask.width}x{mask.height}, "
            f"image {image.id} is {image.width}x{image.height}"
        )
    return rle_decode(mask)


def cmd_pseudo(args) -> int:
    cfg = Config.load(args.config)
    out = _out_dir(cfg, args)
    dataset_path = cfg.path("dataset", args.dataset)
    predictions_path = cfg.path("predictions", args.predictions)
    masks_dir = cfg.path("masks_dir", args.masks_dir)
    params = pseudolabel.PseudoLabelParams(
        conf_thr=float(cfg.param("pseudo", "conf_thr", args.conf_thr, 0.7)),
        area_ratio_thr=float(
            cfg.param("pseudo", "area_ratio_thr", args.area_ratio_thr, 0.5)
        ),
        iou_thr=float(cfg.param("pseudo", "iou_thr", args.iou_thr, 0.5)),
    )

    ds = load_coco(dataset_path)
    preds = pseudolabel.load_predictions(predictions_path)
    by_image: dict[int, list[pseudolabel.Prediction]] = {}
    for pred in preds:
        by_image.setdefault(pred.image_id, []).append(pred)

    kept: list = []
    skipped_no_mask = 0
    for image_id in sorted(by_image):
        image = ds.image_by_id(image_id)
        if image is None:
            raise IntegrityError(f"predictions reference unknown image {image_id}")
        if image.provenance is None:
            skipped_no_mask += len(by_image[image_id])  # real frame: no mask exists
            continue
        mask = _mask_for_image(masks_dir, image)
        kept.extend(
            pseudolabel.select_pseudo_labels(
                by_image[image_id], list(ds.annotations_for(image_id)), mask, params
            )
        )
    out_ds = pseudolabel.merge_pseudo(ds, kept)
    out_path = out / "pseudo.json"
    save_coco(out_ds, out_path)

    _write_report(
        out,
        "pseudo",
        params={"conf_thr": params.conf_thr, "area_ratio_thr": params.area_ratio_thr,
                "iou_thr": params.iou_thr},
        inputs={"dataset": dataset_path, "predictions": predictions_path,
                "masks_dir": masks_dir},
        outputs={"dataset": out_path},
        counts={"predictions": len(preds), "kept": len(kept),
                "skipped_no_mask": skipped_no_mask},
    )
    return EXIT_OK


# ---------------------------------------------------------------- coverage

def cmd_coverage(args) -> int:
    cfg = Config.load(args.config)
    out = _out_dir(cfg, args)
    u_path = cfg.path("embeddings_u", args.embeddings_u)
    d_path = cfg.path("embeddings_d", args.embeddings_d)
    recall_params = coverage_mod.RecallParams(
        k=int(cfg.param("recall", "k", args.k, 3))
    )
    kid_params = coverage_mod.KidParams(
        subset_size=int(cfg.param("kid", "subset_size", args.subset_size)),
        n_subsets=int(cfg.param("kid", "n_subsets", args.n_subsets, 100)),
        seed=int(cfg.param("kid", "seed", args.seed, 0)),
    )
    u = tensorio.load_embeddings(u_path, tensorio.default_sidecar(u_path))
    d = tensorio.load_embeddings(d_path, tensorio.default_sidecar(d_path))
    report = coverage_mod.coverage_report(u, d, recall_params, kid_params)
    out_path = out / "coverage.json"
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

    _write_report(
        out,
        "coverage",
        params=report["params"],
        inputs={"embeddings_u": u_path, "embeddings_d": d_path},
        outputs={"report": out_path},
        counts={"u_rows": u.count, "d_rows": d.count, "recall": report["recall"],
                "kid_mean": report["kid_mean"], "kid_std": report["kid_std"]},
    )
    return EXIT_OK


# ---------------------------------------------------------------- curate

def cmd_curate(args) -> int:
    cfg = Config.load(args.config)
    out = _out_dir(cfg, args)
    dataset_path = cfg.path("dataset", args.dataset)
    ds = load_coco(dataset_path)

    if args.action == "filter":
        scores_path = cfg.path("scores", args.scores)
        remove_fraction = float(
            cfg.param("curation", "remove_fraction", args.remove_fraction, 0.1)
        )
        scores = tensorio.load_scores(scores_path)
        ids = [img.id for img in ds.images if img.provenance is not None]
        ids.sort()
        kept = curation.score_filter(scores, [str(i) for i in ids], remove_fraction)
        kept_ids = [int(i) for i in kept]
        out_path = out / "kept_ids.json"
        curation.save_kept_ids(kept_ids, out_path)
        _write_report(
            out,
            "curate",
            params={"action": "filter", "remove_fraction": remove_fraction},
            inputs={"dataset": dataset_path, "scores": scores_path},
            outputs={"kept_ids": out_path},
            counts={"candidates": len(ids), "kept": len(kept_ids),
                    "removed": len(ids) - len(kept_ids)},
        )
        return EXIT_OK

    real = sorted(
        (img for img in ds.images if img.provenance is None), key=lambda im: im.id
    )
    if args.action == "resize":
        max_area = int(cfg.param("curation", "max_area", args.max_area,
                                 curation.DEFAULT_MAX_AREA))
        multiple = int(cfg.param("curation", "multiple", None, curation.DEFAULT_MULTIPLE))
        plans = {
            str(img.id): list(curation.plan_resize(img.width, img.height,
                                                   max_area, multiple))
            for img in real
        }
        out_path = out / "resize_plans.json"
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(plans, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
        _write_report(
            out,
            "curate",
            params={"action": "resize", "max_area": max_area, "multiple": multiple},
            inputs={"dataset": dataset_path},
            outputs={"resize_plans": out_path},
            counts={"images": len(real)},
        )
        return EXIT_OK

    # action == "crops"
    crop_w = int(cfg.param("curation", "crop_w", args.crop_w, curation.DEFAULT_CROP[0]))
    crop_h = int(cfg.param("curation", "crop_h", args.crop_h, curation.DEFAULT_CROP[1]))
    n_crops = int(cfg.param("curation", "n_crops", args.n_crops, 5))
    rescale = bool(cfg.param("curation", "rescale", args.rescale or None, False))
    seed = int(cfg.param("curation", "crop_seed", args.seed, 0))
    plans = curation.plan_crops_batch(
        [(img.id, img.width, img.height) for img in real],
        n_crops, seed, crop_w=crop_w, crop_h=crop_h, rescale=rescale,
    )
    out_path = out / "crop_plans.json"
    curation.save_crop_plans(plans, out_path)
    _write_report(
        out,
        "curate",
        params={"action": "crops", "crop_w": crop_w, "crop_h": crop_h,
                "n_crops": n_crops, "rescale": rescale, "seed": seed},
        inputs={"dataset": dataset_path},
        outputs={"crop_plans": out_path},
        counts={"images": len(real), "crops": sum(len(p.rects) for p in plans)},
    )
    return EXIT_OK


# ---------------------------------------------------------------- manifest

def _restrict_synthetic(ds: Dataset, kept_ids: set[int]) -> Dataset:
    images = tuple(
        img for img in ds.images
        if img.provenance is None or img.id in kept_ids
    )
    image_ids = {img.id for img in images}
    annotations = tuple(a for a in ds.annotations if a.image_id in image_ids)
    return Dataset(
        images=images,
        annotations=annotations,
        categories=ds.categories,
        category_extras=ds.category_extras,
        extras=ds.extras,
    )


def cmd_manifest(args) -> int:
    cfg = Config.load(args.config)
    out = _out_dir(cfg, args)
    dataset_path = cfg.path("dataset", args.dataset)
    epochs = int(cfg.param("manifest", "epochs", args.epochs, 8))
    seed = int(cfg.param("manifest", "seed", args.seed, 0))
    balanced = bool(cfg.param("manifest", "balanced",
                              False if args.no_balance else None, True))

    ds = load_coco(dataset_path)
    inputs = {"dataset": dataset_path}
    if args.kept_ids is not None:
        kept_path = Path(args.kept_ids)
        try:
            with open(kept_path, encoding="utf-8") as fh:
                kept = json.load(fh)
        except OSError as exc:
            raise FileFormatError(f"{kept_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{kept_path}: invalid JSON: {exc}") from exc
        ds = _restrict_synthetic(ds, {int(i) for i in kept})
        inputs["kept_ids"] = kept_path

    m = manifest_mod.build_manifest(ds, epochs, seed, balanced=balanced)
    out_path = out / "manifest.ndjson"
    manifest_mod.emit_manifest(m, out_path)

    real_per_epoch = [sum(1 for _, p in ep if p == manifest_mod.REAL) for ep in m.epochs]
    synth_per_epoch = [len(ep) - r for ep, r in zip(m.epochs, real_per_epoch)]
    warnings = ["synthetic pool is empty; epochs contain real images only"] \
        if m.synthetic_pool_empty else None
    _write_report(
        out,
        "manifest",
        params={"epochs": epochs, "seed": seed, "balanced": balanced},
        inputs=inputs,
        outputs={"manifest": out_path},
        counts={"epochs": epochs,
                "real_per_epoch": real_per_epoch,
                "synthetic_per_epoch": synth_per_epoch},
        warnings=warnings,
    )
    return EXIT_OK


# ---------------------------------------------------------------- fixtures

def cmd_fixtures(args) -> int:
    from . import fixtures

    out = Path(args.out)
    summary = fixtures.build_workspace(out, seed=args.seed)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its values")
    sub.add_argument("--out", help="output directory (config: paths.out_dir)")
    sub.add_argument("--seed", type=int, help="seed override for this stage")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stamp",
        description="Curate generated video clips into object-detection training data.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", help="check interchange files and clip directories")
    p.add_argument("paths", nargs="+", help="files or clip directories to validate")
    p.add_argument("--report", help="write the full JSON validation report here")
    p.set_defaults(fn=cmd_validate)

    p = subs.add_parser("transfer", help="attach clip masks to the dataset as boxes")
    _add_common(p)
    p.add_argument("--dataset", help="input dataset JSON")
    p.add_argument("--clips-dir", help="directory of clip mask directories")
    p.add_argument("--stride", type=int, help="frame stride")
    p.add_argument("--frames", type=int, help="number of frames to select per clip")
    p.add_argument("--offset", type=int, help="first selected frame index")
    p.add_argument("--min-area", type=float, help="minimum transferred box area")
    p.set_defaults(fn=cmd_transfer)

    p = subs.add_parser("disocclude", help="compute dense validity masks from flows")
    _add_common(p)
    p.add_argument("--flows-dir", help="directory of .flw1 trajectory files")
    p.add_argument("--tau-vis", type=float, help="visibility threshold")
    p.add_argument("--tau-conf", type=float, help="confidence threshold")
    p.add_argument("--sigma", type=float, help="Gaussian std in pixels")
    p.add_argument("--tau-w", type=float, help="density threshold")
    p.set_defaults(fn=cmd_disocclude)

    p = subs.add_parser("pseudo", help="select pseudo-labels from detector predictions")
    _add_common(p)
    p.add_argument("--dataset", help="input dataset JSON (after transfer)")
    p.add_argument("--predictions", help="detector predictions JSON")
    p.add_argument("--masks-dir", help="validity masks directory (from disocclude)")
    p.add_argument("--conf-thr", type=float, help="confidence threshold (strict >)")
    p.add_argument("--area-ratio-thr", type=float,
                   help="invalid-area fraction threshold (inclusive >=)")
    p.add_argument("--iou-thr", type=float, help="duplicate IoU threshold (strict <)")
    p.set_defaults(fn=cmd_pseudo)

    p = subs.add_parser("coverage", help="coverage recall and kernel distance")
    _add_common(p)
    p.add_argument("--embeddings-u", help="EMB1 file of query/validation embeddings")
    p.add_argument("--embeddings-d", help="EMB1 file of reference/training embeddings")
    p.add_argument("--k", type=int, help="k-th nearest neighbor for radii")
    p.add_argument("--subset-size", type=int, help="rows per kernel-distance subset")
    p.add_argument("--n-subsets", type=int, help="number of seeded subsets")
    p.set_defaults(fn=cmd_coverage)

    p = subs.add_parser("curate", help="score filtering and generation planning")
    _add_common(p)
    p.add_argument("--action", choices=("filter", "crops", "resize"), required=True)
    p.add_argument("--dataset", help="input dataset JSON")
    p.add_argument("--scores", help="scores JSON (filter action)")
    p.add_argument("--remove-fraction", type=float, help="fraction of lowest scores to drop")
    p.add_argument("--crop-w", type=int, help="crop width (crops action)")
    p.add_argument("--crop-h", type=int, help="crop height (crops action)")
    p.add_argument("--n-crops", type=int, help="crops per image")
    p.add_argument("--rescale", action="store_true", help="draw a random downscale first")
    p.add_argument("--max-area", type=int, help="area cap (resize action)")
    p.set_defaults(fn=cmd_curate)

    p = subs.add_parser("manifest", help="emit ratio-balanced per-epoch manifests")
    _add_common(p)
    p.add_argument("--dataset", help="input dataset JSON")
    p.add_argument("--epochs", type=int, help="number of epochs to emit")
    p.add_argument("--no-balance", action="store_true",
                   help="ablation baseline: shuffled concatenated pool per epoch")
    p.add_argument("--kept-ids", help="JSON id list restricting the synthetic pool")
    p.set_defaults(fn=cmd_manifest)

    p = subs.add_parser("fixtures", help="write the deterministic toy workspace")
    p.add_argument("--out", required=True, help="workspace directory to create")
    p.add_argument("--seed", type=int, default=2024, help="workspace seed")
    p.set_defaults(fn=cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except StampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.__cause__, OSError):
            return EXIT_IO
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
