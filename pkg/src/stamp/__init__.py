"""stamp: turn generated video clips into training-ready detection data.

The pipeline stages — annotation transfer, disocclusion validity masks,
pseudo-label selection, coverage/fidelity metrics, curation policies, and
ratio-balanced manifests — are pure functions over immutable values, wired
together by interchange files and the `stamp` command-line tool.
"""

from .coco import load_coco, save_coco
from .coverage import KidParams, RecallParams, kid, knn_radii, recall
from .curation import (
    CropPlan,
    plan_crops,
    plan_crops_batch,
    plan_resize,
    score_filter,
    select_frames,
)
from .disocclusion import (
    DenseMaskParams,
    apply_validity_mask,
    convex_hull,
    dense_validity_mask,
    extreme_rectangle,
    grid_points,
    invalid_fraction,
    polygon_validity_mask,
)
from .errors import FileFormatError, IntegrityError, StampError
from .manifest import Manifest, build_manifest, emit_manifest, parse_manifest
from .model import (
    Annotation,
    AnnotationSource,
    BBox,
    BinaryMask,
    Dataset,
    ImageRecord,
    SyntheticProvenance,
    bbox_from_mask,
    iou,
    mask_from_json,
    mask_to_json,
    rle_decode,
    rle_encode,
)
from .pseudolabel import (
    Prediction,
    PseudoLabelParams,
    load_predictions,
    merge_pseudo,
    save_predictions,
    select_pseudo_labels,
)
from .rng import SplitMix64, derive_seed
from .tensorio import (
    EmbeddingMatrix,
    FlowField,
    TrackGrid,
    load_embeddings,
    load_flow,
    load_scores,
    load_tracks,
    save_embeddings,
    save_flow,
    save_scores,
    save_tracks,
    validate_file,
)
from .transfer import ClipMaskSet, load_clip, save_clip, transfer_annotations, transfer_clips

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "AnnotationSource",
    "BBox",
    "BinaryMask",
    "ClipMaskSet",
    "CropPlan",
    "Dataset",
    "DenseMaskParams",
    "EmbeddingMatrix",
    "FileFormatError",
    "FlowField",
    "ImageRecord",
    "IntegrityError",
    "KidParams",
    "Manifest",
    "Prediction",
    "PseudoLabelParams",
    "RecallParams",
    "SplitMix64",
    "StampError",
    "SyntheticProvenance",
    "TrackGrid",
    "apply_validity_mask",
    "bbox_from_mask",
    "build_manifest",
    "convex_hull",
    "dense_validity_mask",
    "derive_seed",
    "emit_manifest",
    "extreme_rectangle",
    "grid_points",
    "invalid_fraction",
    "iou",
    "kid",
    "knn_radii",
    "load_clip",
    "load_coco",
    "load_embeddings",
    "load_flow",
    "load_predictions",
    "load_scores",
    "load_tracks",
    "mask_from_json",
    "mask_to_json",
    "merge_pseudo",
    "parse_manifest",
    "plan_crops",
    "plan_crops_batch",
    "plan_resize",
    "polygon_validity_mask",
    "recall",
    "rle_decode",
    "rle_encode",
    "save_clip",
    "save_coco",
    "save_embeddings",
    "save_flow",
    "save_predictions",
    "save_scores",
    "save_tracks",
    "score_filter",
    "select_frames",
    "select_pseudo_labels",
    "transfer_annotations",
    "transfer_clips",
    "validate_file",
]
