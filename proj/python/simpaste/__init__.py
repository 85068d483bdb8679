"""Geometry-aware cut-and-paste dataset builder and detection evaluator."""

from ._simpaste_core import (
    SimpasteError,
    average_precision,
    clip_to_target,
    compose,
    compute_pca,
    f1_score,
    iou,
    map_suite,
    mask_bbox,
    pr_f1,
    rotation_angle,
    run_cli,
    scale_factor,
    synth_scene,
)

__all__ = [
    "SimpasteError",
    "average_precision",
    "clip_to_target",
    "compose",
    "compute_pca",
    "f1_score",
    "iou",
    "map_suite",
    "mask_bbox",
    "pr_f1",
    "rotation_angle",
    "run_cli",
    "scale_factor",
    "synth_scene",
]
