"""Combining the two channels: reliability-gated late fusion (primary)
and feature-concatenation early fusion (alternative), plus threshold
calibration on a validation split.

The gate defers to the image channel exactly when the text score falls
strictly below the threshold; a score equal to the threshold keeps the
text decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .classifiers import Prediction
from .errors import DataError
from .text_features import FeatureVector


@dataclass(frozen=True)
class FusionPolicy:
    mode: str  # "gate" | "concat"
    tau: Optional[float] = None  # gate mode only
    score_kind: str = "margin"  # "margin" | "vote_fraction"


def fuse_gate(text_pred: Prediction, image_pred: Prediction, tau: float) -> int:
    if text_pred.score < tau:
        return image_pred.label
    return text_pred.label


def fuse_concat(text_vec: FeatureVector, image_vec: FeatureVector) -> FeatureVector:
    """[text | image]; image entry j lands at index dim_text + j."""
    entries = dict(text_vec.entries)
    for j, w in image_vec.entries.items():
        entries[text_vec.dim + j] = w
    return FeatureVector(entries=entries, dim=text_vec.dim + image_vec.dim)


def calibrate_threshold(
    text_preds: list[Prediction],
    image_preds: list[Prediction],
    labels: list[int],
) -> tuple[float, float]:
    """Pick the gate threshold maximizing fused accuracy on this set.

    The candidate grid is -inf, every distinct observed text score, and
    max score + 1; the -inf end reproduces text-only decisions and the
    top end image-only decisions, so the calibrated accuracy can never
    fall below either single channel here.  Ties go to the smallest
    candidate.
    """
    if not text_preds or not image_preds or not labels:
        raise DataError("calibration needs nonempty prediction and label lists")
    if not (len(text_preds) == len(image_preds) == len(labels)):
        raise DataError(
            "calibration lists must share one length, got "
            f"{len(text_preds)}/{len(image_preds)}/{len(labels)}"
        )
    scores = [p.score for p in text_preds]
    grid = [float("-inf")] + sorted(set(scores)) + [max(scores) + 1.0]
    n = len(labels)
    best_tau = None
    best_acc = -1.0
    for tau in grid:
        hits = sum(
            1
            for tp, ip, truth in zip(text_preds, image_preds, labels)
            if fuse_gate(tp, ip, tau) == truth
        )
        acc = hits / n
        if acc > best_acc:
            best_acc = acc
            best_tau = tau
    return best_tau, best_acc
