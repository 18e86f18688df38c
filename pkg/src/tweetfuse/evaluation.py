"""Confusion matrices, the accuracy metric, and the three-way
text/image/fusion comparison report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import DataError

_METHOD_ORDER = ("text", "image", "fusion")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def confusion(preds, truth, positive: int = 1) -> ConfusionMatrix:
    if len(preds) != len(truth):
        raise DataError(
            f"prediction/truth length mismatch: {len(preds)} vs {len(truth)}"
        )
    if not preds:
        raise DataError("cannot build a confusion matrix from empty lists")
    tp = tn = fp = fn = 0
    for p, t in zip(preds, truth):
        if p == positive:
            if t == positive:
                tp += 1
            else:
                fp += 1
        else:
            if t == positive:
                fn += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def accuracy(cm: ConfusionMatrix) -> float:
    """A = (TP + TN) / (TP + TN + FP + FN)."""
    if cm.total == 0:
        raise DataError("empty confusion matrix has no accuracy")
    return (cm.tp + cm.tn) / cm.total


@dataclass(frozen=True)
class ComparisonReport:
    """Per-method accuracy and confusion cells, rows ordered text, image, fusion."""

    matrices: dict  # method -> ConfusionMatrix
    n_records: int
    fingerprint: str

    def accuracy_of(self, method: str) -> float:
        return accuracy(self.matrices[method])

    def to_dict(self) -> dict:
        return {
            "methods": {
                m: {
                    "accuracy": self.accuracy_of(m),
                    "confusion": self.matrices[m].to_dict(),
                }
                for m in _METHOD_ORDER
            },
            "n_records": self.n_records,
            "fingerprint": self.fingerprint,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def render_table(self) -> str:
        lines = ["method  accuracy", "------  --------"]
        for m in _METHOD_ORDER:
            lines.append(f"{m:<6}  {self.accuracy_of(m):.4f}")
        return "\n".join(lines) + "\n"


def compare_methods(
    truth, text_labels, image_labels, fused_labels, fingerprint: str = ""
) -> ComparisonReport:
    """Assemble the report from per-method predicted labels on one test split."""
    if not truth:
        raise DataError("cannot evaluate on an empty test split")
    matrices = {
        "text": confusion(text_labels, truth),
        "image": confusion(image_labels, truth),
        "fusion": confusion(fused_labels, truth),
    }
    return ComparisonReport(
        matrices=matrices, n_records=len(truth), fingerprint=fingerprint
    )
