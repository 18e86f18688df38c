"""Run configuration: one flat record of every knob the pipeline exposes,
loadable from a JSON file, with unknown keys rejected.

The fingerprint hashes only the fields that influence computed numbers
(descriptor parameters, classifier settings, fusion mode, seed, and the
stoplist contents) so that identical configurations produce identical
fingerprints regardless of where stores or files live.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from typing import Optional

from .errors import DataError, StoreIOError, UsageError
from .image_features import HogConfig, ImageConfig

_CLASSIFIERS = ("svm", "knn")
_FUSION_MODES = ("gate", "concat")

# fields that feed the fingerprint; paths and parallelism do not
_ALGORITHMIC_FIELDS = (
    "hog_resize",
    "hog_cell",
    "hog_block",
    "hog_bins",
    "glcm_levels",
    "hist_bins",
    "classifier",
    "k",
    "svm_lambda",
    "svm_epochs",
    "fusion",
    "seed",
)


@dataclass
class RunConfig:
    store: Optional[str] = None
    stoplist: Optional[str] = None  # path; None -> bundled list
    hog_resize: int = 64
    hog_cell: int = 8
    hog_block: int = 2
    hog_bins: int = 9
    glcm_levels: int = 16
    hist_bins: int = 16
    classifier: str = "svm"
    k: int = 5
    svm_lambda: float = 1e-4
    svm_epochs: int = 100
    fusion: str = "gate"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.classifier not in _CLASSIFIERS:
            raise UsageError(
                f"classifier must be one of {_CLASSIFIERS}, got {self.classifier!r}"
            )
        if self.fusion not in _FUSION_MODES:
            raise UsageError(
                f"fusion must be one of {_FUSION_MODES}, got {self.fusion!r}"
            )
        if self.k < 1 or self.k % 2 == 0:
            raise UsageError(f"k must be odd and positive, got {self.k}")
        if self.svm_lambda <= 0:
            raise UsageError(f"svm_lambda must be positive, got {self.svm_lambda}")
        if self.svm_epochs < 1:
            raise UsageError(f"svm_epochs must be positive, got {self.svm_epochs}")
        if self.workers < 1:
            raise UsageError(f"workers must be positive, got {self.workers}")
        # descriptor geometry checks happen via HogConfig
        self.image_config()

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise DataError(f"configuration must be a JSON object, got {type(doc).__name__}")
        unknown = sorted(set(doc) - set(cls.field_names()))
        if unknown:
            raise DataError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise StoreIOError(f"cannot read configuration {path}: {exc}") from None
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DataError(f"configuration {path} is not valid JSON: {exc.msg}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def algorithmic_dict(self) -> dict:
        return {k: getattr(self, k) for k in _ALGORITHMIC_FIELDS}

    def image_config(self) -> ImageConfig:
        return ImageConfig(
            hog=HogConfig(
                resize_to=(self.hog_resize, self.hog_resize),
                cell=self.hog_cell,
                block=self.hog_block,
                bins=self.hog_bins,
            ),
            glcm_levels=self.glcm_levels,
            hist_bins=self.hist_bins,
        )

    def fingerprint(self, stoplist_terms) -> str:
        payload = {
            "format": 1,
            "params": self.algorithmic_dict(),
            "stoplist_sha256": hashlib.sha256(
                "\n".join(stoplist_terms).encode("utf-8")
            ).hexdigest(),
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()
