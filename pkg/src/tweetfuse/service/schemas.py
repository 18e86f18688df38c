"""Request and response models for the HTTP service.

Paths in requests (store roots, model bundles, output files) are
interpreted on the service host's filesystem; record lines and rendered
reports travel in the body, so a thin client never parses domain files
itself.  Infinite floats are legal values here (the calibrated threshold
can be -inf), hence the non-default serialization setting.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class _Model(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants", extra="forbid")


class HealthResponse(_Model):
    status: Literal["ok"] = "ok"


class ErrorBody(_Model):
    detail: str
    kind: Literal["usage", "data", "io"]


class IngestRequest(_Model):
    store: str
    lines: list[str]


class IngestResponse(_Model):
    accepted: int
    rejected_filter: int
    rejected_parse: int


class SynthRequest(_Model):
    store: str
    n: int = 600
    seed: int = 42
    text_noise: float = 0.3
    image_noise: float = 0.15


class SynthResponse(_Model):
    written: int
    store: str


class KeywordsRequest(_Model):
    store: str
    k: int = 100
    config: dict = Field(default_factory=dict)


class KeywordEntry(_Model):
    term: str
    weight: float


class KeywordsResponse(_Model):
    keywords: list[KeywordEntry]
    csv: str


class TrainRequest(_Model):
    store: str
    out: str
    config: dict = Field(default_factory=dict)


class TrainResponse(_Model):
    fingerprint: str
    model_path: str
    fusion_mode: str
    tau: Optional[float] = None
    n_train: int
    n_validation: int
    validation_accuracy: dict[str, float]


class EvaluateRequest(_Model):
    store: str
    model: str
    workers: int = 1


class EvaluateResponse(_Model):
    report: dict
    report_json: str
    table: str


class DetectRequest(_Model):
    model: str
    lines: list[str]
    image_root: str
    workers: int = 1


class DetectRow(_Model):
    id: str
    label: int
    channel: Literal["text", "image", "concat"]


class DetectResponse(_Model):
    rows: list[DetectRow]
