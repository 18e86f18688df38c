"""Record ingestion, multimodal filtering, the on-disk store, and
chronological splitting.

The store is a directory holding `corpus.jsonl` (one record per line,
append-only) plus the image files the records reference.  Iteration is
always timestamp-ascending with ties broken by id, regardless of append
order.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from .errors import DataError, RecordParseError, StoreIOError

# alphabetic code points above this are outside Basic Latin, Latin-1
# Supplement and Latin Extended-A/B
_LATIN_LIMIT = 0x250

_REQUIRED_KEYS = ("id", "timestamp", "text", "image_path")


@dataclass(frozen=True)
class TweetRecord:
    id: str
    timestamp: datetime
    text: str
    image_path: str
    label: Optional[int] = None

    def to_json(self) -> str:
        doc = {
            "id": self.id,
            "timestamp": self.timestamp.astimezone(timezone.utc).strftime(
                "%Y-%m-%dT%H:%M:%SZ"
            ),
            "text": self.text,
            "image_path": self.image_path,
        }
        if self.label is not None:
            doc["label"] = self.label
        return json.dumps(doc, sort_keys=True, ensure_ascii=False)


@dataclass(frozen=True)
class SplitSpec:
    fractions: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        if any(f < 0 for f in self.fractions):
            raise DataError(f"split fractions must be nonnegative: {self.fractions}")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise DataError(f"split fractions must sum to 1: {self.fractions}")


@dataclass(frozen=True)
class IngestReport:
    accepted: int = 0
    rejected_filter: int = 0
    rejected_parse: int = 0


def _parse_timestamp(value, line_no):
    if not isinstance(value, str):
        raise RecordParseError(f"timestamp must be a string, got {value!r}", line_no)
    try:
        # accept the Z suffix on every supported interpreter
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise RecordParseError(f"unparseable timestamp {value!r}", line_no) from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_tweet_record(
    line: str, line_no: int | None = None, ignore_label: bool = False
) -> TweetRecord:
    """Parse one JSONL line; unknown keys are ignored.

    With ignore_label=True any label key is dropped unread, for flows
    that must stay blind to ground truth.
    """
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordParseError(f"malformed JSON ({exc.msg})", line_no) from None
    if not isinstance(doc, dict):
        raise RecordParseError("record must be a JSON object", line_no)
    for key in _REQUIRED_KEYS:
        if key not in doc:
            raise RecordParseError(f"missing required key {key!r}", line_no)
    rid, text, image_path = doc["id"], doc["text"], doc["image_path"]
    if not isinstance(rid, str) or not rid:
        raise RecordParseError(f"id must be a nonempty string, got {rid!r}", line_no)
    if not isinstance(text, str):
        raise RecordParseError(f"text must be a string, got {text!r}", line_no)
    if not isinstance(image_path, str) or not image_path:
        raise RecordParseError(
            f"image_path must be a nonempty string, got {image_path!r}", line_no
        )
    label = None
    if not ignore_label and "label" in doc and doc["label"] is not None:
        label = doc["label"]
        if isinstance(label, bool) or not isinstance(label, int) or label not in (0, 1):
            raise RecordParseError(f"label must be 0 or 1, got {label!r}", line_no)
    ts = _parse_timestamp(doc["timestamp"], line_no)
    return TweetRecord(id=rid, timestamp=ts, text=text, image_path=image_path, label=label)


def is_multimodal_latin(record: TweetRecord, image_root) -> bool:
    """True iff the record has nonblank Latin-script text and a readable image.

    Digits, punctuation, emoji and symbols never disqualify; any alphabetic
    code point outside the four Latin blocks does.
    """
    if not record.text.strip():
        return False
    path = Path(image_root) / record.image_path
    if not (path.is_file() and os.access(path, os.R_OK)):
        return False
    for ch in record.text:
        if ch.isalpha() and ord(ch) >= _LATIN_LIMIT:
            return False
    return True


class CorpusStore:
    """Append-only JSONL store rooted at a directory that also holds images."""

    def __init__(self, root):
        self.root = Path(root)

    @property
    def records_path(self) -> Path:
        return self.root / "corpus.jsonl"

    def load(self) -> list[TweetRecord]:
        """All stored records, timestamp-ascending, ties by id."""
        if not self.records_path.exists():
            return []
        records = []
        try:
            with open(self.records_path, encoding="utf-8") as fh:
                for i, line in enumerate(fh, start=1):
                    if line.strip():
                        records.append(parse_tweet_record(line, i))
        except OSError as exc:
            raise StoreIOError(f"cannot read store {self.records_path}: {exc}") from None
        records.sort(key=lambda r: (r.timestamp, r.id))
        return records

    def append(self, records: Iterable[TweetRecord]) -> None:
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            with open(self.records_path, "a", encoding="utf-8") as fh:
                for rec in records:
                    fh.write(rec.to_json() + "\n")
        except OSError as exc:
            raise StoreIOError(f"cannot write store {self.records_path}: {exc}") from None


def ingest_stream(lines: Iterable[str], store: CorpusStore) -> IngestReport:
    """Filter and append a stream of JSONL lines to the store.

    Every input line is counted exactly once: accepted, rejected by the
    multimodal filter, or rejected as unparseable.  A store write failure
    aborts with the partial-progress counts attached to the error.
    """
    accepted = 0
    rejected_filter = 0
    rejected_parse = 0
    try:
        store.root.mkdir(parents=True, exist_ok=True)
        fh = open(store.records_path, "a", encoding="utf-8")
    except OSError as exc:
        err = StoreIOError(f"cannot open store {store.records_path}: {exc}")
        err.partial = IngestReport()
        raise err from None
    try:
        with fh:
            for i, line in enumerate(lines, start=1):
                try:
                    rec = parse_tweet_record(line, i)
                except RecordParseError:
                    rejected_parse += 1
                    continue
                if not is_multimodal_latin(rec, store.root):
                    rejected_filter += 1
                    continue
                fh.write(rec.to_json() + "\n")
                accepted += 1
    except OSError as exc:
        err = StoreIOError(f"store write failed at {store.records_path}: {exc}")
        err.partial = IngestReport(accepted, rejected_filter, rejected_parse)
        raise err from None
    return IngestReport(
        accepted=accepted,
        rejected_filter=rejected_filter,
        rejected_parse=rejected_parse,
    )


def chronological_split(
    records: list[TweetRecord], spec: SplitSpec = SplitSpec()
) -> tuple[list[TweetRecord], list[TweetRecord], list[TweetRecord]]:
    """Floor-sized train and validation prefixes; the remainder is test."""
    if not records:
        raise DataError("cannot split an empty store")
    ordered = sorted(records, key=lambda r: (r.timestamp, r.id))
    n = len(ordered)
    n_train = int(n * spec.fractions[0])
    n_val = int(n * spec.fractions[1])
    train = ordered[:n_train]
    val = ordered[n_train : n_train + n_val]
    test = ordered[n_train + n_val :]
    return train, val, test
