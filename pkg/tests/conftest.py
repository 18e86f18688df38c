import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

DATA_DIR = Path(__file__).parent / "data"

START = datetime(2014, 12, 28, 6, 0, 0, tzinfo=timezone.utc)


def save_png(path: Path, array: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(array.astype(np.uint8)).save(path)


def record_line(rid, minute=0, text="plane found", image_path=None, label=None):
    doc = {
        "id": rid,
        "timestamp": (START + timedelta(minutes=minute)).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "text": text,
        "image_path": image_path if image_path is not None else f"img/{rid}.png",
    }
    if label is not None:
        doc["label"] = label
    return json.dumps(doc)


def striped_image(vertical: bool, size: int = 64, lo: int = 40, hi: int = 215) -> np.ndarray:
    idx = np.arange(size) // 8 % 2
    line = np.where(idx == 1, hi, lo).astype(np.uint8)
    plane = np.tile(line, (size, 1)) if vertical else np.tile(line[:, None], (1, size))
    return np.stack([plane] * 3, axis=-1)


@pytest.fixture
def tiny_store(tmp_path):
    """A minimal ingested store: 6 labeled multimodal records."""
    from tweetfuse.corpus import CorpusStore, ingest_stream

    root = tmp_path / "store"
    root.mkdir()
    lines = []
    for i in range(6):
        rid = f"r{i}"
        label = i % 2
        save_png(root / "img" / f"{rid}.png", striped_image(vertical=label == 1))
        text = "black box found rescue" if label else "search still ongoing missing"
        lines.append(record_line(rid, minute=i, text=text, label=label))
    store = CorpusStore(root)
    report = ingest_stream(lines, store)
    assert report.accepted == 6
    return store
