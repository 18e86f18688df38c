"""End-to-end orchestration: stoplist loading, per-record feature
extraction, channel training, threshold calibration, the versioned model
bundle, and the evaluate/detect/keywords flows.

The bundle is a single JSON document (format 1) carrying everything
needed to classify new records: the stoplist, the vocabulary, both
channel models, and the fusion policy.  Floats survive the round trip
losslessly; file layout is canonical (sorted keys) so equal runs write
equal bytes.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from .classifiers import (
    KnnModel,
    Prediction,
    Scaler,
    SvmModel,
    knn_train,
    predict,
    svm_train,
)
from .config import RunConfig
from .corpus import (
    CorpusStore,
    SplitSpec,
    TweetRecord,
    chronological_split,
    is_multimodal_latin,
    parse_tweet_record,
)
from .errors import DataError, StoreIOError, TweetFuseError
from .evaluation import ComparisonReport, accuracy, compare_methods, confusion
from .fusion import calibrate_threshold, fuse_concat, fuse_gate
from .image_features import image_feature_vector, load_raster
from .text_features import (
    FeatureVector,
    KeywordReport,
    Vocabulary,
    build_vocabulary,
    extract_event_keywords,
    text_to_terms,
    tfidf_vector,
)

BUNDLE_FORMAT = 1


def load_stoplist(path=None) -> frozenset:
    """Load one-term-per-line stoplist; None means the bundled list."""
    if path is None:
        text = (
            resources.files("tweetfuse")
            .joinpath("data/stopwords.txt")
            .read_text(encoding="utf-8")
        )
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreIOError(f"cannot read stoplist {path}: {exc}") from None
    return frozenset(
        line.strip().lower() for line in text.splitlines() if line.strip()
    )


def _map_records(fn, records, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, records))
    return [fn(r) for r in records]


def _image_vector_for(record: TweetRecord, image_root, icfg) -> FeatureVector:
    try:
        raster = load_raster(Path(image_root) / record.image_path)
        return image_feature_vector(raster, icfg)
    except TweetFuseError as exc:
        raise DataError(f"record {record.id}: {exc}") from None


def _require_labels(records, split_name: str) -> list[int]:
    labels = []
    for r in records:
        if r.label is None:
            raise DataError(
                f"record {r.id}: unlabeled record in the {split_name} split"
            )
        labels.append(r.label)
    return labels


def _train_channel(cfg: RunConfig, X, y):
    if cfg.classifier == "knn":
        return knn_train(X, y, k=cfg.k)
    return svm_train(X, y, lam=cfg.svm_lambda, epochs=cfg.svm_epochs, seed=cfg.seed)


def _scaler_to_doc(s: Scaler) -> dict:
    return {"mean": s.mean.tolist(), "std": s.std.tolist()}


def _scaler_from_doc(doc: dict) -> Scaler:
    return Scaler(
        mean=np.asarray(doc["mean"], dtype=np.float64),
        std=np.asarray(doc["std"], dtype=np.float64),
    )


def _model_to_doc(model) -> dict:
    if isinstance(model, SvmModel):
        return {
            "kind": "svm",
            "w": model.w.tolist(),
            "b": model.b,
            "lambda": model.lam,
            "scaler": _scaler_to_doc(model.scaler),
        }
    return {
        "kind": "knn",
        "k": model.k,
        "labels": model.labels.tolist(),
        "exemplars": model.exemplars.tolist(),
        "scaler": _scaler_to_doc(model.scaler),
    }


def _model_from_doc(doc: dict):
    if doc["kind"] == "svm":
        return SvmModel(
            w=np.asarray(doc["w"], dtype=np.float64),
            b=float(doc["b"]),
            lam=float(doc["lambda"]),
            scaler=_scaler_from_doc(doc["scaler"]),
        )
    if doc["kind"] == "knn":
        return KnnModel(
            exemplars=np.asarray(doc["exemplars"], dtype=np.float64),
            labels=np.asarray(doc["labels"], dtype=np.int64),
            k=int(doc["k"]),
            scaler=_scaler_from_doc(doc["scaler"]),
        )
    raise DataError(f"unknown model kind {doc.get('kind')!r} in bundle")


def _vocab_to_doc(vocab: Vocabulary) -> dict:
    rows = sorted(
        ((idx, term, df) for term, (idx, df) in vocab.terms.items())
    )
    return {"terms": [[term, idx, df] for idx, term, df in rows], "n_docs": vocab.n_docs}


def _vocab_from_doc(doc: dict) -> Vocabulary:
    return Vocabulary(
        terms={term: (int(idx), int(df)) for term, idx, df in doc["terms"]},
        n_docs=int(doc["n_docs"]),
    )


def _load_labeled_splits(store_root):
    store = CorpusStore(store_root)
    records = store.load()
    if not records:
        raise DataError(f"store {store.root} is empty; ingest or synth records first")
    return store, chronological_split(records, SplitSpec())


def train_pipeline(cfg: RunConfig, store_root) -> tuple[dict, dict]:
    """Fit both channels on the train split, calibrate fusion on the
    validation split, and return (bundle, summary)."""
    store, (train, val, _test) = _load_labeled_splits(store_root)
    if not train or not val:
        raise DataError(
            f"store too small to split: {len(train)} train / {len(val)} validation records"
        )
    y_train = _require_labels(train, "train")
    y_val = _require_labels(val, "validation")
    if len(set(y_train)) < 2:
        raise DataError("train split contains a single class; need both labels")

    stoplist = load_stoplist(cfg.stoplist)
    terms_train = [text_to_terms(r.text, stoplist) for r in train]
    vocab = build_vocabulary(terms_train)
    text_train = [tfidf_vector(d, vocab) for d in terms_train]
    text_val = [
        tfidf_vector(text_to_terms(r.text, stoplist), vocab) for r in val
    ]

    icfg = cfg.image_config()
    image_fn = lambda r: _image_vector_for(r, store.root, icfg)
    image_train = _map_records(image_fn, train, cfg.workers)
    image_val = _map_records(image_fn, val, cfg.workers)

    text_model = _train_channel(cfg, text_train, y_train)
    image_model = _train_channel(cfg, image_train, y_train)

    text_preds = [predict(text_model, x) for x in text_val]
    image_preds = [predict(image_model, x) for x in image_val]
    val_acc_text = accuracy(confusion([p.label for p in text_preds], y_val))
    val_acc_image = accuracy(confusion([p.label for p in image_preds], y_val))

    score_kind = "vote_fraction" if cfg.classifier == "knn" else "margin"
    if cfg.fusion == "gate":
        tau, val_acc_fused = calibrate_threshold(text_preds, image_preds, y_val)
        fusion_doc = {
            "mode": "gate",
            "tau": tau,
            "score_kind": score_kind,
            "validation_accuracy": val_acc_fused,
        }
    else:
        concat_train = [fuse_concat(t, i) for t, i in zip(text_train, image_train)]
        concat_model = _train_channel(cfg, concat_train, y_train)
        concat_val = [fuse_concat(t, i) for t, i in zip(text_val, image_val)]
        fused_labels = [predict(concat_model, x).label for x in concat_val]
        val_acc_fused = accuracy(confusion(fused_labels, y_val))
        fusion_doc = {
            "mode": "concat",
            "model": _model_to_doc(concat_model),
            "score_kind": score_kind,
            "validation_accuracy": val_acc_fused,
        }

    stop_sorted = sorted(stoplist)
    bundle = {
        "format": BUNDLE_FORMAT,
        "fingerprint": cfg.fingerprint(stop_sorted),
        "config": cfg.algorithmic_dict(),
        "stoplist": stop_sorted,
        "vocab": _vocab_to_doc(vocab),
        "text_model": _model_to_doc(text_model),
        "image_model": _model_to_doc(image_model),
        "fusion": fusion_doc,
    }
    summary = {
        "fingerprint": bundle["fingerprint"],
        "n_train": len(train),
        "n_validation": len(val),
        "validation_accuracy": {
            "text": val_acc_text,
            "image": val_acc_image,
            "fusion": val_acc_fused,
        },
        "tau": fusion_doc.get("tau"),
        "fusion_mode": cfg.fusion,
    }
    return bundle, summary


def save_bundle(bundle: dict, path) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(bundle, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
    except OSError as exc:
        raise StoreIOError(f"cannot write model bundle {path}: {exc}") from None


def load_bundle(path) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StoreIOError(f"cannot read model bundle {path}: {exc}") from None
    try:
        bundle = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DataError(f"model bundle {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(bundle, dict) or bundle.get("format") != BUNDLE_FORMAT:
        raise DataError(
            f"model bundle {path} has unsupported format {bundle.get('format')!r}"
        )
    return bundle


class _BundleRuntime:
    """Deserialized bundle ready to classify records."""

    def __init__(self, bundle: dict):
        self.stoplist = frozenset(bundle["stoplist"])
        self.vocab = _vocab_from_doc(bundle["vocab"])
        self.text_model = _model_from_doc(bundle["text_model"])
        self.image_model = _model_from_doc(bundle["image_model"])
        self.fusion = bundle["fusion"]
        self.concat_model = (
            _model_from_doc(self.fusion["model"])
            if self.fusion["mode"] == "concat"
            else None
        )
        cfg_doc = dict(bundle["config"])
        cfg_doc.setdefault("workers", 1)
        self.config = RunConfig.from_dict(cfg_doc)
        self.image_config = self.config.image_config()

    def text_vector(self, record: TweetRecord) -> FeatureVector:
        return tfidf_vector(text_to_terms(record.text, self.stoplist), self.vocab)

    def image_vector(self, record: TweetRecord, image_root) -> FeatureVector:
        return _image_vector_for(record, image_root, self.image_config)

    def classify(self, record: TweetRecord, image_root) -> tuple[int, str, Prediction, Prediction]:
        """Returns (fused label, deciding channel, text pred, image pred)."""
        tvec = self.text_vector(record)
        ivec = self.image_vector(record, image_root)
        tp = predict(self.text_model, tvec)
        ip = predict(self.image_model, ivec)
        if self.fusion["mode"] == "gate":
            if tp.score < self.fusion["tau"]:
                return ip.label, "image", tp, ip
            return tp.label, "text", tp, ip
        fused = predict(self.concat_model, fuse_concat(tvec, ivec))
        return fused.label, "concat", tp, ip


def evaluate_pipeline(bundle: dict, store_root, workers: int = 1) -> ComparisonReport:
    """Three-way comparison on the untouched test third of the store."""
    store, (_train, _val, test) = _load_labeled_splits(store_root)
    if not test:
        raise DataError("test split is empty")
    truth = _require_labels(test, "test")
    rt = _BundleRuntime(bundle)
    results = _map_records(
        lambda r: rt.classify(r, store.root), test, workers
    )
    fused_labels = [lab for lab, _ch, _tp, _ip in results]
    text_labels = [tp.label for _lab, _ch, tp, _ip in results]
    image_labels = [ip.label for _lab, _ch, _tp, ip in results]
    return compare_methods(
        truth, text_labels, image_labels, fused_labels, bundle["fingerprint"]
    )


def detect_pipeline(
    bundle: dict, lines, image_root, workers: int = 1
) -> list[tuple[str, int, str]]:
    """Classify unlabeled JSONL records; labels in the input are ignored
    without being read.  Returns (id, label, channel) rows in input order."""
    rt = _BundleRuntime(bundle)
    records = []
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = parse_tweet_record(line, i, ignore_label=True)
        if not is_multimodal_latin(record, image_root):
            raise DataError(
                f"record {record.id}: fails the multimodal Latin filter "
                "(blank text, non-Latin text, or missing image)"
            )
        records.append(record)
    results = _map_records(lambda r: rt.classify(r, image_root), records, workers)
    return [
        (rec.id, lab, ch)
        for rec, (lab, ch, _tp, _ip) in zip(records, results)
    ]


def keywords_pipeline(cfg: RunConfig, store_root, k: int = 100) -> KeywordReport:
    """Top-k composite-weight terms over positive train-split documents."""
    _store, (train, _val, _test) = _load_labeled_splits(store_root)
    if not train:
        raise DataError("train split is empty; need records to index")
    stoplist = load_stoplist(cfg.stoplist)
    docs = [text_to_terms(r.text, stoplist) for r in train]
    vocab = build_vocabulary(docs)
    positive = [d for r, d in zip(train, docs) if r.label == 1]
    return extract_event_keywords(positive, vocab, k)
