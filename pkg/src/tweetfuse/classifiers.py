"""The two classifiers behind the detection pipeline: exact KNN and a
linear SVM trained with the Pegasos stochastic subgradient schedule.

Both consume standardized features (per-dimension mean/std fitted on the
training set) and emit a label in {0, 1} plus a reliability score: vote
fraction for KNN, absolute decision margin for SVM.  Training is seeded
and single-threaded; trained models are immutable and prediction is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError
from .text_features import FeatureVector

_STD_FLOOR = 1e-9


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray  # elementwise >= 1e-9

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float


@dataclass(frozen=True)
class KnnModel:
    exemplars: np.ndarray  # (n, d) standardized
    labels: np.ndarray  # (n,) in {0, 1}
    k: int
    scaler: Scaler


@dataclass(frozen=True)
class SvmModel:
    w: np.ndarray
    b: float
    lam: float
    scaler: Scaler


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, np.ndarray):
        m = np.asarray(X, dtype=np.float64)
        if m.ndim != 2:
            raise DataError(f"feature matrix must be 2-D, got shape {m.shape}")
        return m
    rows = [x.to_dense() if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64) for x in X]
    if not rows:
        raise DataError("empty feature list")
    dims = {r.shape[0] for r in rows}
    if len(dims) != 1:
        raise DataError(f"inconsistent feature dimensionalities: {sorted(dims)}")
    return np.stack(rows).astype(np.float64)


def _as_vector(x, dim: int) -> np.ndarray:
    v = x.to_dense() if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    if v.shape != (dim,):
        raise DataError(f"feature dimension mismatch: got {v.shape[0]}, expected {dim}")
    return v


def _check_labels(y, n: int) -> np.ndarray:
    labels = np.asarray(y, dtype=np.int64)
    if labels.shape != (n,):
        raise DataError(f"got {labels.shape[0] if labels.ndim else 0} labels for {n} samples")
    if not np.all((labels == 0) | (labels == 1)):
        raise DataError("labels must be 0 or 1")
    return labels


def fit_scaler(X) -> Scaler:
    """Per-dimension mean and population std; zero variance floors to 1e-9."""
    m = _as_matrix(X)
    if m.shape[0] == 0:
        raise DataError("cannot fit a scaler on an empty set")
    mean = m.mean(axis=0)
    std = m.std(axis=0)  # population (ddof=0)
    std = np.maximum(std, _STD_FLOOR)
    return Scaler(mean=mean, std=std)


def knn_train(X, y, k: int = 5) -> KnnModel:
    m = _as_matrix(X)
    labels = _check_labels(y, m.shape[0])
    if k < 1 or k % 2 == 0:
        raise UsageError(f"k must be odd and positive, got {k}")
    if k > m.shape[0]:
        raise UsageError(f"k={k} exceeds the {m.shape[0]} training samples")
    scaler = fit_scaler(m)
    return KnnModel(exemplars=scaler.transform(m), labels=labels, k=k, scaler=scaler)


def knn_predict(m: KnnModel, x) -> Prediction:
    """Majority vote among the k nearest standardized exemplars.

    Distance ties resolve to the lower exemplar index; score is the
    winning vote fraction, always in [0.5, 1] for odd k.
    """
    tx = m.scaler.transform(_as_vector(x, m.exemplars.shape[1]))
    diff = m.exemplars - tx
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    nearest = np.argsort(dist, kind="stable")[: m.k]
    ones = int(m.labels[nearest].sum())
    if 2 * ones > m.k:
        return Prediction(label=1, score=ones / m.k)
    return Prediction(label=0, score=(m.k - ones) / m.k)


def svm_train(X, y, lam: float = 1e-4, epochs: int = 100, seed: int = 0) -> SvmModel:
    """Pegasos: stochastic subgradient descent on the primal hinge objective.

    Labels map {0 -> -1, 1 -> +1}; the step size is 1/(lam * t) with a
    global update counter; each epoch visits a seeded label-independent
    shuffle of the training set.  The bias is an unregularized extra
    dimension: it moves only on margin violations and is never shrunk.
    """
    if lam <= 0:
        raise UsageError(f"lambda must be positive, got {lam}")
    if epochs < 1:
        raise UsageError(f"epochs must be positive, got {epochs}")
    m = _as_matrix(X)
    n = m.shape[0]
    if n < 2:
        raise DataError(f"need at least 2 training samples, got {n}")
    labels = _check_labels(y, n)
    if len(set(labels.tolist())) < 2:
        raise DataError("single-class training set: both labels required")
    scaler = fit_scaler(m)
    Z = scaler.transform(m)
    yy = (2 * labels - 1).astype(np.float64)

    w = np.zeros(Z.shape[1], dtype=np.float64)
    b = 0.0
    t = 0
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            violated = yy[i] * (np.dot(w, Z[i]) + b) < 1.0
            w *= 1.0 - 1.0 / t
            if violated:
                w += (eta * yy[i]) * Z[i]
                b += eta * yy[i]
    return SvmModel(w=w, b=b, lam=lam, scaler=scaler)


def svm_predict(m: SvmModel, x) -> Prediction:
    """d = w . transform(x) + b; label 1 iff d >= 0; score = |d|."""
    tx = m.scaler.transform(_as_vector(x, m.w.shape[0]))
    d = float(np.dot(m.w, tx) + m.b)
    return Prediction(label=1 if d >= 0 else 0, score=abs(d))


def svm_objective(m: SvmModel, X, y) -> float:
    """Primal objective: lam/2 |w|^2 + mean hinge loss (for diagnostics)."""
    Z = m.scaler.transform(_as_matrix(X))
    labels = _check_labels(y, Z.shape[0])
    yy = (2 * labels - 1).astype(np.float64)
    margins = yy * (Z @ m.w + m.b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float(m.lam / 2 * np.dot(m.w, m.w) + hinge.mean())


def predict(model, x) -> Prediction:
    if isinstance(model, KnnModel):
        return knn_predict(model, x)
    if isinstance(model, SvmModel):
        return svm_predict(model, x)
    raise UsageError(f"unknown model type {type(model).__name__}")
