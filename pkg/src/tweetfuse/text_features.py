"""Text channel: normalization, tokenization, stopword removal, stemming,
TF-IDF vectorization, and event-keyword extraction.

The preprocessing chain is lowercase -> whitespace tokenize (stripping
punctuation code points) -> stopword filter -> stem.  TF-IDF uses raw
term counts times ln(N/df); terms outside the vocabulary are dropped at
vectorization time.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field

from .errors import DataError
from .porter import stem as porter_stem


@dataclass(frozen=True)
class FeatureVector:
    """Sparse nonnegative-index -> weight map with an explicit dimension.

    Absent indices mean weight zero; only nonzero weights are stored.
    """

    entries: dict[int, float]
    dim: int

    def __post_init__(self):
        for idx in self.entries:
            if not 0 <= idx < self.dim:
                raise DataError(f"feature index {idx} out of range for dim {self.dim}")

    def get(self, idx: int) -> float:
        return self.entries.get(idx, 0.0)

    def to_dense(self):
        import numpy as np

        v = np.zeros(self.dim, dtype=np.float64)
        for idx, w in self.entries.items():
            v[idx] = w
        return v

    @classmethod
    def from_dense(cls, values) -> "FeatureVector":
        entries = {i: float(v) for i, v in enumerate(values) if v != 0.0}
        return cls(entries=entries, dim=len(values))


@dataclass
class Vocabulary:
    """term -> (index, document frequency), plus the corpus document count."""

    terms: dict[str, tuple[int, int]]
    n_docs: int

    def __len__(self) -> int:
        return len(self.terms)


def normalize_text(text: str) -> str:
    """Unicode lowercasing; nothing else is changed."""
    return text.lower()


def _strip_punct(token: str) -> str:
    return "".join(
        ch for ch in token if not unicodedata.category(ch).startswith("P")
    )


def tokenize(text: str) -> list[str]:
    """Split on whitespace, strip punctuation code points, drop empties.

    Hash and at signs carry the punctuation general category, so hashtag
    and mention markers disappear here along with hyphens and quotes.
    """
    out = []
    for raw in text.split():
        tok = _strip_punct(raw)
        if tok:
            out.append(tok)
    return out


def remove_stopwords(tokens: list[str], stoplist) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def stem(token: str) -> str:
    return porter_stem(token)


def text_to_terms(text: str, stoplist) -> list[str]:
    """Full preprocessing chain for one document."""
    return [stem(t) for t in remove_stopwords(tokenize(normalize_text(text)), stoplist)]


def build_vocabulary(docs: list[list[str]]) -> Vocabulary:
    """Index terms in first-appearance order; df counts documents."""
    if not docs:
        raise DataError("cannot build a vocabulary from an empty document list")
    terms: dict[str, tuple[int, int]] = {}
    for doc in docs:
        seen = set()
        for t in doc:
            if t not in terms:
                terms[t] = (len(terms), 0)
            if t not in seen:
                idx, df = terms[t]
                terms[t] = (idx, df + 1)
                seen.add(t)
    return Vocabulary(terms=terms, n_docs=len(docs))


def tfidf_vector(doc: list[str], vocab: Vocabulary) -> FeatureVector:
    """weight(t) = count(t, doc) * ln(n_docs / df(t)); OOV terms skipped."""
    counts: dict[str, int] = {}
    for t in doc:
        if t in vocab.terms:
            counts[t] = counts.get(t, 0) + 1
    entries: dict[int, float] = {}
    for t, tf in counts.items():
        idx, df = vocab.terms[t]
        w = tf * math.log(vocab.n_docs / df)
        if w != 0.0:
            entries[idx] = w
    return FeatureVector(entries=entries, dim=len(vocab))


@dataclass
class KeywordReport:
    """Ranked (term, composite weight) pairs, weights nonincreasing."""

    ranked: list[tuple[str, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["term,weight"]
        for term, w in self.ranked:
            lines.append(f"{term},{w!r}")
        return "\n".join(lines) + "\n"


def extract_event_keywords(
    positive_docs: list[list[str]], vocab: Vocabulary, k: int = 100
) -> KeywordReport:
    """Sum each term's TF-IDF weight over the positive documents and rank.

    Ties are broken lexicographically; k larger than the vocabulary
    returns every term.
    """
    if k < 0:
        raise DataError(f"keyword count must be nonnegative, got {k}")
    composite = {t: 0.0 for t in vocab.terms}
    for doc in positive_docs:
        vec = tfidf_vector(doc, vocab)
        for t, (idx, _df) in vocab.terms.items():
            w = vec.entries.get(idx)
            if w:
                composite[t] += w
    ranked = sorted(composite.items(), key=lambda kv: (-kv[1], kv[0]))
    return KeywordReport(ranked=ranked[:k])
