"""Bag-of-character-n-grams text features and detection reliability filtering.

Text detections arrive from an OCR adapter or annotation sidecars as
(bbox, string) pairs.  This module turns them into binary n-gram vectors
over an ordered vocabulary, attaches the four bbox geometry features
(w, h, w+h, w/h), and rejects unreliable detections with a trained
logistic-regression filter (FPD).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DegenerateBboxError,
    DegenerateTrainingSetError,
    FeatureDimensionMismatchError,
    InvalidOrderError,
    MallnavError,
)
from .logreg import DEFAULT_ITERS, DEFAULT_REG, DEFAULT_STEP, fit_logistic, sigmoid

_NORM_RE = re.compile(r"[^a-z0-9]+")

FPD_MODEL_FORMAT = "mallnav-fpd"
FPD_MODEL_VERSION = 1


def normalize_text(text: str) -> str:
    """Lowercase and drop everything outside [a-z0-9]."""
    return _NORM_RE.sub("", text.lower())


@dataclass(frozen=True)
class NGramVocabulary:
    """Ordered list of lowercase character n-grams.

    Ordering is significant and persisted; gram i owns component i of
    every feature vector built against this vocabulary.
    """

    grams: tuple[str, ...]
    max_order: int
    source: str = "corpus-built"

    def __post_init__(self):
        if len(set(self.grams)) != len(self.grams):
            raise MallnavError("vocabulary contains duplicate grams")
        for g in self.grams:
            if not g:
                raise MallnavError("vocabulary contains an empty gram")
            if len(g) > self.max_order:
                raise MallnavError(f"gram {g!r} longer than max_order={self.max_order}")

    def __len__(self) -> int:
        return len(self.grams)


def build_vocabulary(names: list[str], max_order: int = 4) -> NGramVocabulary:
    """Enumerate every gram of length <= max_order occurring in the names.

    Order is first occurrence while scanning each normalized name left to
    right, shortest grams at each position first; stable across runs.
    """
    if max_order < 1:
        raise InvalidOrderError(f"max_order must be >= 1, got {max_order}")
    seen: dict[str, None] = {}
    for name in names:
        t = normalize_text(name)
        for i in range(len(t)):
            for l in range(1, max_order + 1):
                if i + l > len(t):
                    break
                seen.setdefault(t[i : i + l], None)
    return NGramVocabulary(tuple(seen.keys()), max_order, source="corpus-built")


def truncate_vocab(vocab: NGramVocabulary, k: int) -> NGramVocabulary:
    """Keep exactly the grams of length <= k, preserving relative order."""
    if k < 1:
        raise InvalidOrderError(f"order k must be >= 1, got {k}")
    grams = tuple(g for g in vocab.grams if len(g) <= k)
    return NGramVocabulary(grams, min(k, vocab.max_order), source=vocab.source)


def load_vocabulary(path, source: str = "canonical-file") -> NGramVocabulary:
    """Read a UTF-8 vocabulary file, one gram per line, order significant."""
    with open(path, encoding="utf-8") as fh:
        grams = tuple(line.rstrip("\n") for line in fh if line.strip())
    if not grams:
        raise MallnavError(f"vocabulary file {path} is empty")
    return NGramVocabulary(grams, max(len(g) for g in grams), source=source)


def save_vocabulary(vocab: NGramVocabulary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in vocab.grams:
            fh.write(g + "\n")


def vocabulary_hash(vocab: NGramVocabulary) -> str:
    h = hashlib.sha256("\n".join(vocab.grams).encode("utf-8"))
    return h.hexdigest()


def ngram_vector(text: str, vocab: NGramVocabulary) -> np.ndarray:
    """Binary presence vector: component i is 1 iff gram i is a substring
    of the normalized text."""
    if len(vocab) == 0:
        raise MallnavError("vocabulary is empty")
    t = normalize_text(text)
    out = np.zeros(len(vocab), dtype=np.float64)
    if t:
        for i, g in enumerate(vocab.grams):
            if g in t:
                out[i] = 1.0
    return out


def geometry_features(bbox: tuple[int, int, int, int]) -> np.ndarray:
    """(w, h, w+h, w/h) of a detection bbox."""
    _, _, w, h = bbox
    if h <= 0 or w <= 0:
        raise DegenerateBboxError(f"bbox {bbox} has non-positive extent")
    return np.array([w, h, w + h, w / h], dtype=np.float64)


@dataclass
class TextDetection:
    """One detected text region: pixel bbox plus recognized string."""

    bbox: tuple[int, int, int, int]  # x, y, w, h
    text: str
    ngram: np.ndarray | None = None
    reliable: bool | None = None

    @property
    def geometry(self) -> np.ndarray:
        return geometry_features(self.bbox)

    def with_ngram(self, vocab: NGramVocabulary) -> "TextDetection":
        return replace(self, ngram=ngram_vector(self.text, vocab))


def detection_features(det: TextDetection, vocab: NGramVocabulary) -> np.ndarray:
    """[n-gram vector ; w, h, w+h, w/h], length |vocab| + 4."""
    return np.concatenate([ngram_vector(det.text, vocab), det.geometry])


@dataclass
class FpdModel:
    """Binary reliability classifier over [n-grams ; geometry] features."""

    weights: np.ndarray
    bias: float
    threshold: float = 0.5
    vocab_hash: str | None = None
    loss_history: list[float] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 < self.threshold < 1.0):
            raise MallnavError(f"threshold must be in (0,1), got {self.threshold}")
        if not np.all(np.isfinite(self.weights)):
            raise MallnavError("model weights must be finite")

    def probability(self, features: np.ndarray) -> float:
        features = np.asarray(features, dtype=np.float64)
        if features.shape != self.weights.shape:
            raise FeatureDimensionMismatchError(
                f"feature length {features.shape} != weights {self.weights.shape}"
            )
        return float(sigmoid(np.array([features @ self.weights + self.bias]))[0])


def train_fpd(
    samples: list[tuple[np.ndarray, bool]],
    reg: float = DEFAULT_REG,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    step: float = DEFAULT_STEP,
    threshold: float = 0.5,
    vocab_hash: str | None = None,
) -> FpdModel:
    """Train the reliability filter by deterministic full-batch descent.

    ``seed`` is part of the reproducibility contract; initialization is
    zero so it does not influence the result.
    """
    if len(samples) < 2:
        raise DegenerateTrainingSetError("need at least 2 samples")
    X = np.stack([np.asarray(f, dtype=np.float64) for f, _ in samples])
    y = np.array([[1.0 if is_true else 0.0] for _, is_true in samples])
    if y.min() == y.max():
        raise DegenerateTrainingSetError("training set contains a single class")
    del seed  # zero init; kept for interface stability
    W, b, losses = fit_logistic(X, y, reg=reg, iters=iters, step=step)
    return FpdModel(
        weights=W[0],
        bias=float(b[0]),
        threshold=threshold,
        vocab_hash=vocab_hash,
        loss_history=losses,
    )


def filter_detections(dets: list[TextDetection], model: FpdModel) -> list[TextDetection]:
    """Keep detections whose predicted reliability >= threshold.

    Sets ``reliable`` on every input; output preserves input order.
    Detections must carry n-gram vectors over the model's vocabulary.
    """
    expected = model.weights.shape[0]
    kept = []
    for det in dets:
        if det.ngram is None:
            raise FeatureDimensionMismatchError(
                "detection has no n-gram vector; call with_ngram() first"
            )
        if len(det.ngram) + 4 != expected:
            raise FeatureDimensionMismatchError(
                f"detection features {len(det.ngram) + 4} != model {expected}"
            )
        feats = np.concatenate([det.ngram, det.geometry])
        det.reliable = model.probability(feats) >= model.threshold
        if det.reliable:
            kept.append(det)
    return kept


def save_fpd_model(model: FpdModel, path) -> None:
    doc = {
        "format": FPD_MODEL_FORMAT,
        "version": FPD_MODEL_VERSION,
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
        "threshold": float(model.threshold),
        "vocab_hash": model.vocab_hash,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_fpd_model(path) -> FpdModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FPD_MODEL_FORMAT or doc.get("version") != FPD_MODEL_VERSION:
        raise MallnavError(f"unsupported FPD model document: {path}")
    return FpdModel(
        weights=np.array(doc["weights"], dtype=np.float64),
        bias=float(doc["bias"]),
        threshold=float(doc["threshold"]),
        vocab_hash=doc.get("vocab_hash"),
    )
