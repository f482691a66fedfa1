"""Brand classifiers over text and style features, fused early or late.

Early fusion concatenates the two feature vectors and trains one joint
classifier.  Late fusion mixes the per-class sigmoid scores of two
separately trained classifiers:

    y = (1 - alpha) * sigmoid(Wt xt + bt) + alpha * sigmoid(Ws xs + bs)

with alpha in [0, 1] selected on the training set.  Ties in argmax break
to the lowest class index everywhere so evaluation is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateTrainingSetError,
    EmptyDatasetError,
    FeatureDimensionMismatchError,
    InvalidAlphaError,
    MallnavError,
)
from .logreg import DEFAULT_ITERS, DEFAULT_REG, DEFAULT_STEP, fit_logistic, sigmoid

FUSION_MODEL_FORMAT = "mallnav-fusion"
FUSION_MODEL_VERSION = 1

MODES = ("text-only", "style-only", "early", "late")
DEFAULT_ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(11))


@dataclass
class LinearClassifier:
    """One-vs-rest logistic scores; row c of weights belongs to class c."""

    weights: np.ndarray  # (num_classes, feature_dim)
    bias: np.ndarray  # (num_classes,)
    class_labels: tuple[str, ...]
    loss_history: list[float] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.weights.shape[0] != len(self.class_labels):
            raise MallnavError("one weight row per class label required")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise MallnavError("classifier weights must be finite")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise FeatureDimensionMismatchError(
                f"feature length {x.shape} != classifier dim {self.dim}"
            )
        return sigmoid(self.weights @ x + self.bias)

    def classify(self, x: np.ndarray) -> tuple[str, np.ndarray]:
        s = self.scores(x)
        return self.class_labels[int(np.argmax(s))], s


def train_linear(
    X: list[np.ndarray],
    y: list[str],
    reg: float = DEFAULT_REG,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    step: float = DEFAULT_STEP,
) -> LinearClassifier:
    """One-vs-rest logistic regression, deterministic full-batch descent."""
    if len(X) != len(y) or not X:
        raise EmptyDatasetError("need matching non-empty features and labels")
    labels = tuple(sorted(set(y)))
    if len(labels) < 2:
        raise DegenerateTrainingSetError("need at least 2 classes")
    dims = {len(x) for x in X}
    if len(dims) != 1:
        raise FeatureDimensionMismatchError(f"mixed feature dimensions: {sorted(dims)}")
    Xm = np.stack([np.asarray(x, dtype=np.float64) for x in X])
    idx = {c: i for i, c in enumerate(labels)}
    Y = np.zeros((len(y), len(labels)), dtype=np.float64)
    for row, label in enumerate(y):
        Y[row, idx[label]] = 1.0
    del seed
    W, b, losses = fit_logistic(Xm, Y, reg=reg, iters=iters, step=step)
    return LinearClassifier(weights=W, bias=b, class_labels=labels, loss_history=losses)


@dataclass
class FusionModel:
    mode: str
    text_clf: LinearClassifier | None = None
    style_clf: LinearClassifier | None = None
    joint_clf: LinearClassifier | None = None
    alpha: float = 0.5
    text_order: int = 2

    def __post_init__(self):
        if self.mode not in MODES:
            raise MallnavError(f"unknown fusion mode {self.mode!r}")
        if self.mode == "late":
            if self.text_clf is None or self.style_clf is None:
                raise MallnavError("late fusion requires both classifiers")
            if not (0.0 <= self.alpha <= 1.0):
                raise InvalidAlphaError(f"alpha must be in [0,1], got {self.alpha}")
            if self.text_clf.class_labels != self.style_clf.class_labels:
                raise MallnavError("late fusion classifiers must share class labels")
        if self.mode == "early" and self.joint_clf is None:
            raise MallnavError("early fusion requires the joint classifier")
        if self.mode == "text-only" and self.text_clf is None:
            raise MallnavError("text-only mode requires the text classifier")
        if self.mode == "style-only" and self.style_clf is None:
            raise MallnavError("style-only mode requires the style classifier")

    @property
    def class_labels(self) -> tuple[str, ...]:
        for clf in (self.joint_clf, self.text_clf, self.style_clf):
            if clf is not None:
                return clf.class_labels
        raise MallnavError("model has no classifier")


def early_fuse_classify(
    x_t: np.ndarray, x_s: np.ndarray, model: FusionModel
) -> tuple[str, np.ndarray]:
    """Classify the concatenated [text ; style] vector."""
    if model.mode != "early":
        raise MallnavError(f"model mode is {model.mode!r}, not early")
    joint = np.concatenate([np.asarray(x_t, np.float64), np.asarray(x_s, np.float64)])
    return model.joint_clf.classify(joint)


def late_fuse_score(
    x_t: np.ndarray, x_s: np.ndarray, model: FusionModel, alpha: float | None = None
) -> tuple[str, np.ndarray]:
    """Mix per-class sigmoid scores of the two classifiers."""
    if model.mode != "late":
        raise MallnavError(f"model mode is {model.mode!r}, not late")
    a = model.alpha if alpha is None else alpha
    if not (0.0 <= a <= 1.0):
        raise InvalidAlphaError(f"alpha must be in [0,1], got {a}")
    scores = (1.0 - a) * model.text_clf.scores(x_t) + a * model.style_clf.scores(x_s)
    return model.class_labels[int(np.argmax(scores))], scores


def classify(model: FusionModel, x_t: np.ndarray | None, x_s: np.ndarray | None):
    """Mode-dispatching prediction; returns (label, score vector)."""
    if model.mode == "text-only":
        return model.text_clf.classify(x_t)
    if model.mode == "style-only":
        return model.style_clf.classify(x_s)
    if model.mode == "early":
        return early_fuse_classify(x_t, x_s, model)
    return late_fuse_score(x_t, x_s, model)


def select_alpha(
    text_clf: LinearClassifier,
    style_clf: LinearClassifier,
    Xt: list[np.ndarray],
    Xs: list[np.ndarray],
    y: list[str],
    grid=DEFAULT_ALPHA_GRID,
) -> float:
    """Grid value maximizing training accuracy; ties break to smaller alpha."""
    if not y:
        raise EmptyDatasetError("empty training set")
    if not grid:
        raise InvalidAlphaError("alpha grid is empty")
    for a in grid:
        if not (0.0 <= a <= 1.0):
            raise InvalidAlphaError(f"grid value {a} outside [0,1]")
    probe = FusionModel(mode="late", text_clf=text_clf, style_clf=style_clf, alpha=0.0)
    best_alpha, best_acc = None, -1.0
    for a in grid:
        hits = 0
        for xt, xs, label in zip(Xt, Xs, y):
            pred, _ = late_fuse_score(xt, xs, probe, alpha=a)
            hits += pred == label
        acc = hits / len(y)
        if acc > best_acc:
            best_alpha, best_acc = a, acc
    return float(best_alpha)


def evaluate_accuracy(
    model: FusionModel,
    Xt: list[np.ndarray] | None,
    Xs: list[np.ndarray] | None,
    y: list[str],
) -> float:
    """Fraction of samples whose predicted label equals ground truth."""
    if not y:
        raise EmptyDatasetError("empty evaluation set")
    n = len(y)
    Xt = Xt if Xt is not None else [None] * n
    Xs = Xs if Xs is not None else [None] * n
    hits = 0
    for xt, xs, label in zip(Xt, Xs, y):
        pred, _ = classify(model, xt, xs)
        hits += pred == label
    return hits / n


# ---------------------------------------------------------------------------
# persistence


def _clf_doc(clf: LinearClassifier | None):
    if clf is None:
        return None
    return {
        "class_labels": list(clf.class_labels),
        "weights": [[float(v) for v in row] for row in clf.weights],
        "bias": [float(v) for v in clf.bias],
    }


def _clf_from_doc(doc) -> LinearClassifier | None:
    if doc is None:
        return None
    return LinearClassifier(
        weights=np.array(doc["weights"], dtype=np.float64),
        bias=np.array(doc["bias"], dtype=np.float64),
        class_labels=tuple(doc["class_labels"]),
    )


def save_fusion_model(model: FusionModel, path) -> None:
    doc = {
        "format": FUSION_MODEL_FORMAT,
        "version": FUSION_MODEL_VERSION,
        "mode": model.mode,
        "text_order": model.text_order,
        "alpha": float(model.alpha),
        "text_clf": _clf_doc(model.text_clf),
        "style_clf": _clf_doc(model.style_clf),
        "joint_clf": _clf_doc(model.joint_clf),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_fusion_model(path) -> FusionModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FUSION_MODEL_FORMAT or doc.get("version") != FUSION_MODEL_VERSION:
        raise MallnavError(f"unsupported fusion model document: {path}")
    return FusionModel(
        mode=doc["mode"],
        text_clf=_clf_from_doc(doc["text_clf"]),
        style_clf=_clf_from_doc(doc["style_clf"]),
        joint_clf=_clf_from_doc(doc["joint_clf"]),
        alpha=float(doc["alpha"]),
        text_order=int(doc["text_order"]),
    )
