"""From-scratch classifiers over binary symptom vectors, plus evaluation.

Multinomial Naive Bayes, multinomial (softmax) logistic regression, and a
Jaccard-distance KNN. All training is deterministic: fixed seed and data
give bit-identical parameters.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import ModelFormatError, VocabularyMismatchError
from .kb import ExpandedDataset
from .match import jaccard

log = logging.getLogger(__name__)

MODEL_FORMAT = "medreason-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainedModel:
    """One classifier: kind, label order, parameters, vocabulary binding.

    `labels` fixes the tie-break order everywhere (first-appearance order
    of the training data). `vocab_hash` guards against train/serve skew.
    """

    kind: str  # MNB | LR | KNN
    labels: tuple[str, ...]
    n_features: int
    vocab_hash: str
    params: dict = field(default_factory=dict)
    hyperparameters: dict = field(default_factory=dict)


def _label_order(labels) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for label in labels:
        seen.setdefault(label)
    return tuple(seen)


def split(
    dataset: ExpandedDataset, train_fraction: float = 0.9, seed: int = 0
) -> tuple[ExpandedDataset, ExpandedDataset]:
    """Seeded stratified partition; exact, disjoint, deterministic.

    Labels with a single sample go entirely to train (logged).
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    if len(dataset.labels) == 0:
        raise ValueError("dataset is empty")
    groups: dict[str, list[int]] = {}
    for i, label in enumerate(dataset.labels):
        groups.setdefault(label, []).append(i)
    rng = random.Random(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label, idx in groups.items():
        if len(idx) == 1:
            log.warning("label %r has a single sample; kept in train", label)
            train_idx.extend(idx)
            continue
        shuffled = idx[:]
        rng.shuffle(shuffled)
        n_test = max(0, min(len(idx) - 1, round(len(idx) * (1.0 - train_fraction))))
        test_idx.extend(shuffled[:n_test])
        train_idx.extend(shuffled[n_test:])
    return dataset.subset(sorted(train_idx)), dataset.subset(sorted(test_idx))


# ---------------------------------------------------------------------------
# Multinomial Naive Bayes

def train_mnb(train: ExpandedDataset, alpha: float = 1.0) -> TrainedModel:
    """Additively smoothed multinomial fit over binary feature counts."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    labels = _label_order(train.labels)
    index = {label: i for i, label in enumerate(labels)}
    X = np.asarray(train.features, dtype=np.float64)
    n, v = X.shape
    counts = np.zeros((len(labels), v))
    class_counts = np.zeros(len(labels))
    for row, label in zip(X, train.labels):
        counts[index[label]] += row
        class_counts[index[label]] += 1
    totals = counts.sum(axis=1, keepdims=True)
    feature_log_prob = np.log(counts + alpha) - np.log(totals + alpha * v)
    class_log_prior = np.log(class_counts) - np.log(n)
    return TrainedModel(
        kind="MNB",
        labels=labels,
        n_features=v,
        vocab_hash=train.vocabulary.hash,
        params={
            "class_log_prior": class_log_prior,
            "feature_log_prob": feature_log_prob,
        },
        hyperparameters={"alpha": alpha},
    )


# ---------------------------------------------------------------------------
# Logistic regression (softmax, full-batch gradient descent)

def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def lr_loss(X, Y: np.ndarray, W: np.ndarray, b: np.ndarray, l2: float) -> float:
    """Mean cross-entropy plus (l2/2)·||W||²; bias unregularized."""
    logits = X @ W.T + b
    logits = np.asarray(logits)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    ce = -(Y * log_probs).sum(axis=1).mean()
    return float(ce + 0.5 * l2 * float((W * W).sum()))


def lr_gradient(X, Y: np.ndarray, W: np.ndarray, b: np.ndarray, l2: float):
    """Analytic gradient of lr_loss w.r.t. W and b."""
    logits = np.asarray(X @ W.T + b)
    P = _softmax(logits)
    diff = P - Y
    grad_W = np.asarray(diff.T @ X) / X.shape[0] + l2 * W
    grad_b = diff.mean(axis=0)
    return grad_W, grad_b


def train_lr(
    train: ExpandedDataset,
    learning_rate: float = 0.5,
    epochs: int = 500,
    l2: float = 1e-4,
    seed: int = 0,
) -> TrainedModel:
    """Zero-initialized softmax regression, monotone loss enforced.

    If a step raises the loss, it is rolled back and retried at half the
    rate (logged); `seed` is accepted for interface uniformity, the
    optimizer itself is deterministic.
    """
    if learning_rate <= 0 or epochs < 0 or l2 < 0:
        raise ValueError("hyperparameters must be positive (epochs, l2 may be 0)")
    labels = _label_order(train.labels)
    index = {label: i for i, label in enumerate(labels)}
    n, v = train.features.shape
    X = sparse.csr_array(np.asarray(train.features, dtype=np.float64))
    Y = np.zeros((n, len(labels)))
    for i, label in enumerate(train.labels):
        Y[i, index[label]] = 1.0
    W = np.zeros((len(labels), v))
    b = np.zeros(len(labels))
    lr = learning_rate
    prev_loss = lr_loss(X, Y, W, b, l2)
    done = 0
    while done < epochs:
        grad_W, grad_b = lr_gradient(X, Y, W, b, l2)
        new_W = W - lr * grad_W
        new_b = b - lr * grad_b
        loss = lr_loss(X, Y, new_W, new_b, l2)
        if not np.isfinite(loss):
            raise ArithmeticError(f"non-finite training loss at epoch {done + 1}")
        if loss > prev_loss + 1e-12:
            lr *= 0.5
            log.warning("loss rose at epoch %d; halving learning rate to %g",
                        done + 1, lr)
            if lr < 1e-12:
                log.warning("learning rate underflow; stopping at epoch %d", done)
                break
            continue
        W, b, prev_loss = new_W, new_b, loss
        done += 1
    return TrainedModel(
        kind="LR",
        labels=labels,
        n_features=v,
        vocab_hash=train.vocabulary.hash,
        params={"weights": W, "bias": b},
        hyperparameters={"learning_rate": learning_rate, "epochs": epochs,
                         "l2": l2, "seed": seed},
    )


# ---------------------------------------------------------------------------
# K nearest neighbors

def train_knn(train: ExpandedDataset, k: int = 5) -> TrainedModel:
    if len(train.labels) == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= len(train.labels):
        raise ValueError(f"k must be in [1, {len(train.labels)}]")
    labels = _label_order(train.labels)
    index = {label: i for i, label in enumerate(labels)}
    return TrainedModel(
        kind="KNN",
        labels=labels,
        n_features=train.features.shape[1],
        vocab_hash=train.vocabulary.hash,
        params={
            "train_features": np.asarray(train.features, dtype=np.uint8),
            "train_labels": np.array([index[l] for l in train.labels], dtype=np.int64),
        },
        hyperparameters={"k": k},
    )


def knn_predict(
    model: TrainedModel, features: np.ndarray, k: int | None = None
) -> list[tuple[str, float]]:
    """Vote shares among the k nearest rows by Jaccard distance.

    Distance ties resolve by training index, score ties by label order.
    """
    if model.kind != "KNN":
        raise ValueError(f"expected a KNN model, got {model.kind}")
    X = model.params["train_features"]
    y = model.params["train_labels"]
    if len(y) == 0:
        raise ValueError("empty training set")
    k = model.hyperparameters["k"] if k is None else k
    if not 1 <= k <= len(y):
        raise ValueError(f"k must be in [1, {len(y)}]")
    query = frozenset(np.flatnonzero(np.asarray(features)).tolist())
    distances = [
        (1.0 - jaccard(query, frozenset(np.flatnonzero(row).tolist())), i)
        for i, row in enumerate(X)
    ]
    distances.sort()
    votes = np.zeros(len(model.labels))
    for _, i in distances[:k]:
        votes[y[i]] += 1.0
    shares = votes / k
    order = sorted(range(len(model.labels)), key=lambda j: (-shares[j], j))
    return [(model.labels[j], float(shares[j])) for j in order if shares[j] > 0]


# ---------------------------------------------------------------------------
# unified prediction / evaluation

def predict_proba(model: TrainedModel, features: np.ndarray) -> np.ndarray:
    """Probability vector over model.labels for one feature row."""
    x = np.asarray(features, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.n_features:
        raise ValueError(
            f"feature length {x.shape[0]} != model feature count {model.n_features}")
    if model.kind == "MNB":
        scores = model.params["class_log_prior"] + model.params["feature_log_prob"] @ x
        return _softmax(scores[None, :])[0]
    if model.kind == "LR":
        logits = model.params["weights"] @ x + model.params["bias"]
        return _softmax(logits[None, :])[0]
    if model.kind == "KNN":
        ranked = dict(knn_predict(model, x))
        return np.array([ranked.get(label, 0.0) for label in model.labels])
    raise ModelFormatError(f"unknown model kind {model.kind!r}")


def predict_topk(
    model: TrainedModel, features: np.ndarray, k: int = 3
) -> list[tuple[str, float]]:
    """Top-k labels, probability descending, ties by label order."""
    proba = predict_proba(model, features)
    order = sorted(range(len(model.labels)), key=lambda j: (-proba[j], j))
    return [(model.labels[j], float(proba[j])) for j in order[:min(k, len(order))]]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: dict[str, dict[str, int]]

    def to_document(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "confusion": self.confusion,
        }


def evaluate(model: TrainedModel, test: ExpandedDataset) -> EvalReport:
    """Top-1 confusion counts with macro averages over test labels."""
    if len(test.labels) == 0:
        raise ValueError("test set is empty")
    confusion: dict[str, dict[str, int]] = {}
    correct = 0
    for row, truth in zip(test.features, test.labels):
        pred = predict_topk(model, row, k=1)[0][0]
        confusion.setdefault(truth, {}).setdefault(pred, 0)
        confusion[truth][pred] += 1
        correct += int(pred == truth)
    labels = sorted(confusion)
    precisions, recalls, f1s = [], [], []
    for label in labels:
        tp = confusion.get(label, {}).get(label, 0)
        fn = sum(confusion[label].values()) - tp
        fp = sum(row.get(label, 0) for t, row in confusion.items() if t != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall else 0.0)
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    return EvalReport(
        accuracy=correct / len(test.labels),
        macro_precision=float(np.mean(precisions)),
        macro_recall=float(np.mean(recalls)),
        macro_f1=float(np.mean(f1s)),
        confusion=confusion,
    )


# ---------------------------------------------------------------------------
# persistence

def save_model(model: TrainedModel) -> str:
    """Self-describing JSON document; arrays as nested lists."""
    params = {}
    for key, value in model.params.items():
        params[key] = value.tolist() if isinstance(value, np.ndarray) else value
    return json.dumps({
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "labels": list(model.labels),
        "n_features": model.n_features,
        "vocab_hash": model.vocab_hash,
        "hyperparameters": model.hyperparameters,
        "params": params,
    })


_PARAM_DTYPES = {
    "class_log_prior": np.float64,
    "feature_log_prob": np.float64,
    "weights": np.float64,
    "bias": np.float64,
    "train_features": np.uint8,
    "train_labels": np.int64,
}


def load_model(text: str, expect_vocab_hash: str | None = None) -> TrainedModel:
    """Parse and validate a persisted model; refuses vocabulary skew."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a model document")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    required = {"kind", "labels", "n_features", "vocab_hash", "params"}
    missing = required - set(doc)
    if missing:
        raise ModelFormatError(f"model document missing fields: {sorted(missing)}")
    if doc["kind"] not in ("MNB", "LR", "KNN"):
        raise ModelFormatError(f"unknown model kind {doc['kind']!r}")
    if expect_vocab_hash is not None and doc["vocab_hash"] != expect_vocab_hash:
        raise VocabularyMismatchError(
            f"model was trained against vocabulary {doc['vocab_hash'][:12]}..., "
            f"loaded KB is {expect_vocab_hash[:12]}...")
    params = {}
    for key, value in doc["params"].items():
        dtype = _PARAM_DTYPES.get(key)
        params[key] = np.array(value, dtype=dtype) if dtype else value
    return TrainedModel(
        kind=doc["kind"],
        labels=tuple(doc["labels"]),
        n_features=int(doc["n_features"]),
        vocab_hash=doc["vocab_hash"],
        params=params,
        hyperparameters=doc.get("hyperparameters", {}),
    )
