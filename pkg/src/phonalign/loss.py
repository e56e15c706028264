"""Classifier and tagger probability math, losses and their logit gradients.

Two output regimes are covered:

* crisp classification: softmax over the logits, categorical
  cross-entropy against a one-hot target;
* tagging: an independent sigmoid per class, binary cross-entropy
  against a 0/1 indicator vector that may have several ones.

Losses are evaluated in log-sum-exp / softplus form.  Gradients use the
closed forms ``softmax(z) - onehot`` and ``sigmoid(z) - y``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit, log_softmax, logsumexp

__all__ = [
    "softmax",
    "sigmoid",
    "classify",
    "posterior_entropy",
    "cce_loss",
    "cce_gradient",
    "bce_loss",
    "bce_gradient",
    "weighted_bce_loss",
    "derive_sparse_targets",
    "LinearScorer",
    "gradient_step",
    "DEFAULT_POS_WEIGHT",
]

DEFAULT_POS_WEIGHT = 30.0

_LIN_MAGIC = b"MAPSLIN1"
_MODES = ("softmax", "sigmoid")


def _logits(z):
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise ValueError(f"expected a 1-D logit vector, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    return z


def _targets(y, n):
    y = np.asarray(y, dtype=float)
    if y.shape != (n,):
        raise ValueError(f"target length {y.shape} does not match logit length {n}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("targets must be 0/1 indicators")
    return y


def softmax(z):
    """Softmax of a logit vector, shifted by the max for stability."""
    z = _logits(z)
    e = np.exp(z - z.max())
    return e / e.sum()


def sigmoid(z):
    return expit(np.asarray(z, dtype=float))


def classify(p) -> int:
    """Index of the most probable class; ties go to the lowest index."""
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        raise ValueError("cannot classify an empty probability vector")
    return int(np.argmax(p))


def posterior_entropy(p) -> float:
    """Base-2 entropy in bits, with 0 log 0 taken as 0."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)) + 0.0)


def cce_loss(z, p: int) -> float:
    """Categorical cross-entropy of logits ``z`` against positive class ``p``."""
    z = _logits(z)
    _check_index(p, z.size)
    return float(logsumexp(z) - z[p])


def _check_index(p, n):
    if not 0 <= p < n:
        raise IndexError(f"positive class {p} out of range for {n} classes")


def cce_gradient(z, p: int):
    """Gradient of :func:`cce_loss` with respect to the logits.

    The positive entry is ``softmax(z)[p] - 1`` (negative), every other
    entry is ``softmax(z)[i]`` (positive).
    """
    z = _logits(z)
    _check_index(p, z.size)
    g = softmax(z)
    g[p] -= 1.0
    return g


def bce_loss(z, y) -> float:
    """Summed binary cross-entropy of per-class sigmoids against indicators ``y``."""
    return weighted_bce_loss(z, y, 1.0)


def bce_gradient(z, y):
    """Gradient of :func:`bce_loss`: ``-1/(e^z+1)`` where y=1, ``e^z/(e^z+1)`` where y=0."""
    z = _logits(z)
    y = _targets(y, z.size)
    return sigmoid(z) - y


def weighted_bce_loss(z, y, pos_weight: float = DEFAULT_POS_WEIGHT) -> float:
    """Binary cross-entropy with the positive-target terms scaled by ``pos_weight``.

    ``-log sigmoid(z) = softplus(-z)`` and ``-log(1 - sigmoid(z)) = softplus(z)``.
    """
    if not pos_weight > 0:
        raise ValueError("pos_weight must be positive")
    z = _logits(z)
    y = _targets(y, z.size)
    pos = np.logaddexp(0.0, -z)
    neg = np.logaddexp(0.0, z)
    return float(np.sum(pos_weight * y * pos + (1.0 - y) * neg))


def derive_sparse_targets(posteriors, crisp_labels):
    """Tag every class at least as probable as the crisp label, frame by frame.

    ``posteriors`` is a k x T array (or anything with a ``probs``
    attribute of that shape).  Returns a k x T 0/1 integer array.
    Comparison is exact, so ties with the crisp class are tagged.
    """
    probs = np.asarray(getattr(posteriors, "probs", posteriors), dtype=float)
    crisp = np.asarray(crisp_labels, dtype=int)
    if probs.ndim != 2 or crisp.shape != (probs.shape[1],):
        raise ValueError("need a k x T posterior matrix and one label per frame")
    if np.any((crisp < 0) | (crisp >= probs.shape[0])):
        raise IndexError("crisp label out of range")
    ref = probs[crisp, np.arange(probs.shape[1])]
    tags = (probs >= ref[None, :]).astype(int)
    tags[crisp, np.arange(probs.shape[1])] = 1
    return tags


@dataclass(frozen=True)
class LinearScorer:
    """Single-layer scorer ``logits = weights @ x`` with a softmax or sigmoid head.

    Desk-scale stand-in for an acoustic network; it exists so the
    gradient formulas can be exercised end to end.
    """

    weights: np.ndarray
    mode: str = "softmax"

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2:
            raise ValueError("weights must be a k x d matrix")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def logits(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"input dimension {x.shape[-1]} != scorer dimension {self.dim}")
        return x @ self.weights.T

    def probabilities(self, x):
        """Class probabilities; ``x`` may be one vector or a T x d matrix (rows)."""
        z = self.logits(x)
        if self.mode == "softmax":
            return np.exp(log_softmax(z, axis=-1))
        return sigmoid(z)

    def predict(self, x):
        return np.argmax(self.probabilities(x), axis=-1)

    def save(self, path) -> None:
        k, d = self.weights.shape
        head = _LIN_MAGIC + struct.pack("<IIB", k, d, _MODES.index(self.mode))
        body = self.weights.astype("<f4").tobytes(order="C")
        Path(path).write_bytes(head + body)

    @classmethod
    def load(cls, path) -> "LinearScorer":
        data = Path(path).read_bytes()
        n = len(_LIN_MAGIC)
        if data[:n] != _LIN_MAGIC:
            raise ValueError(f"{path}: not a linear scorer file (bad magic)")
        k, d, mode = struct.unpack_from("<IIB", data, n)
        off = n + 9
        if mode >= len(_MODES):
            raise ValueError(f"{path}: unknown mode byte {mode}")
        if len(data) - off != 4 * k * d:
            raise ValueError(f"{path}: expected {k}x{d} float32 weights")
        w = np.frombuffer(data, dtype="<f4", offset=off).reshape(k, d)
        return cls(w.astype(float), _MODES[mode])


def gradient_step(scorer: LinearScorer, x, y, alpha: float) -> LinearScorer:
    """One plain SGD update on a single example.

    ``y`` is the positive class index (or a one-hot vector) in softmax
    mode and a 0/1 indicator vector in sigmoid mode.  Returns a new
    scorer; the input is left untouched.
    """
    if alpha < 0:
        raise ValueError("learning rate must be non-negative")
    x = np.asarray(x, dtype=float)
    if x.shape != (scorer.dim,):
        raise ValueError(f"input must have shape ({scorer.dim},), got {x.shape}")
    z = scorer.logits(x)
    if scorer.mode == "softmax":
        y = np.asarray(y)
        if y.ndim == 0:
            p = int(y)
        else:
            y = _targets(y, z.size)
            if y.sum() != 1:
                raise ValueError("softmax mode needs exactly one positive class")
            p = int(np.argmax(y))
        g = cce_gradient(z, p)
    else:
        g = bce_gradient(z, y)
    return LinearScorer(scorer.weights - alpha * np.outer(g, x), scorer.mode)
