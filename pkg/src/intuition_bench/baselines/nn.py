"""One-hidden-layer sigmoid network with a softmax output, trained by minibatch SGD."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .encoding import EncodedRecord

DEFAULT_HIDDEN = 16


@dataclass(frozen=True)
class NnModel:
    w1: np.ndarray  # (n_in, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden, n_out)
    b2: np.ndarray  # (n_out,)
    trained: bool = False

    @property
    def layer_sizes(self) -> tuple[int, int, int]:
        return (self.w1.shape[0], self.w1.shape[1], self.w2.shape[1])

    def params(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}


def init_nn(
    n_in: int,
    n_out: int,
    seed: int,
    hidden: int = DEFAULT_HIDDEN,
    prior: Sequence[float] | None = None,
) -> NnModel:
    """Standard-normal weights; the output bias starts at ``log(prior)`` when a class prior is given.

    Evaluated as is, this is the untrained baseline: the prior pulls it toward
    the common classes and the random weights scatter the rest.
    """
    rng = np.random.default_rng(seed)
    w1 = rng.standard_normal((n_in, hidden))
    b1 = rng.standard_normal(hidden)
    w2 = rng.standard_normal((hidden, n_out))
    if prior is None:
        b2 = np.zeros(n_out)
    else:
        p = np.asarray(prior, dtype=float)
        if p.shape != (n_out,) or (p < 0).any() or p.sum() <= 0:
            raise ValueError("prior must be a non-negative vector over the outputs")
        p = p / p.sum()
        b2 = np.log(np.maximum(p, 1e-12))
    return NnModel(w1, b1, w2, b2)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(model: NnModel, x: np.ndarray) -> np.ndarray:
    h = _sigmoid(x @ model.w1 + model.b1)
    return _softmax(h @ model.w2 + model.b2)


def loss_and_grads(model: NnModel, x: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and its gradient for every parameter."""
    n = x.shape[0]
    h = _sigmoid(x @ model.w1 + model.b1)
    p = _softmax(h @ model.w2 + model.b2)
    loss = -np.log(np.maximum(p[np.arange(n), y], 1e-300)).mean()
    d_out = p.copy()
    d_out[np.arange(n), y] -= 1.0
    d_out /= n
    d_h = (d_out @ model.w2.T) * h * (1.0 - h)
    grads = {
        "w1": x.T @ d_h,
        "b1": d_h.sum(axis=0),
        "w2": h.T @ d_out,
        "b2": d_out.sum(axis=0),
    }
    return float(loss), grads


def _as_arrays(records) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(records, tuple) and len(records) == 2:
        x, y = records
        return np.asarray(x, dtype=float), np.asarray(y, dtype=np.int64)
    records = list(records)
    return np.array([r.features for r in records]), np.array([r.label for r in records], dtype=np.int64)


def train_nn(
    model: NnModel,
    records: Sequence[EncodedRecord] | tuple[np.ndarray, np.ndarray],
    epochs: int,
    seed: int,
    lr: float = 0.5,
    batch_size: int = 32,
    history: list[float] | None = None,
) -> NnModel:
    """Minibatch SGD on cross-entropy; returns a new model flagged as trained.

    ``records`` is a sequence of :class:`EncodedRecord` or an ``(x, y)`` pair.
    If ``history`` is given, the full-batch loss before training and after
    each epoch is appended to it.
    """
    x, y = _as_arrays(records)
    if len(y) == 0:
        raise ValueError("no training records")
    if x.shape[1] != model.w1.shape[0]:
        raise ValueError(f"feature width {x.shape[1]} != model input {model.w1.shape[0]}")
    rng = np.random.default_rng(seed)
    params = {k: v.copy() for k, v in model.params().items()}
    current = replace(model, **params)
    if history is not None:
        history.append(loss_and_grads(current, x, y)[0])
    for _ in range(epochs):
        order = rng.permutation(len(y))
        for start in range(0, len(y), batch_size):
            idx = order[start : start + batch_size]
            _, grads = loss_and_grads(current, x[idx], y[idx])
            for k in params:
                params[k] -= lr * grads[k]
            current = replace(current, **params)
        if history is not None:
            history.append(loss_and_grads(current, x, y)[0])
    return replace(current, trained=True)


def predict_nn(model: NnModel, record: EncodedRecord) -> tuple[int, int]:
    """Arg-max class for one masked record and the wall-clock nanoseconds it took."""
    t0 = time.perf_counter_ns()
    if not any(record.mask):
        raise ValueError("every attribute is masked")
    h = _sigmoid(record.features @ model.w1 + model.b1)
    cls = int(np.argmax(h @ model.w2 + model.b2))
    return cls, time.perf_counter_ns() - t0


def predict_proba(model: NnModel, x: np.ndarray) -> np.ndarray:
    return forward(model, np.atleast_2d(x))
