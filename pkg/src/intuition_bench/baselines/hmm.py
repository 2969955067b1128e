"""Discrete HMM with class-aligned hidden states.

Each hidden state stands for one output class. Parameters are fitted by
counting over labelled reveal sequences (the state path of a sequence is its
label at every step) with add-one smoothing, so no EM is needed. Prediction
filters the revealed prefix with the scaled forward algorithm and returns
the most probable current state.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

OOV = "<oov>"


@dataclass(frozen=True)
class HmmModel:
    states: tuple[str, ...]
    symbols: tuple[str, ...]
    initial: np.ndarray  # (K,)
    transition: np.ndarray  # (K, K), row = from
    emission: np.ndarray  # (K, M), last column is OOV
    trained: bool = False

    def __post_init__(self):
        k, m = len(self.states), len(self.symbols)
        if self.initial.shape != (k,) or self.transition.shape != (k, k) or self.emission.shape != (k, m):
            raise ValueError("HMM parameter shapes do not match states/symbols")
        if not self.symbols or self.symbols[-1] != OOV:
            raise ValueError(f"the last symbol must be {OOV!r}")
        object.__setattr__(self, "_lookup", {s: i for i, s in enumerate(self.symbols)})

    def encode(self, tokens: Sequence[str]) -> list[int]:
        oov = len(self.symbols) - 1
        return [self._lookup.get(t, oov) for t in tokens]


def blank_hmm(states: Sequence[str]) -> HmmModel:
    """Uniform model over an empty vocabulary: every observation is OOV."""
    k = len(states)
    return HmmModel(
        tuple(states),
        (OOV,),
        np.full(k, 1.0 / k),
        np.full((k, k), 1.0 / k),
        np.ones((k, 1)),
    )


def fit_hmm(
    states: Sequence[str],
    sequences: Iterable[tuple[Sequence[str], Sequence[int]]],
    smoothing: float = 1.0,
    trained: bool = True,
) -> HmmModel:
    """Count-based maximum likelihood with additive smoothing.

    ``sequences`` yields ``(tokens, state_path)`` pairs of equal length.
    """
    sequences = list(sequences)
    k = len(states)
    vocab = sorted({t for toks, _ in sequences for t in toks} - {OOV})
    symbols = tuple(vocab) + (OOV,)
    index = {s: i for i, s in enumerate(symbols)}
    init = np.full(k, smoothing)
    trans = np.full((k, k), smoothing)
    emit = np.full((k, len(symbols)), smoothing)
    for toks, path in sequences:
        if len(toks) != len(path):
            raise ValueError("token and state sequences differ in length")
        if not toks:
            continue
        init[path[0]] += 1
        for a, b in zip(path, path[1:]):
            trans[a, b] += 1
        for t, s in zip(toks, path):
            emit[s, index[t]] += 1
    return HmmModel(
        tuple(states),
        symbols,
        init / init.sum(),
        trans / trans.sum(axis=1, keepdims=True),
        emit / emit.sum(axis=1, keepdims=True),
        trained=trained,
    )


def train_hmm(model: HmmModel, sequences: Iterable[tuple[Sequence[str], Sequence[int]]], smoothing: float = 1.0) -> HmmModel:
    return fit_hmm(model.states, sequences, smoothing, trained=True)


def forward(model: HmmModel, obs: Sequence[int]) -> tuple[np.ndarray, float]:
    """Scaled forward pass.

    Returns the filtered posteriors ``P(state_t | obs_0..t)`` as a ``(T, K)``
    array and the log-likelihood of the whole observation sequence.
    """
    if len(obs) == 0:
        raise ValueError("empty observation sequence")
    a, b = model.transition, model.emission
    alpha = np.empty((len(obs), len(model.states)))
    f = model.initial * b[:, obs[0]]
    c = f.sum()
    alpha[0] = f / c
    loglik = np.log(c)
    for t in range(1, len(obs)):
        f = (alpha[t - 1] @ a) * b[:, obs[t]]
        c = f.sum()
        alpha[t] = f / c
        loglik += np.log(c)
    return alpha, float(loglik)


def filter_last(model: HmmModel, obs: Sequence[int]) -> np.ndarray:
    a, b = model.transition, model.emission
    f = model.initial * b[:, obs[0]]
    f /= f.sum()
    for o in obs[1:]:
        f = (f @ a) * b[:, o]
        f /= f.sum()
    return f


def predict_hmm(model: HmmModel, revealed_prefix: Sequence[str], retain: bool = True) -> tuple[int, int]:
    """Most probable state after the revealed prefix, and elapsed nanoseconds.

    With ``retain=False`` nothing is carried over from earlier reveals: the
    filter restarts from the initial distribution and absorbs only the
    latest observation.
    """
    t0 = time.perf_counter_ns()
    if not revealed_prefix:
        raise ValueError("empty prefix")
    obs = model.encode(revealed_prefix if retain else revealed_prefix[-1:])
    cls = int(np.argmax(filter_last(model, obs)))
    return cls, time.perf_counter_ns() - t0
