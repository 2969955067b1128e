"""Per-method predictors over reveal prefixes, and experience-set bootstrapping."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..baselines import encoding
from ..baselines.hmm import HmmModel, fit_hmm, predict_hmm
from ..baselines.nn import NnModel, predict_nn
from ..core_model import (
    ExperienceElement,
    ExperienceSet,
    IntuitionConfig,
    ProblemElement,
    Symbolic,
    intuit,
)
from ..datasets import CAR_ATTRIBUTES, CAR_DOMAINS, EntityTag, RevealSequence, best_fit_value

Predictor = Callable[[RevealSequence, int], int]

# The one normal process each intuition call is conditioned on is always running.
NP_AVAILABILITY = (1.0,)


def nn_predictor(model: NnModel) -> Predictor:
    def predict(seq: RevealSequence, k: int) -> int:
        return predict_nn(model, encoding.encode_step(seq, k))[0]

    return predict


def hmm_predictor(model: HmmModel, retain: bool) -> Predictor:
    def predict(seq: RevealSequence, k: int) -> int:
        return predict_hmm(model, encoding.tokens(seq, k), retain=retain)[0]

    return predict


def hmm_training_pairs(sequences: Sequence[RevealSequence]):
    for seq in sequences:
        toks = encoding.tokens(seq, len(seq.steps) - 1)
        yield toks, [seq.label] * len(toks)


def fit_sequences_hmm(states: Sequence[str], sequences: Sequence[RevealSequence], smoothing: float, trained: bool) -> HmmModel:
    return fit_hmm(states, hmm_training_pairs(sequences), smoothing, trained=trained)


# --------------------------------------------------------------------------
# intuition


def car_cue(visible) -> list[str]:
    """Observation tokens for the visible attributes; alien values are read as their best fit."""
    out = []
    for s in visible:
        attr = CAR_ATTRIBUTES[s.slot]
        fit = s.value if s.value in CAR_DOMAINS[attr] else best_fit_value(attr, s.value)
        if fit is not None:
            out.append(attr + "=" + fit)
    return out


def poker_cue(cards) -> list[str]:
    sh = encoding.poker_shape(cards)
    out = [f"n={sh['n']}", "m=" + "-".join(map(str, sh["mult"]))]
    for flag in ("flush", "straight", "royal", "dup"):
        if sh[flag]:
            out.append(flag)
    return out


def observed_tokens(seq: RevealSequence, k: int) -> list[str]:
    visible = seq.visible(k)
    if seq.domain == "car":
        return car_cue(visible)
    return poker_cue([s.value for s in visible])


def _experience_cues(seq: RevealSequence):
    """Cues a fully observed past record is remembered under.

    Car attributes are distinct features, so every subset of the visible
    attributes is remembered. Poker cues depend only on the card multiset,
    and a random deal's prefixes already sample every hand size; each prefix
    is remembered under its card count plus any subset of its shape tokens.
    """
    last = len(seq.steps) - 1
    if seq.domain == "car":
        toks = car_cue(seq.visible(last))
        for size in range(1, len(toks) + 1):
            for sub in itertools.combinations(toks, size):
                yield frozenset(sub)
    else:
        for k in range(len(seq.steps)):
            if seq.steps[k].tag is EntityTag.HIDDEN:
                continue
            count, *shape = observed_tokens(seq, k)
            for size in range(len(shape) + 1):
                for sub in itertools.combinations(shape, size):
                    yield frozenset((count, *sub))


@dataclass(frozen=True)
class ImportanceDraw:
    """Inclusive integer ranges the per-element importance scores are drawn from."""

    ip: tuple[int, int] = (6, 10)
    np: tuple[int, int] = (1, 6)


def _decile(p: float) -> int:
    return max(1, min(10, math.ceil(10 * p - 1e-9)))


def build_experience(
    sequences: Sequence[RevealSequence],
    labels: Sequence[str],
    seed: int,
    importance: ImportanceDraw = ImportanceDraw(),
) -> ExperienceSet:
    """Turn past records into an experience set.

    One element per (cue, outcome) pair. Priority is the decile of how often
    the outcome followed the cue, confidence grows with log2 of the cue's
    support, and the two importance scores are drawn from ``importance``
    with a generator seeded by ``seed``.
    """
    outcomes: dict[frozenset[str], Counter] = {}
    first: dict[tuple[frozenset[str], int], int] = {}
    tick = 0
    domain = sequences[0].domain if sequences else "unknown"
    for seq in sequences:
        for cue in _experience_cues(seq):
            outcomes.setdefault(cue, Counter())[seq.label] += 1
            first.setdefault((cue, seq.label), tick)
            tick += 1
    rng = np.random.default_rng(seed)
    ordered = sorted(first.items(), key=lambda kv: kv[1])
    ip = rng.integers(importance.ip[0], importance.ip[1] + 1, size=len(ordered))
    npi = rng.integers(importance.np[0], importance.np[1] + 1, size=len(ordered))
    eset = ExperienceSet()
    k = len(labels)
    for i, ((cue, label), seen) in enumerate(ordered):
        counts = outcomes[cue]
        support = sum(counts.values())
        eset.add(
            ExperienceElement(
                id=f"{domain}-{i}",
                domain_tag=domain,
                value=Symbolic(labels[label], label, k),
                priority=_decile((counts[label] + 1) / (support + k)),
                importance_ip=int(ip[i]),
                importance_np=int(npi[i]),
                confidence=min(10, 1 + int(math.log2(support))),
                first_seen=seen,
                cue=cue,
            )
        )
    return eset


def intuition_predictor(eset: ExperienceSet, cfg: IntuitionConfig, labels: Sequence[str]) -> Predictor:
    clock = itertools.count()
    interned: dict[str, Symbolic] = {}
    car_symbols: dict[tuple[int, str], Symbolic | None] = {}

    def symbol(t: str) -> Symbolic:
        sym = interned.get(t)
        if sym is None:
            sym = interned[t] = Symbolic(t)
        return sym

    def car_observed(seq: RevealSequence, k: int) -> tuple[Symbolic, ...]:
        out = []
        for s in seq.steps[: k + 1]:
            if s.tag is EntityTag.HIDDEN:
                continue
            key = (s.slot, s.value)
            if key not in car_symbols:
                tok = car_cue([s])
                car_symbols[key] = symbol(tok[0]) if tok else None
            sym = car_symbols[key]
            if sym is not None:
                out.append(sym)
        return tuple(out)

    def predict(seq: RevealSequence, k: int) -> int:
        if seq.domain == "car":
            observed = car_observed(seq, k)
        else:
            observed = tuple(symbol(t) for t in observed_tokens(seq, k))
        problem = ProblemElement(f"{seq.domain}:{seq.record_id}:{k}", seq.domain, observed, next(clock))
        return intuit(problem, eset, cfg, NP_AVAILABILITY, labels).payload.ordinal_index

    return predict
