"""Feature vectors (NN) and observation tokens (HMM) for partially revealed records."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..datasets import CAR_ATTRIBUTES, CAR_DOMAINS, EntityTag, RevealSequence, RevealStep

_CAR_OFFSETS = []
_off = 0
for _a in CAR_ATTRIBUTES:
    _CAR_OFFSETS.append(_off)
    _off += len(CAR_DOMAINS[_a]) + 1  # +1 out-of-vocabulary slot
CAR_N_FEATURES = _off

POKER_N_FEATURES = 13


@dataclass(frozen=True)
class EncodedRecord:
    """A masked record ready for the network.

    Unseen attributes encode as all-zero blocks; ``mask[i]`` is True when
    slot ``i`` is visible.
    """

    features: np.ndarray
    label: int
    mask: tuple[bool, ...]


def car_features(visible: Sequence[RevealStep]) -> np.ndarray:
    x = np.zeros(CAR_N_FEATURES)
    for s in visible:
        attr = CAR_ATTRIBUTES[s.slot]
        domain = CAR_DOMAINS[attr]
        pos = domain.index(s.value) if s.value in domain else len(domain)
        x[_CAR_OFFSETS[s.slot] + pos] = 1.0
    return x


def straight_window(ranks: Sequence[int]) -> int:
    """Largest number of distinct given ranks inside any five-rank window (ace plays high or low)."""
    present = set(ranks)
    if 1 in present:
        present.add(14)
    best = 0
    for low in range(1, 11):
        best = max(best, sum(1 for r in range(low, low + 5) if r in present))
    return best


def poker_shape(cards: Sequence[tuple[int, int]]) -> dict:
    """Rank/suit summary of the visible cards shared by the NN features and the intuition cue."""
    n = len(cards)
    ranks = [r for _, r in cards]
    mult = sorted(Counter(ranks).values(), reverse=True)
    suit_max = max(Counter(s for s, _ in cards).values()) if cards else 0
    distinct = len(set(ranks)) == n
    window = straight_window(ranks) if cards else 0
    return {
        "n": n,
        "mult": tuple(mult),
        "flush": n >= 2 and suit_max == n,
        "suit_max": suit_max,
        "straight": n >= 2 and distinct and window == n,
        "window": window,
        "royal": n >= 2 and distinct and all(r in (1, 10, 11, 12, 13) for r in ranks),
        "dup": len(set(cards)) != n,
    }


def poker_features(visible: Sequence[RevealStep], dealt: int) -> np.ndarray:
    sh = poker_shape([s.value for s in visible])
    mult = sh["mult"]
    pairs = sum(1 for m in mult if m == 2)
    return np.array(
        [
            sh["n"] / 5,
            dealt / 5,
            float(pairs == 1),
            float(pairs >= 2),
            float(any(m == 3 for m in mult)),
            float(any(m >= 4 for m in mult)),
            sh["suit_max"] / 5,
            float(sh["flush"]),
            float(sh["straight"]),
            sh["window"] / 5,
            float(sh["royal"]),
            float(sh["dup"]),
            1.0,
        ]
    )


def encode_step(seq: RevealSequence, upto: int) -> EncodedRecord:
    visible = seq.visible(upto)
    mask = [False] * len(seq.steps)
    for s in visible:
        mask[s.slot] = True
    if seq.domain == "car":
        x = car_features(visible)
    else:
        x = poker_features(visible, upto + 1)
    return EncodedRecord(x, seq.label, tuple(mask))


def encode_sequences(sequences: Sequence[RevealSequence]) -> tuple[np.ndarray, np.ndarray]:
    """Every reveal prefix of every sequence as a training matrix."""
    xs, ys = [], []
    for seq in sequences:
        for k in range(len(seq.steps)):
            if not seq.visible(k):
                continue
            rec = encode_step(seq, k)
            xs.append(rec.features)
            ys.append(rec.label)
    return np.array(xs), np.array(ys, dtype=np.int64)


# --------------------------------------------------------------------------
# HMM observation tokens


def car_token(step: RevealStep) -> str:
    attr = CAR_ATTRIBUTES[step.slot]
    return f"{attr}=?" if step.tag is EntityTag.HIDDEN else f"{attr}={step.value}"


def poker_token(seq: RevealSequence, k: int) -> str:
    """How card ``k`` relates to the visible cards before it.

    ``{k}:{r}{s}{w}`` with r = earlier cards of the same rank (capped at 3),
    s = 1 when every earlier visible card shares its suit, w = 1 when all
    visible ranks are still distinct and inside one five-rank window.
    """
    step = seq.steps[k]
    if step.tag is EntityTag.HIDDEN:
        return f"{k}:H"
    before = [s.value for s in seq.steps[:k] if s.tag is not EntityTag.HIDDEN]
    suit, rank = step.value
    r = min(3, sum(1 for _, rr in before if rr == rank))
    s = int(bool(before) and all(ss == suit for ss, _ in before))
    ranks = [rr for _, rr in before] + [rank]
    w = int(len(ranks) >= 2 and len(set(ranks)) == len(ranks) and straight_window(ranks) == len(ranks))
    return f"{k}:{r}{s}{w}"


def tokens(seq: RevealSequence, upto: int) -> list[str]:
    if seq.domain == "car":
        return [car_token(s) for s in seq.steps[: upto + 1]]
    return [poker_token(seq, k) for k in range(upto + 1)]
