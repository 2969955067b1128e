"""Card probabilities under the naive fixed-deck assumption.

The untrained baselines treat the deck as a fixed, untouched 52-card pack.
Under that assumption the distribution of the final hand class given the
cards seen so far is exact and is computed here by enumerating every
completion.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterable

import numpy as np

from ..poker import FULL_DECK, N_CLASSES, Card, card_index, hand_class, hand_classes, validate_cards


@lru_cache(maxsize=256)
def _completion_counts(seen: frozenset[Card]) -> tuple[int, ...]:
    remaining = np.array([card_index(c) for c in FULL_DECK if c not in seen], dtype=np.int16)
    need = 5 - len(seen)
    n_combos = comb(len(remaining), need)
    if need == 0:
        cls = hand_class(sorted(seen))
        return tuple(int(k == cls) for k in range(N_CLASSES))
    picks = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(len(remaining)), need)),
        dtype=np.int16,
        count=n_combos * need,
    ).reshape(n_combos, need)
    drawn = remaining[picks]
    if seen:
        fixed = np.array([card_index(c) for c in seen], dtype=np.int16)
        drawn = np.hstack([np.broadcast_to(fixed, (n_combos, len(fixed))), drawn])
    classes = hand_classes(drawn // 13 + 1, drawn % 13 + 1)
    return tuple(int(x) for x in np.bincount(classes, minlength=N_CLASSES))


def naive_class_counts(seen_cards: Iterable[Card]) -> tuple[tuple[int, ...], int]:
    """Exact completion counts per hand class under a fixed 52-card deck.

    Returns ``(counts, total)`` where ``counts[k]`` is the number of ways to
    draw the missing cards so the final hand is class ``k``.
    """
    seen = list(seen_cards)
    if len(seen) > 5:
        raise ValueError("at most 5 seen cards")
    validate_cards(seen)
    counts = _completion_counts(frozenset(seen))
    return counts, sum(counts)


def naive_poker_probability(seen_cards: Iterable[Card], target_hand_class: int) -> float:
    """Probability of finishing as ``target_hand_class`` assuming the deck is fixed."""
    if not 0 <= target_hand_class < N_CLASSES:
        raise ValueError(f"hand class must be in 0..9, got {target_hand_class}")
    counts, total = naive_class_counts(seen_cards)
    return counts[target_hand_class] / total
