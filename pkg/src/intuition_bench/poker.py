"""Five-card hand classification in the UCI poker-hand encoding.

Cards are ``(suit, rank)`` tuples with suits 1..4 and ranks 1..13 (ace = 1).
Hand classes follow poker-hand.names::

    0 nothing      1 one pair     2 two pairs    3 three of a kind
    4 straight     5 flush        6 full house   7 four of a kind
    8 straight flush              9 royal flush
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np

Card = tuple[int, int]

SUITS = (1, 2, 3, 4)
RANKS = tuple(range(1, 14))
N_CLASSES = 10
HAND_NAMES = (
    "nothing",
    "one pair",
    "two pairs",
    "three of a kind",
    "straight",
    "flush",
    "full house",
    "four of a kind",
    "straight flush",
    "royal flush",
)

FULL_DECK: tuple[Card, ...] = tuple((s, r) for s in SUITS for r in RANKS)

_ROYAL = (1, 10, 11, 12, 13)


def card_index(card: Card) -> int:
    suit, rank = card
    return (suit - 1) * 13 + (rank - 1)


def validate_cards(cards: Sequence[Card], allow_duplicates: bool = False) -> None:
    for suit, rank in cards:
        if suit not in SUITS or rank not in RANKS:
            raise ValueError(f"invalid card (suit={suit}, rank={rank})")
    if not allow_duplicates and len(set(cards)) != len(cards):
        raise ValueError(f"duplicate card in {list(cards)}")


def hand_class(cards: Sequence[Card]) -> int:
    """Classify a five-card hand.

    Duplicate cards (possible after a mid-hand deck change) are tolerated:
    five of one rank counts as four of a kind, and a straight needs five
    distinct ranks.
    """
    if len(cards) != 5:
        raise ValueError(f"need 5 cards, got {len(cards)}")
    ranks = sorted(r for _, r in cards)
    counts = sorted(Counter(ranks).values(), reverse=True)
    flush = len({s for s, _ in cards}) == 1
    distinct = counts[0] == 1
    royal = tuple(ranks) == _ROYAL
    straight = distinct and (ranks[4] - ranks[0] == 4 or royal)

    if straight and flush:
        return 9 if royal else 8
    if counts[0] >= 4:
        return 7
    if counts[0] == 3 and counts[1] == 2:
        return 6
    if flush:
        return 5
    if straight:
        return 4
    if counts[0] == 3:
        return 3
    if counts[0] == 2 and counts[1] == 2:
        return 2
    if counts[0] == 2:
        return 1
    return 0


_ROYAL_MASK = sum(1 << (r - 1) for r in _ROYAL)


def hand_classes(suits: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    """Vectorised :func:`hand_class` over ``(n, 5)`` suit and rank arrays."""
    suits = np.asarray(suits)
    ranks = np.asarray(ranks)
    n = ranks.shape[0]
    counts = np.zeros((n, 14), dtype=np.int8)
    rows = np.repeat(np.arange(n), 5)
    np.add.at(counts, (rows, ranks.ravel()), 1)
    counts = -np.sort(-counts, axis=1)
    top, second = counts[:, 0], counts[:, 1]

    flush = (suits == suits[:, :1]).all(axis=1)
    distinct = top == 1
    mask = np.bitwise_or.reduce(np.left_shift(1, ranks - 1), axis=1)
    royal = distinct & (mask == _ROYAL_MASK)
    straight = distinct & ((ranks.max(axis=1) - ranks.min(axis=1) == 4) | royal)

    out = np.zeros(n, dtype=np.int8)
    out[top == 2] = 1
    out[(top == 2) & (second == 2)] = 2
    out[top == 3] = 3
    out[straight] = 4
    out[flush] = 5
    out[(top == 3) & (second == 2)] = 6
    out[top >= 4] = 7
    out[straight & flush] = 8
    out[royal & flush] = 9
    return out
