"""Offline stand-ins for the UCI files, written in the exact UCI layouts.

``car.data`` is the full cartesian product of the six attribute domains
(1728 rows), labelled by a hierarchical concept with the same shape as the
original (price from buying/maint, comfort from doors/persons/lug_boot,
technical quality from comfort and safety). The utility tables below are our
own, so labels are *not* the UCI ones; the class balance is similar.

The poker stand-in deals uniform random hands from a fresh deck and labels
them with the hand evaluator, which is how the UCI poker file was built.
"""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from .datasets import CAR_ATTRIBUTES, CAR_CLASSES, CAR_DOMAINS, CarRecord, PokerRecord, dump_records
from .poker import FULL_DECK, hand_class


def _price(buying: int, maint: int) -> int:
    # 0 = unacceptable .. 3 = cheap; inputs count up from vhigh=0 to low=3
    if (buying == 0 and maint <= 1) or (buying == 1 and maint == 0):
        return 0
    s = buying + maint
    return 1 if s <= 2 else 2 if s <= 4 else 3


def _comfort(doors: int, persons: int, lug: int) -> int:
    if persons == 0:
        return 0
    if persons == 2 and doors == 0 and lug == 0:
        return 0
    c = lug + (persons - 1) + (doors >= 2)
    return 1 if c <= 1 else 2 if c == 2 else 3


def _tech(comfort: int, safety: int) -> int:
    if safety == 0 or comfort == 0:
        return 0
    return min(comfort, 2) if safety == 1 else comfort


def car_concept(values: tuple[str, ...]) -> str:
    idx = [CAR_DOMAINS[a].index(v) for a, v in zip(CAR_ATTRIBUTES, values)]
    buying, maint, doors, persons, lug, safety = idx
    price = _price(buying, maint)
    tech = _tech(_comfort(doors, persons, lug), safety)
    if price == 0 or tech == 0:
        return "unacc"
    score = price + tech
    if score <= 2:
        return "unacc"
    if score <= 4:
        return "acc"
    if score == 5:
        return "vgood" if tech == 3 else "good" if tech == 2 else "acc"
    return "vgood"


def car_rows() -> list[CarRecord]:
    rows = []
    for i, values in enumerate(itertools.product(*(CAR_DOMAINS[a] for a in CAR_ATTRIBUTES))):
        rows.append(CarRecord(values, car_concept(values), rid=i))
    return rows


def poker_rows(n: int, seed: int) -> list[PokerRecord]:
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        cards = tuple(rng.sample(FULL_DECK, 5))
        rows.append(PokerRecord(cards, hand_class(cards), rid=i))
    return rows


def write_car_data(path) -> int:
    rows = car_rows()
    Path(path).write_text(dump_records(rows), encoding="ascii")
    return len(rows)


def write_poker_data(path, n: int = 25010, seed: int = 0) -> int:
    rows = poker_rows(n, seed)
    Path(path).write_text(dump_records(rows), encoding="ascii")
    return len(rows)


__all__ = ["car_concept", "car_rows", "poker_rows", "write_car_data", "write_poker_data", "CAR_CLASSES"]
