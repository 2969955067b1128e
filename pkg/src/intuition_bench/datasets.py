"""UCI Car Evaluation / Poker Hand ingestion, entity tagging and reveal streams.

Every revealed slot is tagged with an :class:`EntityTag`:

* ``KNOWN``: present and observed,
* ``HIDDEN``: present but never shown to the predictors (a dealt card the
  player cannot see, a car detail left out of the listing),
* ``UNKNOWN``: not part of the world the predictors were built for (an
  out-of-vocabulary attribute value from a bus or truck record, a card
  drawn from a replacement deck).
"""

from __future__ import annotations

import enum
import json
import logging
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .poker import FULL_DECK, Card, hand_class, validate_cards

log = logging.getLogger(__name__)

CAR_ATTRIBUTES = ("buying", "maint", "doors", "persons", "lug_boot", "safety")
CAR_DOMAINS: dict[str, tuple[str, ...]] = {
    "buying": ("vhigh", "high", "med", "low"),
    "maint": ("vhigh", "high", "med", "low"),
    "doors": ("2", "3", "4", "5more"),
    "persons": ("2", "4", "more"),
    "lug_boot": ("small", "med", "big"),
    "safety": ("low", "med", "high"),
}
CAR_CLASSES = ("unacc", "acc", "good", "vgood")

# Out-of-domain tokens a bus or truck listing would carry.
ALIEN_VALUES: dict[str, tuple[str, ...]] = {
    "doors": ("6", "8", "12"),
    "persons": ("9", "20", "40"),
}
# Numeric anchors for mapping an alien token onto the closest in-domain value.
_NUMERIC_ANCHORS: dict[str, tuple[tuple[int, str], ...]] = {
    "doors": ((2, "2"), (3, "3"), (4, "4"), (5, "5more")),
    "persons": ((2, "2"), (4, "4"), (5, "more")),
}

POKER_CLASSES = tuple(str(k) for k in range(10))


class DataError(Exception):
    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class EntityTag(enum.Enum):
    KNOWN = "known"
    HIDDEN = "hidden"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CarRecord:
    values: tuple[str, ...]
    label: str
    entity: EntityTag = EntityTag.KNOWN
    # reveal step whose attribute is never shown
    hidden_step: int | None = None
    rid: int = -1

    @property
    def class_index(self) -> int:
        return CAR_CLASSES.index(self.label)

    @property
    def is_alien(self) -> bool:
        return any(v not in CAR_DOMAINS[a] for a, v in zip(CAR_ATTRIBUTES, self.values))


@dataclass(frozen=True)
class PokerRecord:
    cards: tuple[Card, ...]
    label: int
    entity: EntityTag = EntityTag.KNOWN
    hidden_step: int | None = None
    # a replacement deck is opened before this reveal step
    deck_change_step: int | None = None
    deck_seed: int = 0
    rid: int = -1

    @property
    def class_index(self) -> int:
        return self.label


Record = Union[CarRecord, PokerRecord]


# --------------------------------------------------------------------------
# parsing


def parse_car_line(line: str, line_no: int | None = None, allow_alien: bool = False) -> CarRecord:
    fields = [f.strip() for f in line.strip().split(",")]
    if len(fields) != 7:
        raise DataError(f"expected 7 fields, got {len(fields)}", line_no)
    *values, label = fields
    if label not in CAR_CLASSES:
        raise DataError(f"unknown class {label!r}", line_no)
    for attr, v in zip(CAR_ATTRIBUTES, values):
        if v not in CAR_DOMAINS[attr] and not allow_alien:
            raise DataError(f"{attr}={v!r} outside its domain", line_no)
    return CarRecord(tuple(values), label, rid=-1 if line_no is None else line_no - 1)


def parse_poker_line(line: str, line_no: int | None = None) -> PokerRecord:
    fields = [f.strip() for f in line.strip().split(",")]
    if len(fields) != 11:
        raise DataError(f"expected 11 fields, got {len(fields)}", line_no)
    try:
        nums = [int(f) for f in fields]
    except ValueError as exc:
        raise DataError(f"non-integer field ({exc})", line_no) from None
    cards = tuple((nums[i], nums[i + 1]) for i in range(0, 10, 2))
    try:
        validate_cards(cards)
    except ValueError as exc:
        raise DataError(str(exc), line_no) from None
    if not 0 <= nums[10] <= 9:
        raise DataError(f"hand class {nums[10]} outside 0..9", line_no)
    return PokerRecord(cards, nums[10], rid=-1 if line_no is None else line_no - 1)


def _read(path, parse, strict: bool) -> tuple[list, list[DataError]]:
    records, errors = [], []
    with open(path, encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(parse(line, line_no))
            except DataError as err:
                if strict:
                    raise
                log.warning("skipping %s", err)
                errors.append(err)
    return records, errors


def read_car(path, strict: bool = True) -> tuple[list[CarRecord], list[DataError]]:
    return _read(path, parse_car_line, strict)


def read_poker(path, strict: bool = True) -> tuple[list[PokerRecord], list[DataError]]:
    return _read(path, parse_poker_line, strict)


def load_car(path, strict: bool = True) -> list[CarRecord]:
    """Parse a ``car.data`` file; lenient mode skips malformed lines with a warning."""
    return read_car(path, strict)[0]


def load_poker(path, strict: bool = True) -> list[PokerRecord]:
    return read_poker(path, strict)[0]


def format_record(rec: Record) -> str:
    if isinstance(rec, CarRecord):
        return ",".join((*rec.values, rec.label))
    return ",".join(str(x) for card in rec.cards for x in card) + f",{rec.label}"


def dump_records(records: Iterable[Record]) -> str:
    """Serialise back into the UCI comma-separated layout (CRLF-free, trailing newline)."""
    return "".join(format_record(r) + "\n" for r in records)


def detect_dataset(path) -> str:
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.strip():
                n = len(line.split(","))
                if n == 7:
                    return "car"
                if n == 11:
                    return "poker"
                raise DataError(f"cannot tell dataset from a {n}-field line", 1)
    raise DataError("empty file")


# --------------------------------------------------------------------------
# uncertainty injection


def best_fit_value(attr: str, token: str) -> str | None:
    """Closest in-domain value for an out-of-domain token, or None if there is no sensible fit."""
    if token in CAR_DOMAINS[attr]:
        return token
    anchors = _NUMERIC_ANCHORS.get(attr)
    if anchors is None:
        return None
    try:
        x = float(token)
    except ValueError:
        return None
    return min(anchors, key=lambda a: (abs(a[0] - x), -a[0]))[1]


def assign_entities(n: int, fraction: float, seed: int, equal_split: bool = False) -> list[EntityTag]:
    """Choose which of ``n`` rows become unknown (and, with ``equal_split``, hidden).

    ``round(fraction * n)`` rows become UNKNOWN. With ``equal_split`` the same
    number become HIDDEN, so a fraction of 1/3 gives equal thirds.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    rng = random.Random(seed)
    n_unknown = round(fraction * n)
    n_hidden = min(n_unknown, n - n_unknown) if equal_split else 0
    picked = rng.sample(range(n), n_unknown + n_hidden)
    tags = [EntityTag.KNOWN] * n
    for i in picked[:n_unknown]:
        tags[i] = EntityTag.UNKNOWN
    for i in picked[n_unknown:]:
        tags[i] = EntityTag.HIDDEN
    return tags


def _alienate_car(rec: CarRecord, rng: random.Random, reference: dict | None) -> CarRecord:
    attrs = list(ALIEN_VALUES)
    chosen = rng.sample(attrs, rng.randint(1, len(attrs)))
    values = list(rec.values)
    for attr in chosen:
        values[CAR_ATTRIBUTES.index(attr)] = rng.choice(ALIEN_VALUES[attr])
    label = rec.label
    if reference is not None:
        fitted = tuple(best_fit_value(a, v) for a, v in zip(CAR_ATTRIBUTES, values))
        label = reference.get(fitted, label)
    return replace(rec, values=tuple(values), label=label, entity=EntityTag.UNKNOWN)


def car_reference(records: Iterable[CarRecord]) -> dict[tuple[str, ...], str]:
    """Attribute tuple -> class lookup used to label alien rows by their best fit."""
    return {r.values: r.label for r in records if not r.is_alien}


def inject_alien_records(
    records: Sequence[Record],
    fraction: float,
    seed: int,
    equal_split: bool = False,
    reference: dict[tuple[str, ...], str] | None = None,
) -> list[Record]:
    """Replace a fraction of rows with unknown-entity rows.

    Car rows get out-of-domain tokens in ``doors``/``persons`` (a bus with
    ``persons=40``); their label is that of the best-fitting real car when
    ``reference`` has it. Poker rows get a replacement deck opened partway
    through the deal. With ``equal_split`` an equal number of rows is marked
    HIDDEN (one reveal step, never the first, stays unseen). Rows not picked
    are returned as the same objects.
    """
    tags = assign_entities(len(records), fraction, seed, equal_split)
    rng = random.Random(f"inject:{seed}")
    out: list[Record] = []
    for rec, tag in zip(records, tags):
        n_slots = len(rec.values) if isinstance(rec, CarRecord) else len(rec.cards)
        if tag is EntityTag.KNOWN:
            out.append(rec)
        elif tag is EntityTag.HIDDEN:
            out.append(replace(rec, entity=EntityTag.HIDDEN, hidden_step=rng.randrange(1, n_slots)))
        elif isinstance(rec, CarRecord):
            out.append(_alienate_car(rec, rng, reference))
        else:
            out.append(
                replace(
                    rec,
                    entity=EntityTag.UNKNOWN,
                    deck_change_step=rng.randrange(1, n_slots),
                    deck_seed=rng.getrandbits(32),
                )
            )
    return out


# --------------------------------------------------------------------------
# reveal sequences


@dataclass(frozen=True)
class RevealStep:
    index: int
    slot: int
    value: object  # attribute token (car) or (suit, rank) card (poker)
    tag: EntityTag


@dataclass(frozen=True)
class RevealSequence:
    record_id: int
    domain: str
    steps: tuple[RevealStep, ...]
    label: int
    entity: EntityTag = EntityTag.KNOWN
    events: tuple[tuple[str, int], ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def visible(self, upto: int) -> list[RevealStep]:
        """Steps 0..upto that the predictors are allowed to see."""
        return [s for s in self.steps[: upto + 1] if s.tag is not EntityTag.HIDDEN]

    def prefixes(self):
        for k in range(len(self.steps)):
            yield k, self.steps[: k + 1]


def reveal_iterator(record: Record, order: Sequence[int] | None = None, events: Iterable[tuple[str, int, int]] = ()) -> RevealSequence:
    """Build the step-by-step reveal of one record.

    ``order`` permutes the slots (natural column / deal order by default).
    ``events`` are ``("deck_change", step, seed)`` triples applied on top of
    any deck change already scheduled on the record.
    """
    if isinstance(record, CarRecord):
        domain, slots = "car", record.values
    else:
        domain, slots = "poker", record.cards
    n = len(slots)
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order must permute 0..{n - 1}")
    steps = []
    for k, slot in enumerate(order):
        value = slots[slot]
        if k == record.hidden_step:
            tag = EntityTag.HIDDEN
        elif domain == "car" and value not in CAR_DOMAINS[CAR_ATTRIBUTES[slot]]:
            tag = EntityTag.UNKNOWN
        else:
            tag = EntityTag.KNOWN
        steps.append(RevealStep(k, slot, value, tag))
    seq = RevealSequence(record.rid, domain, tuple(steps), record.class_index, record.entity)
    pending = list(events)
    if isinstance(record, PokerRecord) and record.deck_change_step is not None:
        pending.insert(0, ("deck_change", record.deck_change_step, record.deck_seed))
    for kind, step, seed in pending:
        if kind != "deck_change":
            raise ValueError(f"unknown event {kind!r}")
        seq = inject_deck_change(seq, step, seed)
    return seq


def inject_deck_change(sequence: RevealSequence, step_index: int, seed: int) -> RevealSequence:
    """Open a fresh deck before reveal ``step_index``.

    Every reveal from ``step_index`` on is redrawn from a new shuffled
    52-card pack (so a card already seen may turn up again) and tagged
    UNKNOWN; the label becomes the class of the final mixed hand.
    ``step_index == len(sequence)`` is the end of the deal and changes nothing.
    """
    if sequence.domain != "poker":
        raise ValueError("deck changes only apply to poker sequences")
    n = len(sequence.steps)
    if not 0 <= step_index <= n:
        raise IndexError(f"step_index {step_index} outside 0..{n}")
    deck = list(FULL_DECK)
    random.Random(seed).shuffle(deck)
    steps = list(sequence.steps[:step_index])
    for k in range(step_index, n):
        old = sequence.steps[k]
        steps.append(RevealStep(k, old.slot, deck.pop(), EntityTag.UNKNOWN))
    hand = [s.value for s in sorted(steps, key=lambda s: s.slot)]
    return replace(
        sequence,
        steps=tuple(steps),
        label=hand_class(hand),
        events=sequence.events + (("deck_change", step_index),),
    )


# --------------------------------------------------------------------------
# reveal log (JSON lines, one reveal step per line)


def write_reveal_log(sequences: Iterable[RevealSequence], fh: IO[str]) -> int:
    n = 0
    for seq in sequences:
        for s in seq.steps:
            row = {
                "record": seq.record_id,
                "domain": seq.domain,
                "step": s.index,
                "slot": s.slot,
                "value": list(s.value) if isinstance(s.value, tuple) else s.value,
                "tag": s.tag.value,
                "label": seq.label,
                "entity": seq.entity.value,
                "events": [list(e) for e in seq.events],
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            n += 1
    return n


def read_reveal_log(fh: IO[str]) -> list[RevealSequence]:
    grouped: dict[tuple[str, int], list[dict]] = {}
    for line in fh:
        if line.strip():
            row = json.loads(line)
            grouped.setdefault((row["domain"], row["record"]), []).append(row)
    out = []
    for (domain, rid), rows in grouped.items():
        rows.sort(key=lambda r: r["step"])
        steps = tuple(
            RevealStep(r["step"], r["slot"], tuple(r["value"]) if isinstance(r["value"], list) else r["value"], EntityTag(r["tag"]))
            for r in rows
        )
        first = rows[0]
        out.append(
            RevealSequence(
                rid,
                domain,
                steps,
                first["label"],
                EntityTag(first["entity"]),
                tuple((e[0], e[1]) for e in first["events"]),
            )
        )
    return out


def write_records(records: Iterable[Record], path) -> None:
    Path(path).write_text(dump_records(records), encoding="ascii")
