"""Experience-mapping intuition model.

A problem element is answered by retrieving a stored past-experience value
instead of reasoning it out. The retrieved value is shifted by::

    delta = P(IP|NP) * importance_ip/10 + priority/10 + external

and the pair ``(importance_ip, importance_np)`` of the chosen experience
decides whether the mapped answer comes out correct, adjusted, wrong or
highly inaccurate.

Scores are stored as integers on a 1..10 scale and divided by 10 only when
a formula consumes them.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
import zlib
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Sequence, Union

SCORE_MIN = 1
SCORE_MAX = 10


class IntuitionError(Exception):
    pass


class NoExperience(IntuitionError):
    """No experience element is available to map the problem onto."""


class NoNormalProcess(IntuitionError):
    """Intuition was requested without any normal (logic) process to condition on."""


class AnswerClass(enum.Enum):
    CORRECT = "correct"
    WRONG = "wrong"
    ADJUSTED = "adjusted"
    HIGHLY_INACCURATE = "highly_inaccurate"


@dataclass(frozen=True, slots=True)
class Numeric:
    value: float


@dataclass(frozen=True, slots=True)
class Symbolic:
    label: str
    ordinal_index: int = 0
    alphabet_size: int = 1

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError(f"alphabet_size must be >= 1, got {self.alphabet_size}")
        if not 0 <= self.ordinal_index < self.alphabet_size:
            raise ValueError(
                f"ordinal_index {self.ordinal_index} outside alphabet of size {self.alphabet_size}"
            )


Payload = Union[Numeric, Symbolic]


@dataclass(frozen=True, slots=True)
class ProblemElement:
    id: str
    domain_tag: str
    observed: tuple[Payload, ...]
    time_t: int = 0
    cue: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.observed:
            raise ValueError("a problem element needs at least one observed value")
        object.__setattr__(self, "cue", frozenset([_token(p) for p in self.observed]))


def _token(p: Payload) -> str:
    return p.label if type(p) is Symbolic else repr(p.value)


@dataclass(frozen=True, slots=True)
class ExperienceElement:
    """One remembered value.

    ``cue`` is the set of observation tokens the experience was recorded
    under; an element is a candidate for a problem when its cue is a subset
    of the problem's observed tokens.
    """

    id: str
    domain_tag: str
    value: Payload
    priority: int
    importance_ip: int
    importance_np: int
    confidence: int
    first_seen: int
    revision_count: int = 0
    cue: frozenset[str] = frozenset()

    def __post_init__(self):
        for name in ("priority", "importance_ip", "importance_np", "confidence"):
            _check_score(getattr(self, name), name)
        if self.revision_count < 0:
            raise ValueError("revision_count must be >= 0")


def _check_score(s: int, name: str = "score", floor: int = SCORE_MIN) -> None:
    if not floor <= s <= SCORE_MAX:
        raise ValueError(f"{name} must be in [{floor}, {SCORE_MAX}], got {s}")


class ExperienceSet:
    """Experience elements indexed by domain tag and cue.

    Mutation (``add``/``revise``) is single-writer. Readers only touch
    dictionaries that are replaced wholesale per write, so a reader that
    races a writer sees either the old or the new element, never a torn one.
    """

    def __init__(self, elements: Iterable[ExperienceElement] = ()):
        self._by_id: dict[str, ExperienceElement] = {}
        self._index: dict[str, dict[frozenset[str], list[ExperienceElement]]] = {}
        # (domain, query cue) -> best match; cleared on every write
        self._best: dict[tuple[str, frozenset[str]], ExperienceElement | None] = {}
        for e in elements:
            self.add(e)

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self):
        return iter(list(self._by_id.values()))

    def __contains__(self, element_id: str) -> bool:
        return element_id in self._by_id

    def get(self, element_id: str) -> ExperienceElement:
        return self._by_id[element_id]

    @property
    def domains(self) -> list[str]:
        return sorted(self._index)

    def add(self, element: ExperienceElement) -> None:
        if element.id in self._by_id:
            raise ValueError(f"duplicate experience id {element.id!r}")
        self._by_id[element.id] = element
        self._best = {}
        by_cue = self._index.setdefault(element.domain_tag, {})
        by_cue[element.cue] = by_cue.get(element.cue, []) + [element]

    def revise(self, element_id: str, **changes) -> ExperienceElement:
        """Replace fields of an element; ``first_seen`` is kept and the revision counted."""
        old = self._by_id[element_id]
        if "id" in changes or "first_seen" in changes:
            raise ValueError("id and first_seen are immutable")
        new = replace(old, **changes, revision_count=old.revision_count + 1)
        self._by_id[element_id] = new
        self._best = {}
        old_bucket = self._index[old.domain_tag][old.cue]
        self._index[old.domain_tag][old.cue] = [e for e in old_bucket if e.id != element_id]
        if not self._index[old.domain_tag][old.cue]:
            del self._index[old.domain_tag][old.cue]
        by_cue = self._index.setdefault(new.domain_tag, {})
        by_cue[new.cue] = by_cue.get(new.cue, []) + [new]
        return new

    def matches(self, domain_tag: str, cue: frozenset[str]) -> list[ExperienceElement]:
        """Elements of one domain whose cue is the most specific subset of ``cue``."""
        by_cue = self._index.get(domain_tag)
        if not by_cue:
            return []
        hit = by_cue.get(cue)
        if hit:
            return hit
        tokens = sorted(cue)
        for size in range(len(tokens) - 1, -1, -1):
            found: list[ExperienceElement] = []
            for sub in itertools.combinations(tokens, size):
                bucket = by_cue.get(frozenset(sub))
                if bucket:
                    found.extend(bucket)
            if found:
                return found
        return []

    def best_match(self, domain_tag: str, cue: frozenset[str]) -> ExperienceElement | None:
        """Highest ranked element of :meth:`matches`, memoised per query."""
        key = (domain_tag, cue)
        try:
            return self._best[key]
        except KeyError:
            pass
        pool = self.matches(domain_tag, cue)
        best = self._best[key] = max(pool, key=_selection_key) if pool else None
        return best


@dataclass(frozen=True, slots=True)
class MappedAnswer:
    delta: float
    payload: Payload
    classification: AnswerClass | None = None
    chosen_id: str = ""


@dataclass(frozen=True)
class IntuitionConfig:
    base_ip_prob: float = 0.7
    external_factor: float = 0.8
    adjustment_factor: float = 0.0
    importance_threshold: int = 5
    adjusted_answer_radius: int = 1
    # "fallback": other domains only when the problem's own domain has no match
    cross_domain: str = "fallback"
    seed: int = 0

    def __post_init__(self):
        for name in ("base_ip_prob", "external_factor"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if not math.isfinite(self.adjustment_factor):
            raise ValueError("adjustment_factor must be finite")
        _check_score(self.importance_threshold, "importance_threshold")
        if self.adjusted_answer_radius < 1:
            raise ValueError("adjusted_answer_radius must be >= 1")
        if self.cross_domain not in ("fallback", "always", "never"):
            raise ValueError(f"unknown cross_domain mode {self.cross_domain!r}")


def normalize_score(s: int, floor: int = SCORE_MIN) -> float:
    """Map a 1..10 score onto a unit fraction (``7 -> 0.7``).

    ``floor=0`` admits a zero score; the default rejects it.
    """
    _check_score(s, floor=floor)
    return s / 10


def p_ip_given_np(base: float, np_availabilities: Sequence[float]) -> float:
    if not np_availabilities:
        raise NoNormalProcess("intuition needs at least one normal process")
    p = base
    for a in np_availabilities:
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"availability must be in [0, 1], got {a}")
        p *= a
    return min(1.0, max(0.0, p))


def _selection_key(e: ExperienceElement):
    # first_seen ascending: the earliest recorded version is preferred
    return (e.priority, e.importance_ip, -e.first_seen, -e.revision_count, e.id)


def select_experience(
    problem: ProblemElement, eset: ExperienceSet, cross_domain: str = "fallback"
) -> ExperienceElement:
    """Pick the highest-priority experience whose cue fits the problem.

    Ties go to higher ``importance_ip``, then to the earliest ``first_seen``.
    """
    cue = problem.cue
    if cross_domain != "always":
        best = eset.best_match(problem.domain_tag, cue)
        if best is not None or cross_domain == "never":
            if best is None:
                raise NoExperience(f"no experience matches problem {problem.id!r}")
            return best
    pool = [e for e in (eset.best_match(d, cue) for d in eset.domains) if e is not None]
    if not pool:
        raise NoExperience(f"no experience matches problem {problem.id!r}")
    return max(pool, key=_selection_key)


def mapping_fn(
    p_ip_np: float,
    imp_ip: int,
    priority: int,
    element_value: Payload,
    external: float,
    score_floor: int = SCORE_MIN,
) -> MappedAnswer:
    if not 0.0 <= p_ip_np <= 1.0 or not 0.0 <= external <= 1.0:
        raise ValueError("probabilities must be in [0, 1]")
    _check_score(imp_ip, "imp_ip", score_floor)
    _check_score(priority, "priority", score_floor)
    return MappedAnswer(delta=_delta(p_ip_np, imp_ip, priority, external), payload=element_value)


def _delta(p_ip_np: float, imp_ip: int, priority: int, external: float) -> float:
    return p_ip_np * (imp_ip / 10) + priority / 10 + external


def classify_answer(imp_ip: int, imp_np: int, threshold: int = 5) -> AnswerClass:
    _check_score(imp_ip, "imp_ip")
    _check_score(imp_np, "imp_np")
    return _classify(imp_ip, imp_np, threshold)


def _classify(imp_ip: int, imp_np: int, threshold: int) -> AnswerClass:
    if imp_np > imp_ip and imp_ip < threshold:
        return AnswerClass.WRONG
    if imp_ip > imp_np and imp_ip > threshold:
        return AnswerClass.CORRECT
    if imp_ip > imp_np and imp_ip < threshold:
        return AnswerClass.ADJUSTED
    return AnswerClass.HIGHLY_INACCURATE


def apply_adjustment(m: MappedAnswer, adjustment: float) -> Payload:
    if not math.isfinite(m.delta):
        raise ValueError("delta must be finite")
    p = m.payload
    if isinstance(p, Numeric):
        return Numeric(p.value + m.delta + adjustment)
    shifted = p.ordinal_index + round(m.delta + adjustment)
    return _with_index(p, min(max(shifted, 0), p.alphabet_size - 1))


def _with_index(p: Symbolic, index: int) -> Symbolic:
    if index == p.ordinal_index:
        return p
    return Symbolic(label=f"#{index}", ordinal_index=index, alphabet_size=p.alphabet_size)


def intuit(
    problem: ProblemElement,
    eset: ExperienceSet,
    cfg: IntuitionConfig,
    np_availabilities: Sequence[float],
    labels: Sequence[str] | None = None,
) -> MappedAnswer:
    """Answer ``problem`` from experience.

    Numeric experiences always come back as ``value + delta + adjustment``.
    Symbolic ones (class labels) depend on the classification of the chosen
    element: correct keeps the label, adjusted moves it at most
    ``adjusted_answer_radius`` ordinal steps, wrong moves it one step
    (wrapping), highly inaccurate draws another label at random from a
    stream seeded by ``cfg.seed`` and the problem id. ``labels`` names the
    ordinal positions when they should carry readable labels.
    """
    # steps 1-2: problem element in hand, map it onto an experience element
    chosen = select_experience(problem, eset, cfg.cross_domain)
    # steps 3-4: condition on the normal process and fold in the dependent ones
    p = p_ip_given_np(cfg.base_ip_prob, np_availabilities)
    # step 5: mapping function plus the adjustment factor (scores were range
    # checked when the element was built)
    delta = _delta(p, chosen.importance_ip, chosen.priority, cfg.external_factor)
    # step 6: external influences are in delta; classify and emit
    cls = _classify(chosen.importance_ip, chosen.importance_np, cfg.importance_threshold)
    value = chosen.value
    if cls is AnswerClass.CORRECT and type(value) is Symbolic:
        return MappedAnswer(delta, value, cls, chosen.id)
    if isinstance(value, Numeric):
        out: Payload = apply_adjustment(MappedAnswer(delta, value), cfg.adjustment_factor)
    elif cls is AnswerClass.ADJUSTED:
        r = cfg.adjusted_answer_radius
        target = apply_adjustment(MappedAnswer(delta, value), cfg.adjustment_factor).ordinal_index
        step = max(-r, min(r, target - value.ordinal_index))
        out = _with_index(value, value.ordinal_index + step)
    elif cls is AnswerClass.WRONG:
        out = _with_index(value, (value.ordinal_index + 1) % value.alphabet_size)
    else:
        out = _scatter(value, f"{cfg.seed}:{problem.id}")
    if labels is not None and isinstance(out, Symbolic) and out is not value:
        out = Symbolic(labels[out.ordinal_index], out.ordinal_index, out.alphabet_size)
    return MappedAnswer(delta, out, cls, chosen.id)


def _scatter(p: Symbolic, seed: str) -> Symbolic:
    """Any label but ``p``, picked by a CRC32 hash of ``seed`` (stable across runs and processes)."""
    if p.alphabet_size == 1:
        return p
    k = zlib.crc32(seed.encode()) % (p.alphabet_size - 1)
    return _with_index(p, k if k < p.ordinal_index else k + 1)


# --------------------------------------------------------------------------
# text format: one element per line, tab separated, in this field order:
#
#   id  domain_tag  payload  priority  importance_ip  importance_np
#   confidence  first_seen  revision_count  cue
#
# payload is ``num:<float repr>`` or ``sym:<ordinal>:<alphabet size>:<label>``;
# cue is a JSON array of tokens (sorted). In id, domain_tag and the symbolic
# label, backslash, tab and newline are escaped as \\, \t and \n.

EXPERIENCE_FIELDS = (
    "id",
    "domain_tag",
    "payload",
    "priority",
    "importance_ip",
    "importance_np",
    "confidence",
    "first_seen",
    "revision_count",
    "cue",
)

_ESC = {"\\": "\\\\", "\t": "\\t", "\n": "\\n"}


def _escape(s: str) -> str:
    return "".join(_ESC.get(ch, ch) for ch in s)


def _unescape(s: str) -> str:
    out, i = [], 0
    while i < len(s):
        ch = s[i]
        if ch == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _format_payload(p: Payload) -> str:
    if isinstance(p, Numeric):
        return f"num:{p.value!r}"
    return f"sym:{p.ordinal_index}:{p.alphabet_size}:{_escape(p.label)}"


def _parse_payload(s: str) -> Payload:
    kind, _, rest = s.partition(":")
    if kind == "num":
        return Numeric(float(rest))
    if kind == "sym":
        idx, size, label = rest.split(":", 2)
        return Symbolic(_unescape(label), int(idx), int(size))
    raise ValueError(f"bad payload {s!r}")


def format_experience(e: ExperienceElement) -> str:
    return "\t".join(
        (
            _escape(e.id),
            _escape(e.domain_tag),
            _format_payload(e.value),
            str(e.priority),
            str(e.importance_ip),
            str(e.importance_np),
            str(e.confidence),
            str(e.first_seen),
            str(e.revision_count),
            json.dumps(sorted(e.cue)),
        )
    )


def parse_experience(line: str) -> ExperienceElement:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != len(EXPERIENCE_FIELDS):
        raise ValueError(f"expected {len(EXPERIENCE_FIELDS)} fields, got {len(parts)}")
    return ExperienceElement(
        id=_unescape(parts[0]),
        domain_tag=_unescape(parts[1]),
        value=_parse_payload(parts[2]),
        priority=int(parts[3]),
        importance_ip=int(parts[4]),
        importance_np=int(parts[5]),
        confidence=int(parts[6]),
        first_seen=int(parts[7]),
        revision_count=int(parts[8]),
        cue=frozenset(json.loads(parts[9])),
    )


def dump_experience(eset: ExperienceSet, fh: IO[str]) -> int:
    n = 0
    for e in sorted(eset, key=lambda e: (e.first_seen, e.id)):
        fh.write(format_experience(e) + "\n")
        n += 1
    return n


def load_experience(fh: IO[str]) -> ExperienceSet:
    return ExperienceSet(parse_experience(line) for line in fh if line.strip())
