"""Trial bookkeeping, error percentages and the CSV / aligned-table renderers."""

from __future__ import annotations

import csv
import enum
import io
import statistics
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from ..datasets import EntityTag


class Method(enum.Enum):
    NN = "nn"
    INTUITION = "intuition"
    HMM = "hmm"


class Mode(enum.Enum):
    UNTRAINED = "untrained"
    TRAINED = "trained"


METHOD_TITLES = {Method.NN: "Neural Networks", Method.INTUITION: "Intuition Model", Method.HMM: "Hidden Markov Models"}
DATASET_TITLES = {"car": "Car Evaluation", "poker": "Poker Evaluation"}
CSV_HEADER = ("dataset", "cycle", "method", "mode", "error_pct", "mean_elapsed_ns", "trials")


def error_percentage(mistakes: int, total: int, literal: bool = False) -> float:
    """Mistakes as a percentage of all trials.

    ``literal=True`` divides by the number of correct answers instead, which
    can exceed 100 and is undefined when nothing was answered correctly.
    """
    if total < 1:
        raise ValueError("total must be >= 1")
    if not 0 <= mistakes <= total:
        raise ValueError(f"mistakes must be in [0, {total}], got {mistakes}")
    denominator = total - mistakes if literal else total
    if denominator == 0:
        raise ZeroDivisionError("no correct answers to divide by")
    return mistakes / denominator * 100


@dataclass(frozen=True)
class TrialResult:
    predicted: int
    truth: int
    elapsed_ns: int
    entity: EntityTag = EntityTag.KNOWN
    step: int = 0

    @property
    def correct(self) -> bool:
        return self.predicted == self.truth


@dataclass
class CycleReport:
    dataset: str
    cycle: int
    method: Method
    mode: Mode
    trials: list[TrialResult] = field(default_factory=list)
    literal_error: bool = False
    timed: bool = True

    def __post_init__(self):
        if not 1 <= self.cycle <= 5:
            raise ValueError(f"cycle must be in 1..5, got {self.cycle}")

    @property
    def mistakes(self) -> int:
        return sum(1 for t in self.trials if not t.correct)

    @property
    def error_pct(self) -> float:
        return error_percentage(self.mistakes, len(self.trials), self.literal_error)

    def error_pct_for(self, entities: Iterable[EntityTag]) -> float:
        keep = set(entities)
        sub = [t for t in self.trials if t.entity in keep]
        return error_percentage(sum(1 for t in sub if not t.correct), len(sub), self.literal_error)

    @property
    def mean_elapsed_ns(self) -> float | None:
        if not self.timed or not self.trials:
            return None
        return statistics.fmean(t.elapsed_ns for t in self.trials)

    @property
    def median_elapsed_ns(self) -> float | None:
        if not self.timed or not self.trials:
            return None
        return statistics.median(t.elapsed_ns for t in self.trials)

    @property
    def key(self) -> tuple[str, int, Method, Mode]:
        return (self.dataset, self.cycle, self.method, self.mode)


@dataclass(frozen=True)
class ReportRow:
    """One CSV line; what survives of a :class:`CycleReport` once written out."""

    dataset: str
    cycle: int
    method: Method
    mode: Mode
    error_pct: float
    mean_elapsed_ns: float | None
    trials: int


def _sort_key(r) -> tuple:
    return (r.dataset, r.cycle, list(Method).index(r.method), list(Mode).index(r.mode))


def to_rows(reports: Iterable[CycleReport], timing: bool = True) -> list[ReportRow]:
    rows = [
        ReportRow(r.dataset, r.cycle, r.method, r.mode, r.error_pct, r.mean_elapsed_ns if timing else None, len(r.trials))
        for r in reports
    ]
    return sorted(rows, key=_sort_key)


def timing_report(reports: Iterable[CycleReport]) -> dict[tuple[str, Method, Mode], dict[str, float]]:
    """Mean and median per-prediction wall-clock, pooled over cycles."""
    pooled: dict[tuple[str, Method, Mode], list[int]] = {}
    for r in reports:
        if not r.timed:
            continue
        pooled.setdefault((r.dataset, r.method, r.mode), []).extend(t.elapsed_ns for t in r.trials)
    return {
        k: {"mean_ns": statistics.fmean(v), "median_ns": statistics.median(v), "n": len(v)}
        for k, v in sorted(pooled.items(), key=lambda kv: (kv[0][0], list(Method).index(kv[0][1]), list(Mode).index(kv[0][2])))
    }


def check_never_zero(reports: Iterable[CycleReport], inject_fraction: float, min_trials: int = 100) -> list[tuple]:
    """Cells that reached 0% error although unknown entities were injected."""
    if inject_fraction <= 0:
        return []
    return [r.key for r in reports if len(r.trials) >= min_trials and r.mistakes == 0]


# --------------------------------------------------------------------------
# rendering


def write_csv(rows: Sequence[ReportRow], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        elapsed = "NA" if r.mean_elapsed_ns is None else f"{r.mean_elapsed_ns:.1f}"
        w.writerow((r.dataset, r.cycle, r.method.value, r.mode.value, f"{r.error_pct:.4f}", elapsed, r.trials))


def read_csv(fh: IO[str]) -> list[ReportRow]:
    reader = csv.reader(fh)
    header = tuple(next(reader, ()))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected report header {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        ds, cycle, method, mode, err, elapsed, trials = rec
        rows.append(
            ReportRow(ds, int(cycle), Method(method), Mode(mode), float(err), None if elapsed == "NA" else float(elapsed), int(trials))
        )
    return rows


def render_table(rows: Sequence[ReportRow]) -> str:
    """Two-block layout: one block per dataset, cycles down, method x mode across."""
    out = io.StringIO()
    cell = 11
    datasets = sorted({r.dataset for r in rows}, key=lambda d: (d != "car", d))
    for ds in datasets:
        sub = {(r.cycle, r.method, r.mode): r for r in rows if r.dataset == ds}
        title = DATASET_TITLES.get(ds, ds)
        out.write(f"{title} Dataset (percentage of errors)\n")
        out.write("Cycle".ljust(7))
        for m in Method:
            out.write(METHOD_TITLES[m].center(2 * cell))
        out.write("\n" + " " * 7)
        for _ in Method:
            for mode in Mode:
                out.write(mode.value.capitalize().center(cell))
        out.write("\n")
        for cycle in sorted({c for c, _, _ in sub}):
            out.write(str(cycle).ljust(7))
            for m in Method:
                for mode in Mode:
                    r = sub.get((cycle, m, mode))
                    out.write(("-" if r is None else f"{r.error_pct:.1f}%").center(cell))
            out.write("\n")
        out.write("\n")
    return out.getvalue()


def emit_table(reports: Iterable[CycleReport] | Sequence[ReportRow], fmt: str = "csv", timing: bool = True) -> str:
    rows = list(reports)
    if rows and isinstance(rows[0], CycleReport):
        rows = to_rows(rows, timing)
    if fmt == "csv":
        buf = io.StringIO()
        write_csv(rows, buf)
        return buf.getvalue()
    if fmt == "table":
        return render_table(rows)
    raise ValueError(f"unknown format {fmt!r}")
