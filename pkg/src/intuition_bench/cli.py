"""Command-line front end.

Settings are resolved in this order, later sources winning::

    built-in defaults < --config YAML file < INTUITION_BENCH_* env vars < flags

Exit codes: 0 success, 2 usage or configuration error (including a missing
input file), 3 data error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import shutil
import sys
import tempfile
import urllib.request
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Sequence

import yaml

from . import synth
from .core_model import IntuitionConfig
from .datasets import DataError, detect_dataset, read_car, read_poker, write_records
from .experiments import (
    CycleReport,
    ExperimentConfig,
    ImportanceDraw,
    Method,
    Mode,
    check_never_zero,
    emit_table,
    read_csv,
    run_experiment,
)

log = logging.getLogger("intuition_bench")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4
ENV_PREFIX = "INTUITION_BENCH_"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    dataset: str = "poker"
    data: str | None = None
    methods: tuple[str, ...] = ("nn", "intuition", "hmm")
    modes: tuple[str, ...] = ("untrained", "trained")
    cycles: int = 5
    seed: int = 42
    inject_fraction: float = 1 / 3
    equal_split: bool = True
    format: str = "csv"
    out: str | None = None
    timing: bool = True
    literal_error: bool = False
    workers: int = 1
    strict: bool = True
    poker_eval: int = 1000
    poker_warmup: int = 4000
    car_eval: int = 500
    car_warmup: int | None = None
    nn_hidden: int = 16
    nn_epochs: int = 20
    nn_lr: float = 0.5
    hmm_smoothing: float = 1.0
    importance_ip: tuple[int, int] = ImportanceDraw().ip
    importance_np: tuple[int, int] = ImportanceDraw().np
    base_ip_prob: float = 0.7
    external_factor: float = 0.8
    adjustment_factor: float = 0.0
    importance_threshold: int = 5
    adjusted_answer_radius: int = 1
    cross_domain: str = "fallback"

    def validate(self) -> None:
        if self.dataset not in ("car", "poker"):
            raise UsageError(f"dataset must be car or poker, got {self.dataset!r}")
        for m in self.methods:
            if m not in {x.value for x in Method}:
                raise UsageError(f"unknown method {m!r}")
        for m in self.modes:
            if m not in {x.value for x in Mode}:
                raise UsageError(f"unknown mode {m!r}")
        if self.format not in ("csv", "table"):
            raise UsageError(f"format must be csv or table, got {self.format!r}")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        for name in ("importance_ip", "importance_np"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi <= 10:
                raise UsageError(f"{name} must be an inclusive range inside 1..10")
        try:
            self.experiment()
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(
            methods=tuple(Method(m) for m in self.methods),
            modes=tuple(Mode(m) for m in self.modes),
            cycles=self.cycles,
            seed=self.seed,
            inject_fraction=self.inject_fraction,
            equal_split=self.equal_split,
            poker_eval=self.poker_eval,
            poker_warmup=self.poker_warmup,
            car_eval=self.car_eval,
            car_warmup=self.car_warmup,
            nn_hidden=self.nn_hidden,
            nn_epochs=self.nn_epochs,
            nn_lr=self.nn_lr,
            hmm_smoothing=self.hmm_smoothing,
            importance=ImportanceDraw(tuple(self.importance_ip), tuple(self.importance_np)),
            intuition=IntuitionConfig(
                base_ip_prob=self.base_ip_prob,
                external_factor=self.external_factor,
                adjustment_factor=self.adjustment_factor,
                importance_threshold=self.importance_threshold,
                adjusted_answer_radius=self.adjusted_answer_radius,
                cross_domain=self.cross_domain,
                seed=self.seed,
            ),
            literal_error=self.literal_error,
            timing=self.timing,
            workers=self.workers,
        )


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(name: str, value: Any) -> Any:
    """Convert a config/env/flag value to the type of RunConfig field ``name``."""
    kind = _FIELDS[name].type
    if isinstance(value, str):
        text = value.strip()
        if kind.startswith("tuple"):
            value = [v.strip() for v in text.split(",") if v.strip()]
        elif kind == "bool":
            low = text.lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise UsageError(f"{name}: expected a boolean, got {value!r}")
            return low in ("1", "true", "yes", "on")
        elif text.lower() in ("none", "null", "") and "None" in kind:
            return None
        else:
            value = yaml.safe_load(text) if kind != "str" and kind != "str | None" else text
    try:
        if kind.startswith("tuple[int"):
            out = tuple(int(v) for v in value)
            if len(out) != 2:
                raise UsageError(f"{name}: expected two integers")
            return out
        if name == "methods":
            return _expand_choice([str(v) for v in value], tuple(m.value for m in Method), "all")
        if name == "modes":
            return _expand_choice([str(v) for v in value], tuple(m.value for m in Mode), "both")
        if kind.startswith("tuple"):
            return tuple(str(v) for v in value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise UsageError(f"{name}: expected a boolean, got {value!r}")
            return value
        if value is None and "None" in kind:
            return None
        if kind.startswith("int"):
            if isinstance(value, bool) or int(value) != value:
                raise UsageError(f"{name}: expected an integer, got {value!r}")
            return int(value)
        if kind == "float":
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name}: cannot use {value!r}") from None


def _apply(cfg: RunConfig, values: dict[str, Any], source: str) -> RunConfig:
    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise UsageError(f"unknown {source} key(s): {', '.join(unknown)}")
    return dataclasses.replace(cfg, **{k: _coerce(k, v) for k, v in values.items()})


def load_config_file(path: str) -> dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(p.read_text()) or {}
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a mapping at the top level")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def env_overrides(environ=os.environ) -> dict[str, Any]:
    return {k[len(ENV_PREFIX):].lower(): v for k, v in environ.items() if k.startswith(ENV_PREFIX)}


def _expand_choice(values: list[str] | None, everything: tuple[str, ...], alias: str) -> tuple[str, ...] | None:
    if values is None:
        return None
    out: list[str] = []
    for v in values:
        for part in v.split(","):
            part = part.strip()
            if part == alias:
                out.extend(everything)
            elif part:
                out.append(part)
    return tuple(dict.fromkeys(out))


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = _apply(cfg, load_config_file(args.config), "config")
    cfg = _apply(cfg, env_overrides(environ), "environment")
    flags = {
        "dataset": args.dataset,
        "data": args.data,
        "methods": _expand_choice(args.methods, tuple(m.value for m in Method), "all"),
        "modes": _expand_choice(args.modes, tuple(m.value for m in Mode), "both"),
        "cycles": args.cycles,
        "seed": args.seed,
        "inject_fraction": args.inject_fraction,
        "format": args.format,
        "out": args.out,
        "workers": args.workers,
        "timing": False if args.no_timing else None,
        "literal_error": True if args.literal_error else None,
        "strict": False if args.lenient else None,
    }
    cfg = dataclasses.replace(cfg, **{k: v for k, v in flags.items() if v is not None})
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# commands


def _read_dataset(path: str, dataset: str | None, strict: bool):
    if not Path(path).is_file():
        raise FileNotFoundError(path)
    kind = dataset or detect_dataset(path)
    reader = read_car if kind == "car" else read_poker
    records, errors = reader(path, strict)
    return kind, records, errors


def cmd_ingest(args: argparse.Namespace) -> int:
    source = args.source
    tmp = None
    if source.startswith(("http://", "https://")):
        fd, tmp = tempfile.mkstemp(suffix=".data")
        os.close(fd)
        log.info("fetching %s", source)
        with urllib.request.urlopen(source, timeout=60) as resp, open(tmp, "wb") as fh:
            shutil.copyfileobj(resp, fh)
        source = tmp
    try:
        kind, records, errors = _read_dataset(source, args.dataset, not args.lenient)
    finally:
        if tmp:
            os.unlink(tmp)
    if not records:
        raise DataError("no valid records")
    dest = Path(args.dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    write_records(records, dest)
    print(f"ok {kind} {len(records)} records -> {dest}" + (f" ({len(errors)} skipped)" if errors else ""))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    dest = Path(args.dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    if args.dataset == "car":
        n = synth.write_car_data(dest)
    else:
        n = synth.write_poker_data(dest, args.rows, args.seed)
    print(f"ok {args.dataset} {n} synthetic records -> {dest}")
    return EXIT_OK


def _records_for(cfg: RunConfig):
    if cfg.data is None:
        log.warning("no --data given, using the built-in synthetic %s stand-in", cfg.dataset)
        return synth.car_rows() if cfg.dataset == "car" else synth.poker_rows(25010, 0)
    _, records, _ = _read_dataset(cfg.data, cfg.dataset, cfg.strict)
    return records


def run(cfg: RunConfig) -> tuple[list[CycleReport], str]:
    """Run the configured experiment and render it; raises on a 0% cell under injection."""
    records = _records_for(cfg)
    reports = run_experiment(cfg.dataset, records, cfg.experiment())
    zero = check_never_zero(reports, cfg.inject_fraction)
    text = emit_table(reports, cfg.format, cfg.timing)
    if zero:
        raise RuntimeError(f"0% error cell(s) despite injected unknown entities: {zero}")
    return reports, text


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    _, text = run(cfg)
    _write(text, cfg.out)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    path = Path(args.reports)
    if not path.is_file():
        raise FileNotFoundError(args.reports)
    with path.open() as fh:
        try:
            rows = read_csv(fh)
        except (ValueError, KeyError) as exc:
            raise DataError(f"{path}: {exc}") from None
    _write(emit_table(rows, args.format), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="intuition-bench", description="Intuition model vs NN/HMM incremental-reveal benchmark")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ing = sub.add_parser("ingest", help="validate a car.data / poker-hand file and write a normalized copy")
    ing.add_argument("source", help="local path or http(s) URL")
    ing.add_argument("dest")
    ing.add_argument("--dataset", choices=("car", "poker"), help="default: detect from the field count")
    ing.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    ing.set_defaults(func=cmd_ingest)

    syn = sub.add_parser("synth", help="write a synthetic stand-in dataset")
    syn.add_argument("dataset", choices=("car", "poker"))
    syn.add_argument("dest")
    syn.add_argument("--rows", type=int, default=25010, help="poker only")
    syn.add_argument("--seed", type=int, default=0)
    syn.set_defaults(func=cmd_synth)

    r = sub.add_parser("run", help="run the reveal protocol and emit per-cycle reports")
    r.add_argument("--config", help="YAML file with RunConfig keys")
    r.add_argument("--dataset", choices=("car", "poker"))
    r.add_argument("--data", help="ingested dataset file; default: synthetic stand-in")
    r.add_argument("--methods", action="append", help="nn, hmm, intuition or all (comma separated or repeated)")
    r.add_argument("--modes", action="append", help="untrained, trained or both")
    r.add_argument("--cycles", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--inject-fraction", type=float)
    r.add_argument("--format", choices=("csv", "table"))
    r.add_argument("--out")
    r.add_argument("--workers", type=int)
    r.add_argument("--no-timing", action="store_true", help="write NA for elapsed time (byte-stable output)")
    r.add_argument("--literal-error", action="store_true", help="divide mistakes by correct answers")
    r.add_argument("--lenient", action="store_true")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="re-render a stored CSV report")
    rep.add_argument("reports")
    rep.add_argument("--format", choices=("csv", "table"), default="table")
    rep.add_argument("--out")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - the exit code is the contract
        log.debug("run failed", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
