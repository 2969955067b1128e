"""Incremental-reveal protocols for the poker and car datasets.

One cycle:

1. shuffle the dataset with the cycle's seed (``seed + cycle``) and cut an
   evaluation slice and a disjoint warm-up slice;
2. inject unknown (and, with ``equal_split``, hidden) entities into the
   evaluation slice;
3. build each method in each mode from the warm-up slice. Untrained models
   see the clean slice only, i.e. the world is assumed fixed; trained ones
   see a copy of it with injected uncertainty events;
4. reveal every evaluation record one attribute/card at a time and let every
   (method, mode) pair predict the *final* class after each reveal.

Every cycle derives all randomness from its own seed, so cycles can run in
any order or in parallel and give the same reports.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..baselines.encoding import CAR_N_FEATURES, POKER_N_FEATURES, encode_sequences
from ..baselines.naive_poker import naive_class_counts
from ..baselines.nn import init_nn, train_nn
from ..core_model import IntuitionConfig
from ..datasets import (
    CAR_CLASSES,
    POKER_CLASSES,
    CarRecord,
    PokerRecord,
    Record,
    RevealSequence,
    car_reference,
    inject_alien_records,
    reveal_iterator,
)
from .predictors import (
    ImportanceDraw,
    Predictor,
    build_experience,
    fit_sequences_hmm,
    hmm_predictor,
    intuition_predictor,
    nn_predictor,
)
from .report import CycleReport, Method, Mode, TrialResult


@dataclass(frozen=True)
class ExperimentConfig:
    """Harness settings. Slice sizes are per cycle."""

    methods: tuple[Method, ...] = tuple(Method)
    modes: tuple[Mode, ...] = tuple(Mode)
    cycles: int = 5
    seed: int = 42
    inject_fraction: float = 1 / 3
    equal_split: bool = True
    poker_eval: int = 1000
    poker_warmup: int = 4000
    car_eval: int = 500
    # None: every row not in the evaluation slice
    car_warmup: int | None = None
    randomize_order: bool = False
    nn_hidden: int = 16
    nn_epochs: int = 20
    nn_lr: float = 0.5
    nn_batch: int = 32
    hmm_smoothing: float = 1.0
    importance: ImportanceDraw = ImportanceDraw()
    intuition: IntuitionConfig = IntuitionConfig()
    literal_error: bool = False
    timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.cycles <= 5:
            raise ValueError("cycles must be in 1..5")
        if not 0.0 <= self.inject_fraction <= 1.0:
            raise ValueError("inject_fraction must be in [0, 1]")
        if not self.methods or not self.modes:
            raise ValueError("need at least one method and one mode")


@dataclass
class CycleData:
    """Everything one cycle is built from; exposed for inspection and tests."""

    eval_sequences: list[RevealSequence]
    clean_warmup: list[RevealSequence]
    noisy_warmup: list[RevealSequence]
    predictors: dict[tuple[Method, Mode], Predictor] = field(default_factory=dict)


def _sequences(records: Sequence[Record], order_rng: random.Random | None) -> list[RevealSequence]:
    out = []
    for rec in records:
        n = len(rec.values) if isinstance(rec, CarRecord) else len(rec.cards)
        order = None
        if order_rng is not None:
            order = list(range(n))
            order_rng.shuffle(order)
        out.append(reveal_iterator(rec, order))
    return out


def _slices(records: Sequence[Record], n_eval: int, n_warm: int | None, rng: random.Random):
    idx = list(range(len(records)))
    rng.shuffle(idx)
    if n_eval >= len(idx):
        raise ValueError(f"evaluation slice of {n_eval} leaves no warm-up rows out of {len(idx)}")
    ev = [records[i] for i in idx[:n_eval]]
    rest = idx[n_eval:]
    warm = [records[i] for i in (rest if n_warm is None else rest[:n_warm])]
    return ev, warm


def prepare_cycle(dataset: str, records: Sequence[Record], cycle: int, cfg: ExperimentConfig) -> CycleData:
    seed = cfg.seed + cycle
    rng = random.Random(seed)
    if dataset == "car":
        n_eval, n_warm, labels, n_in = cfg.car_eval, cfg.car_warmup, CAR_CLASSES, CAR_N_FEATURES
        reference = car_reference(records)
    elif dataset == "poker":
        n_eval, n_warm, labels, n_in = cfg.poker_eval, cfg.poker_warmup, POKER_CLASSES, POKER_N_FEATURES
        reference = None
    else:
        raise ValueError(f"unknown dataset {dataset!r}")
    ev, warm = _slices(records, n_eval, n_warm, rng)
    ev = inject_alien_records(ev, cfg.inject_fraction, seed, cfg.equal_split, reference)
    noisy = inject_alien_records(warm, cfg.inject_fraction, seed + 7919, cfg.equal_split, reference)
    order_rng = random.Random(f"order:{seed}") if cfg.randomize_order else None
    data = CycleData(_sequences(ev, order_rng), _sequences(warm, order_rng), _sequences(noisy, order_rng))

    k = len(labels)
    for method in cfg.methods:
        for mode in cfg.modes:
            trained = mode is Mode.TRAINED
            warm_seqs = data.noisy_warmup if trained else data.clean_warmup
            if method is Method.NN:
                # the naive world: a fixed full deck for poker, a uniform prior for cars
                prior = np.array(naive_class_counts([])[0], dtype=float) if dataset == "poker" else None
                model = init_nn(n_in, k, seed, cfg.nn_hidden, prior)
                if trained:
                    model = train_nn(model, encode_sequences(warm_seqs), cfg.nn_epochs, seed, cfg.nn_lr, cfg.nn_batch)
                pred = nn_predictor(model)
            elif method is Method.HMM:
                model = fit_sequences_hmm(labels, warm_seqs, cfg.hmm_smoothing, trained)
                pred = hmm_predictor(model, retain=trained)
            else:
                eset = build_experience(warm_seqs, labels, seed * 2 + int(trained), cfg.importance)
                icfg = IntuitionConfig(**{**cfg.intuition.__dict__, "seed": seed})
                pred = intuition_predictor(eset, icfg, labels)
            data.predictors[(method, mode)] = pred
    return data


def _no_clock() -> int:
    return 0


def run_cycle(dataset: str, records: Sequence[Record], cycle: int, cfg: ExperimentConfig) -> list[CycleReport]:
    data = prepare_cycle(dataset, records, cycle, cfg)
    reports = {key: CycleReport(dataset, cycle, key[0], key[1], literal_error=cfg.literal_error, timed=cfg.timing) for key in data.predictors}
    # with timing off every elapsed is 0 and the report carries NA
    clock = time.perf_counter_ns if cfg.timing else _no_clock
    for seq in data.eval_sequences:
        for k in range(len(seq.steps)):
            if not seq.visible(k):
                continue
            for key, predict in data.predictors.items():
                t0 = clock()
                guess = predict(seq, k)
                elapsed = clock() - t0
                reports[key].trials.append(TrialResult(guess, seq.label, elapsed, seq.entity, k))
    return list(reports.values())


def _run(dataset: str, records: Sequence[Record], cfg: ExperimentConfig) -> list[CycleReport]:
    cycles = range(1, cfg.cycles + 1)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(run_cycle, dataset, records, c, cfg) for c in cycles]
            chunks = [f.result() for f in futures]
    else:
        chunks = [run_cycle(dataset, records, c, cfg) for c in cycles]
    return [r for chunk in chunks for r in chunk]


def run_poker_protocol(records: Sequence[PokerRecord], cfg: ExperimentConfig = ExperimentConfig()) -> list[CycleReport]:
    """Deal each evaluation hand card by card; after every card each method
    predicts the class the hand will have once all five cards are out."""
    return _run("poker", records, cfg)


def run_car_protocol(records: Sequence[CarRecord], cfg: ExperimentConfig = ExperimentConfig()) -> list[CycleReport]:
    """Reveal each evaluation car one attribute at a time; after each reveal
    every method predicts the car's final quality class."""
    return _run("car", records, cfg)


def run_experiment(dataset: str, records: Sequence[Record], cfg: ExperimentConfig = ExperimentConfig()) -> list[CycleReport]:
    if dataset == "poker":
        return run_poker_protocol(records, cfg)
    if dataset == "car":
        return run_car_protocol(records, cfg)
    raise ValueError(f"unknown dataset {dataset!r}")
