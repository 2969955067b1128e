"""Plain-text model files.

Layout, one item per line::

    intuition-bench <kind> v1
    trained <0|1>
    labels <name> <n>            (HMM only: states / symbols, one per line after)
    matrix <name> <rows> <cols>
    <row 0 values, space separated, repr() floats>
    ...

Vectors are written as ``1 x n`` matrices. ``repr`` keeps every float
bit-exact on reload.
"""

from __future__ import annotations

from typing import IO

import numpy as np

from .hmm import HmmModel
from .nn import NnModel


def _write_matrix(fh: IO[str], name: str, m: np.ndarray) -> None:
    m2 = np.atleast_2d(m)
    fh.write(f"matrix {name} {m2.shape[0]} {m2.shape[1]}\n")
    for row in m2:
        fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _write_labels(fh: IO[str], name: str, labels) -> None:
    fh.write(f"labels {name} {len(labels)}\n")
    for s in labels:
        if "\n" in s:
            raise ValueError(f"label {s!r} contains a newline")
        fh.write(s + "\n")


def dump_nn(model: NnModel, fh: IO[str]) -> None:
    fh.write("intuition-bench nn v1\n")
    fh.write(f"trained {int(model.trained)}\n")
    for name, m in model.params().items():
        _write_matrix(fh, name, m)


def dump_hmm(model: HmmModel, fh: IO[str]) -> None:
    fh.write("intuition-bench hmm v1\n")
    fh.write(f"trained {int(model.trained)}\n")
    _write_labels(fh, "states", model.states)
    _write_labels(fh, "symbols", model.symbols)
    _write_matrix(fh, "initial", model.initial)
    _write_matrix(fh, "transition", model.transition)
    _write_matrix(fh, "emission", model.emission)


def _read_sections(fh: IO[str], kind: str):
    header = fh.readline().split()
    if header != ["intuition-bench", kind, "v1"]:
        raise ValueError(f"not an intuition-bench {kind} file: {header}")
    key, val = fh.readline().split()
    if key != "trained":
        raise ValueError("missing trained flag")
    matrices, labels = {}, {}
    for line in fh:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "matrix":
            name, rows, cols = parts[1], int(parts[2]), int(parts[3])
            data = [[float(v) for v in fh.readline().split()] for _ in range(rows)]
            m = np.array(data, dtype=float).reshape(rows, cols)
            matrices[name] = m
        elif parts[0] == "labels":
            name, n = parts[1], int(parts[2])
            labels[name] = tuple(fh.readline().rstrip("\n") for _ in range(n))
        else:
            raise ValueError(f"unexpected line {line!r}")
    return val == "1", matrices, labels


def load_nn(fh: IO[str]) -> NnModel:
    trained, m, _ = _read_sections(fh, "nn")
    return NnModel(m["w1"], m["b1"].ravel(), m["w2"], m["b2"].ravel(), trained)


def load_hmm(fh: IO[str]) -> HmmModel:
    trained, m, lab = _read_sections(fh, "hmm")
    return HmmModel(lab["states"], lab["symbols"], m["initial"].ravel(), m["transition"], m["emission"], trained)
