"""Logic-based comparators: a small feedforward network and a class-aligned HMM."""

from .encoding import EncodedRecord, encode_sequences, encode_step, tokens
from .hmm import HmmModel, blank_hmm, fit_hmm, forward, predict_hmm, train_hmm
from .naive_poker import naive_class_counts, naive_poker_probability
from .nn import NnModel, init_nn, loss_and_grads, predict_nn, train_nn

__all__ = [
    "EncodedRecord",
    "HmmModel",
    "NnModel",
    "blank_hmm",
    "encode_sequences",
    "encode_step",
    "fit_hmm",
    "forward",
    "init_nn",
    "loss_and_grads",
    "naive_class_counts",
    "naive_poker_probability",
    "predict_hmm",
    "predict_nn",
    "tokens",
    "train_hmm",
    "train_nn",
]
