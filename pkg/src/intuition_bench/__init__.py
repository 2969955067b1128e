"""Experience-mapping intuition model, NN/HMM baselines and the reveal benchmark."""

from .core_model import (
    AnswerClass,
    ExperienceElement,
    ExperienceSet,
    IntuitionConfig,
    MappedAnswer,
    NoExperience,
    NoNormalProcess,
    Numeric,
    ProblemElement,
    Symbolic,
    classify_answer,
    intuit,
    mapping_fn,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerClass",
    "ExperienceElement",
    "ExperienceSet",
    "IntuitionConfig",
    "MappedAnswer",
    "NoExperience",
    "NoNormalProcess",
    "Numeric",
    "ProblemElement",
    "Symbolic",
    "classify_answer",
    "intuit",
    "mapping_fn",
]
