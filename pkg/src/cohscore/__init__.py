"""Essay coherence scoring pipeline.

Two feature extractors feed a small regression model: a local coherence
signal over windows of consecutive sentences, and six punctuation error
counts from diffing the author's marks against a restoration reference.
The scorer of choice is gradient-boosted regression trees with monotone
constraints on every feature.
"""

from .corpus import Essay, PunctLabelSeq, SlotLabel, derive_labels, normalize_punct, split_sentences
from .punct import PunctErrorCounts, align_and_count, count_essay
from .sampling import LabeledSample, Window, coh_ratio, gen_dataset, make_windows
from .scorer import CoherenceLevel, FEATURE_NAMES, MONOTONE_CONSTRAINTS, assemble_features, evaluate, score_to_level

__all__ = [
    "Essay",
    "PunctLabelSeq",
    "SlotLabel",
    "derive_labels",
    "normalize_punct",
    "split_sentences",
    "PunctErrorCounts",
    "align_and_count",
    "count_essay",
    "LabeledSample",
    "Window",
    "coh_ratio",
    "gen_dataset",
    "make_windows",
    "CoherenceLevel",
    "FEATURE_NAMES",
    "MONOTONE_CONSTRAINTS",
    "assemble_features",
    "evaluate",
    "score_to_level",
]

__version__ = "0.1.0"
