"""Temporal ordering toolkit.

Generates labeled synthetic timex pairs from a template grammar, trains a
character-level biLSTM whose pooled states serve as timex embeddings, feeds
those into a dependency-path event ordering model, and auto-labels event
pairs with rule-based distant supervision.
"""

__version__ = "0.1.0"

from .distant import EventAnchor, anchor_events, build_distant_dataset, compose
from .documents import (
    AnnotatedDocument,
    AnnotatedToken,
    EventPairExample,
    PairInstance,
    Sentence,
    TimexSpan,
)
from .datasets import (
    SyntheticEventCorpusConfig,
    corpus_to_instances,
    generate_event_corpus,
    generate_timex_pairs,
    split_and_write,
)
from .event_model import (
    EventOrderingClassifier,
    broadcast_timex,
    dep_path,
    evaluate_events,
    find_governing_verb,
)
from .grammar import (
    TimexPairExample,
    TimexSample,
    TimexTemplate,
    list_templates,
    render,
    sample_pair,
    sample_timex,
)
from .normalize import (
    DEFAULT_ANCHOR,
    ReferenceAnchor,
    TimeInterval,
    compare,
    parse_timex,
    resolve_two_digit_year,
)
from .stats import bootstrap_compare, classification_metrics
from .timex_model import (
    TimexPairClassifier,
    encode_chars,
    evaluate_timex,
    pairs_to_xy,
    swap_consistency,
)

__all__ = [
    "AnnotatedDocument", "AnnotatedToken", "DEFAULT_ANCHOR", "EventAnchor",
    "EventOrderingClassifier", "EventPairExample", "PairInstance",
    "ReferenceAnchor", "Sentence", "SyntheticEventCorpusConfig",
    "TimeInterval", "TimexPairClassifier", "TimexPairExample", "TimexSample",
    "TimexSpan", "TimexTemplate", "anchor_events", "bootstrap_compare",
    "broadcast_timex", "build_distant_dataset", "classification_metrics",
    "compare", "compose", "corpus_to_instances", "dep_path", "encode_chars",
    "evaluate_events", "evaluate_timex", "find_governing_verb",
    "generate_event_corpus", "generate_timex_pairs", "list_templates",
    "pairs_to_xy", "parse_timex", "render", "resolve_two_digit_year",
    "sample_pair", "sample_timex", "split_and_write", "swap_consistency",
]
