"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np

from .documents import EVENT_LABELS, TIMEX_LABELS, PairInstance, check_document
from .errors import ConfigInvalid, EmptyString, LengthMismatch


def check_random_state(seed) -> np.random.Generator:
    """Accepts None, an int seed, or an existing Generator."""
    if seed is None:
        seed = 0
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_surface(surface: str) -> str:
    if not isinstance(surface, str) or surface == "":
        raise EmptyString("timex surface must be a nonempty string")
    return surface


def check_timex_pairs(X, y=None):
    """X: sequence of (t1, t2) surface pairs; y: aligned timex labels."""
    pairs = []
    for row in X:
        t1, t2 = row
        pairs.append((check_surface(t1), check_surface(t2)))
    if y is None:
        return pairs
    labels = list(y)
    if len(labels) != len(pairs):
        raise LengthMismatch(f"{len(pairs)} pairs but {len(labels)} labels")
    for label in labels:
        if label not in TIMEX_LABELS:
            raise ConfigInvalid(f"unknown timex label {label!r}")
    return pairs, labels


def check_event_instances(X, y=None, validate_docs: bool = False):
    """X: sequence of PairInstance; y: aligned 4-way event labels."""
    instances = list(X)
    seen_docs = set()
    for inst in instances:
        if not isinstance(inst, PairInstance):
            raise ConfigInvalid(f"expected PairInstance, got {type(inst).__name__}")
        if validate_docs and id(inst.doc) not in seen_docs:
            check_document(inst.doc)
            seen_docs.add(id(inst.doc))
    if y is None:
        return instances
    labels = list(y)
    if len(labels) != len(instances):
        raise LengthMismatch(f"{len(instances)} instances but {len(labels)} labels")
    for label in labels:
        if label not in EVENT_LABELS:
            raise ConfigInvalid(f"unknown event label {label!r}")
    return instances, labels
