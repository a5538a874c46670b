"""Rule-based distant supervision over parsed documents.

Verbs are anchored to the timexes that modify them (same dependency rules
the event model uses for broadcasting); anchored timexes are compared on
the day-scale timeline; comparable anchor pairs become labeled event pairs.
Only strict before/after pairs are emitted.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

from .documents import (
    AnnotatedDocument,
    EventPairExample,
    TimexSpan,
    is_verb,
    span_surface,
)
from .event_model import find_governing_verb
from .normalize import (
    DEFAULT_ANCHOR,
    ReferenceAnchor,
    TimeInterval,
    compare,
    parse_timex,
)

logger = logging.getLogger(__name__)

IS_INCLUDED = "is_included"


@dataclass(frozen=True)
class EventAnchor:
    event: tuple[int, int]      # (sentence, verb token)
    interval: TimeInterval
    rule_id: str
    relation: str = IS_INCLUDED


def anchor_events(doc: AnnotatedDocument,
                  anchor: ReferenceAnchor = DEFAULT_ANCHOR) -> list[EventAnchor]:
    """One anchor per (verb, timex) pair linked by the broadcast rules."""
    anchors = []
    for span in doc.timex_spans:
        sentence = doc.sentences[span.sentence]
        verb = find_governing_verb(sentence, span)
        if verb is None or not is_verb(sentence.tokens[verb].pos):
            continue
        interval = parse_timex(span_surface(doc, span), anchor)
        hops = _hops_to(sentence, span, verb)
        anchors.append(EventAnchor(
            event=(span.sentence, verb),
            interval=interval,
            rule_id=f"{sentence.tokens[span.head_token].deprel}-{hops}hop",
        ))
    return anchors


def _hops_to(sentence, span: TimexSpan, verb: int) -> int:
    return 1 if sentence.tokens[span.head_token].head == verb else 2


def timex_timex(a: TimexSpan, b: TimexSpan, doc: AnnotatedDocument,
                anchor: ReferenceAnchor = DEFAULT_ANCHOR) -> str:
    """Temporal relation between two timex spans of one document."""
    ia = parse_timex(span_surface(doc, a), anchor)
    ib = parse_timex(span_surface(doc, b), anchor)
    return compare(ia, ib)


def compose(anchors: list[EventAnchor]) -> list[EventPairExample]:
    """Pair up anchors in the same or adjacent sentences.

    Emits (e1, e2, before|after) in anchor order; simultaneous and
    ambiguous comparisons are dropped, duplicates on (e1, e2) kept first.
    """
    pairs = []
    seen = set()
    for i, first in enumerate(anchors):
        for second in anchors[i + 1:]:
            if first.event == second.event:
                continue
            if abs(first.event[0] - second.event[0]) > 1:
                continue
            label = compare(first.interval, second.interval)
            if label not in ("before", "after"):
                continue
            key = (first.event, second.event)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(EventPairExample(first.event, second.event, label))
    return pairs


def label_document(doc: AnnotatedDocument,
                   anchor: ReferenceAnchor = DEFAULT_ANCHOR
                   ) -> list[EventPairExample]:
    return compose(anchor_events(doc, anchor))


def build_distant_dataset(docs, anchor: ReferenceAnchor = DEFAULT_ANCHOR,
                          ) -> tuple[list[tuple[str, EventPairExample]], dict]:
    """Label a corpus; returns (doc_id, pair) rows plus yield statistics."""
    rows = []
    label_counter: Counter = Counter()
    docs = list(docs)
    for doc in docs:
        for pair in label_document(doc, anchor):
            rows.append((doc.doc_id, pair))
            label_counter[pair.label] += 1
    stats = {
        "documents": len(docs),
        "pairs": len(rows),
        "pairs_per_document": len(rows) / len(docs) if docs else 0.0,
        "label_counts": dict(sorted(label_counter.items())),
    }
    logger.info("distant labeling: %s", stats)
    return rows, stats
