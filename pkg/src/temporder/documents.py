"""Annotated documents: tokens, dependency trees, timex spans, event pairs."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedTree, SpanOutOfBounds

ROOT = -1

EVENT_LABELS = ("before", "after", "vague", "simultaneous")
TIMEX_LABELS = ("before", "after", "simultaneous")


def is_verb(pos: str) -> bool:
    return pos.startswith("VB") or pos == "VERB"


@dataclass(frozen=True)
class AnnotatedToken:
    word: str
    pos: str
    head: int          # token index within the sentence, ROOT (-1) for the root
    deprel: str


@dataclass(frozen=True)
class TimexSpan:
    sentence: int
    start: int         # token range [start, end)
    end: int
    head_token: int    # index of the span's syntactic head, inside [start, end)

    def __post_init__(self):
        if self.start >= self.end:
            raise SpanOutOfBounds(f"empty span [{self.start}, {self.end})")
        if not self.start <= self.head_token < self.end:
            raise SpanOutOfBounds(f"head {self.head_token} outside span")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[AnnotatedToken, ...]

    def words(self) -> list[str]:
        return [t.word for t in self.tokens]


@dataclass(frozen=True)
class EventPairExample:
    e1: tuple[int, int]   # (sentence index, token index)
    e2: tuple[int, int]
    label: str


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    sentences: tuple[Sentence, ...]
    timex_spans: tuple[TimexSpan, ...] = ()
    events: tuple[tuple[int, int], ...] = ()
    pairs: tuple[EventPairExample, ...] = ()

    def spans_in(self, sentence_index: int) -> list[TimexSpan]:
        return [s for s in self.timex_spans if s.sentence == sentence_index]


@dataclass(frozen=True)
class PairInstance:
    """Model input: a document plus the two event positions (no label)."""

    doc: AnnotatedDocument
    e1: tuple[int, int]
    e2: tuple[int, int]


def check_tree(sentence: Sentence) -> int:
    """Validate single-rooted acyclic heads; returns the root token index."""
    n = len(sentence.tokens)
    roots = [i for i, t in enumerate(sentence.tokens) if t.head == ROOT]
    if len(roots) != 1:
        raise MalformedTree(f"expected one root, found {len(roots)}")
    for i, tok in enumerate(sentence.tokens):
        if tok.head != ROOT and not 0 <= tok.head < n:
            raise MalformedTree(f"token {i} head {tok.head} out of bounds")
        if tok.head == i:
            raise MalformedTree(f"token {i} is its own head")
    for i in range(n):
        seen = set()
        node = i
        while node != ROOT:
            if node in seen:
                raise MalformedTree(f"cycle through token {node}")
            seen.add(node)
            node = sentence.tokens[node].head
    return roots[0]


def check_document(doc: AnnotatedDocument) -> None:
    """Validate tree shape, span bounds, and event/pair index references."""
    for sent in doc.sentences:
        if sent.tokens:
            check_tree(sent)
    for span in doc.timex_spans:
        if not 0 <= span.sentence < len(doc.sentences):
            raise SpanOutOfBounds(f"span sentence {span.sentence} out of range")
        if span.end > len(doc.sentences[span.sentence].tokens):
            raise SpanOutOfBounds(f"span [{span.start}, {span.end}) exceeds sentence")
    for si, ti in doc.events:
        if not (0 <= si < len(doc.sentences)
                and 0 <= ti < len(doc.sentences[si].tokens)):
            raise SpanOutOfBounds(f"event ({si}, {ti}) out of range")
    for pair in doc.pairs:
        for si, ti in (pair.e1, pair.e2):
            if not (0 <= si < len(doc.sentences)
                    and 0 <= ti < len(doc.sentences[si].tokens)):
                raise SpanOutOfBounds(f"pair event ({si}, {ti}) out of range")
        if abs(pair.e1[0] - pair.e2[0]) > 1:
            raise SpanOutOfBounds("pair events must be in the same or adjacent sentences")


def span_surface(doc: AnnotatedDocument, span: TimexSpan) -> str:
    tokens = doc.sentences[span.sentence].tokens[span.start:span.end]
    return " ".join(t.word for t in tokens)
