"""Labeled dataset builders: timex pairs and a synthetic event corpus.

The event corpus stands in for distantly-supervised news data: every
document holds two past-tense event verbs, each governed by an explicit
timex through a "tmod" dependency, and the pair label is fully determined
by comparing the two timex intervals. Lexical content is drawn
independently of the label, so nothing but the timexes is predictive.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import corpus_io
from .documents import (
    AnnotatedDocument,
    AnnotatedToken,
    EventPairExample,
    Sentence,
    TimexSpan,
)
from .errors import ConfigInvalid
from .grammar import (
    EXPLICIT_DATETIME,
    TimexPairExample,
    sample_pair,
    sample_timex,
)
from .normalize import DEFAULT_ANCHOR, ReferenceAnchor, compare

logger = logging.getLogger(__name__)

SUBJECTS = ("Riyadh", "Sudan", "Israel", "Turkey", "Singapore", "Ankara",
            "Khartoum", "Damascus")
VERBS = ("suspended", "restored", "launched", "banned", "approved", "resumed")
OBJECTS = ("aid", "talks", "trade", "sanctions", "flights", "funding")


def generate_timex_pairs(n: int, seed: int, explicit_fraction: float = 0.75,
                         anchor: ReferenceAnchor = DEFAULT_ANCHOR
                         ) -> list[TimexPairExample]:
    """n labeled pairs from a fresh generator; logs the class balance."""
    if n < 1:
        raise ConfigInvalid(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pairs = [sample_pair(rng, explicit_fraction, anchor) for _ in range(n)]
    counts = label_counts(pairs)
    logger.info("generated %d timex pairs (seed=%d): %s", n, seed, dict(counts))
    return pairs


def label_counts(examples) -> Counter:
    return Counter(ex.label for ex in examples)


@dataclass(frozen=True)
class SyntheticEventCorpusConfig:
    n_examples: int
    subjects: tuple[str, ...] = SUBJECTS
    verbs: tuple[str, ...] = VERBS
    objects: tuple[str, ...] = OBJECTS
    intra_sentence_fraction: float = 0.5
    timex_fraction_determining: float = 1.0
    seed: int = 0
    anchor: ReferenceAnchor = field(default=DEFAULT_ANCHOR)

    def validate(self) -> None:
        if self.n_examples < 1:
            raise ConfigInvalid("n_examples must be >= 1")
        if not (self.subjects and self.verbs and self.objects):
            raise ConfigInvalid("word lists must be nonempty")
        if not 0.0 <= self.intra_sentence_fraction <= 1.0:
            raise ConfigInvalid("intra_sentence_fraction outside [0, 1]")
        if self.timex_fraction_determining != 1.0:
            raise ConfigInvalid(
                "labels are timex-determined by construction; "
                "timex_fraction_determining must stay 1.0")


def _pick(rng: np.random.Generator, items):
    return items[int(rng.integers(len(items)))]


def _timex_pos(word: str) -> str:
    return "CD" if any(ch.isdigit() for ch in word) else "NNP"


class _SentenceBuilder:
    def __init__(self):
        self.tokens: list[AnnotatedToken] = []

    def add(self, word: str, pos: str, head: int, deprel: str) -> int:
        self.tokens.append(AnnotatedToken(word, pos, head, deprel))
        return len(self.tokens) - 1

    def reserve(self, count: int) -> int:
        """Index the next token will get, peeking `count` tokens ahead."""
        return len(self.tokens) + count


def _append_clause(b: _SentenceBuilder, rng, cfg, timex_surface: str,
                   verb_head: int, verb_deprel: str):
    """Adds "<verb> [the] <obj> in <timex tokens>"; returns (verb_idx, span)."""
    verb_idx = b.add(_pick(rng, cfg.verbs), "VBD", verb_head, verb_deprel)
    if rng.random() < 0.5:
        det_idx = b.reserve(0)
        obj_idx = det_idx + 1
        b.add("the", "DT", obj_idx, "det")
        b.add(_pick(rng, cfg.objects), "NN", verb_idx, "dobj")
    else:
        b.add(_pick(rng, cfg.objects), "NN", verb_idx, "dobj")
    timex_words = timex_surface.split(" ")
    span_start = b.reserve(1)   # after the "in" token
    span_end = span_start + len(timex_words)
    span_head = span_end - 1
    b.add("in", "IN", span_head, "case")
    for k, word in enumerate(timex_words):
        idx = span_start + k
        if idx == span_head:
            b.add(word, _timex_pos(word), verb_idx, "tmod")
        else:
            b.add(word, _timex_pos(word), span_head, "compound")
    return verb_idx, (span_start, span_end, span_head)


def _sample_event_timexes(rng, cfg):
    """Two explicit timexes whose comparison is strictly before/after."""
    while True:
        t1 = sample_timex(rng, EXPLICIT_DATETIME, cfg.anchor)
        t2 = sample_timex(rng, EXPLICIT_DATETIME, cfg.anchor)
        label = compare(t1.interval, t2.interval)
        if label in ("before", "after"):
            return t1, t2, label


def _build_intra(doc_id: str, rng, cfg) -> AnnotatedDocument:
    t1, t2, label = _sample_event_timexes(rng, cfg)
    b = _SentenceBuilder()
    subj_idx = b.add(_pick(rng, cfg.subjects), "NNP", 1, "nsubj")
    v1, (s1, e1, h1) = _append_clause(b, rng, cfg, t1.surface, -1, "root")
    assert v1 == subj_idx + 1
    but_idx = b.reserve(0)
    b.add("but", "CC", but_idx + 1, "cc")
    v2, (s2, e2, h2) = _append_clause(b, rng, cfg, t2.surface, v1, "conj")
    b.add(".", ".", v1, "punct")
    sent = Sentence(tuple(b.tokens))
    return AnnotatedDocument(
        doc_id=doc_id,
        sentences=(sent,),
        timex_spans=(TimexSpan(0, s1, e1, h1), TimexSpan(0, s2, e2, h2)),
        events=((0, v1), (0, v2)),
        pairs=(EventPairExample((0, v1), (0, v2), label),),
    )


def _build_inter(doc_id: str, rng, cfg) -> AnnotatedDocument:
    t1, t2, label = _sample_event_timexes(rng, cfg)
    sentences = []
    spans = []
    events = []
    for si, surface in enumerate((t1.surface, t2.surface)):
        b = _SentenceBuilder()
        b.add(_pick(rng, cfg.subjects), "NNP", 1, "nsubj")
        verb, (s, e, h) = _append_clause(b, rng, cfg, surface, -1, "root")
        b.add(".", ".", verb, "punct")
        sentences.append(Sentence(tuple(b.tokens)))
        spans.append(TimexSpan(si, s, e, h))
        events.append((si, verb))
    return AnnotatedDocument(
        doc_id=doc_id,
        sentences=tuple(sentences),
        timex_spans=tuple(spans),
        events=tuple(events),
        pairs=(EventPairExample(events[0], events[1], label),),
    )


def generate_event_corpus(config: SyntheticEventCorpusConfig
                          ) -> list[AnnotatedDocument]:
    """One document per example, each carrying one gold before/after pair."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    docs = []
    for i in range(config.n_examples):
        doc_id = f"synth-{i:06d}"
        if rng.random() < config.intra_sentence_fraction:
            docs.append(_build_intra(doc_id, rng, config))
        else:
            docs.append(_build_inter(doc_id, rng, config))
    counts = Counter(p.label for d in docs for p in d.pairs)
    logger.info("generated %d event documents (seed=%d): %s",
                len(docs), config.seed, dict(counts))
    return docs


def split_and_write(examples, path, fmt: str = "auto", force: bool = False) -> None:
    """Write a generated dataset as JSONL; refuses to overwrite without force."""
    if fmt == "auto":
        first = examples[0] if examples else None
        if isinstance(first, TimexPairExample):
            fmt = "timex-pairs"
        elif isinstance(first, AnnotatedDocument):
            fmt = "documents"
        else:
            raise ConfigInvalid(f"cannot infer format from {type(first).__name__}")
    if fmt == "timex-pairs":
        corpus_io.write_timex_pairs(path, examples, force=force)
    elif fmt == "documents":
        corpus_io.write_documents(path, examples, force=force)
    else:
        raise ConfigInvalid(f"unknown format {fmt!r}")


def corpus_to_instances(docs):
    """Flatten documents into aligned (PairInstance, label) model inputs."""
    from .documents import PairInstance

    instances, labels = [], []
    for doc in docs:
        for pair in doc.pairs:
            instances.append(PairInstance(doc, pair.e1, pair.e2))
            labels.append(pair.label)
    return instances, labels
