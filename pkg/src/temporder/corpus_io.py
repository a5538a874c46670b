"""JSONL serialization for datasets, documents, event pairs, and predictions.

One JSON object per line, UTF-8, stable key order, head indices 0-based with
-1 for the sentence root. Readers validate eagerly and report the offending
line (and field where known).
"""

from __future__ import annotations

import json
from pathlib import Path

from .documents import (
    AnnotatedDocument,
    AnnotatedToken,
    EventPairExample,
    Sentence,
    TimexSpan,
    check_document,
)
from .errors import (
    MalformedTree,
    ParseError,
    SchemaViolation,
    SpanOutOfBounds,
)
from .grammar import TimexPairExample, TimexSample
from .normalize import TimeInterval
from .nn.checkpoint import load_tensors, save_tensors  # noqa: F401  (re-export)

GRANULARITIES = ("day", "month", "year", "point", "span")


def _open_for_write(path, force: bool):
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass force=True to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", encoding="utf-8")


def _write_lines(path, records, force: bool) -> None:
    with _open_for_write(path, force) as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def _iter_lines(path):
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(str(exc), line=lineno) from exc
            if not isinstance(record, dict):
                raise SchemaViolation("record is not a JSON object", line=lineno)
            yield lineno, record


def _require(record: dict, field: str, kind, lineno: int):
    if field not in record:
        raise SchemaViolation("missing field", field=field, line=lineno)
    value = record[field]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaViolation("expected a number", field=field, line=lineno)
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaViolation("expected an integer", field=field, line=lineno)
        return value
    if not isinstance(value, kind):
        raise SchemaViolation(f"expected {kind.__name__}", field=field, line=lineno)
    return value


# --- timex pairs ---

def _sample_to_dict(sample: TimexSample) -> dict:
    return {
        "surface": sample.surface,
        "template_id": sample.template_id,
        "slots": dict(sample.slots),
        "interval": {
            "start_day": sample.interval.start_day,
            "end_day": sample.interval.end_day,
            "granularity": sample.interval.granularity,
        },
    }


def _sample_from_dict(obj: dict, lineno: int) -> TimexSample:
    surface = _require(obj, "surface", str, lineno)
    template_id = _require(obj, "template_id", str, lineno)
    slots = _require(obj, "slots", dict, lineno)
    interval = _require(obj, "interval", dict, lineno)
    start = _require(interval, "start_day", int, lineno)
    end = _require(interval, "end_day", int, lineno)
    gran = _require(interval, "granularity", str, lineno)
    if gran not in GRANULARITIES:
        raise SchemaViolation(f"unknown granularity {gran!r}",
                              field="granularity", line=lineno)
    try:
        ti = TimeInterval(start, end, gran)
    except ValueError as exc:
        raise SchemaViolation(str(exc), field="interval", line=lineno) from exc
    return TimexSample(surface, template_id, slots, ti)


def write_timex_pairs(path, pairs, force: bool = False) -> None:
    _write_lines(path, (
        {"t1": _sample_to_dict(p.t1), "t2": _sample_to_dict(p.t2), "label": p.label}
        for p in pairs
    ), force)


def read_timex_pairs(path) -> list[TimexPairExample]:
    out = []
    for lineno, record in _iter_lines(path):
        t1 = _sample_from_dict(_require(record, "t1", dict, lineno), lineno)
        t2 = _sample_from_dict(_require(record, "t2", dict, lineno), lineno)
        label = _require(record, "label", str, lineno)
        if label not in ("before", "after", "simultaneous"):
            raise SchemaViolation(f"bad label {label!r}", field="label", line=lineno)
        out.append(TimexPairExample(t1, t2, label))
    return out


# --- documents ---

def document_to_dict(doc: AnnotatedDocument) -> dict:
    sentences = []
    for si, sent in enumerate(doc.sentences):
        sentences.append({
            "tokens": [
                {"word": t.word, "pos": t.pos, "head": t.head, "deprel": t.deprel}
                for t in sent.tokens
            ],
            "timex_spans": [
                {"start": s.start, "end": s.end, "head": s.head_token}
                for s in doc.timex_spans if s.sentence == si
            ],
            "events": [ti for sj, ti in doc.events if sj == si],
        })
    return {
        "doc_id": doc.doc_id,
        "sentences": sentences,
        "pairs": [
            {"e1": list(p.e1), "e2": list(p.e2), "label": p.label}
            for p in doc.pairs
        ],
    }


def document_from_dict(record: dict, lineno: int = 0) -> AnnotatedDocument:
    doc_id = _require(record, "doc_id", str, lineno)
    sentences = []
    spans = []
    events = []
    for si, sent_obj in enumerate(_require(record, "sentences", list, lineno)):
        if not isinstance(sent_obj, dict):
            raise SchemaViolation("sentence is not an object",
                                  field="sentences", line=lineno)
        tokens = []
        for tok in _require(sent_obj, "tokens", list, lineno):
            if not isinstance(tok, dict):
                raise SchemaViolation("token is not an object",
                                      field="tokens", line=lineno)
            tokens.append(AnnotatedToken(
                word=_require(tok, "word", str, lineno),
                pos=_require(tok, "pos", str, lineno),
                head=_require(tok, "head", int, lineno),
                deprel=_require(tok, "deprel", str, lineno),
            ))
        sentences.append(Sentence(tuple(tokens)))
        for span_obj in sent_obj.get("timex_spans", []):
            try:
                spans.append(TimexSpan(
                    sentence=si,
                    start=_require(span_obj, "start", int, lineno),
                    end=_require(span_obj, "end", int, lineno),
                    head_token=_require(span_obj, "head", int, lineno),
                ))
            except SpanOutOfBounds as exc:
                raise SchemaViolation(str(exc), field="timex_spans",
                                      line=lineno) from exc
        for ti in sent_obj.get("events", []):
            if not isinstance(ti, int):
                raise SchemaViolation("event index is not an integer",
                                      field="events", line=lineno)
            events.append((si, ti))
    pairs = []
    for pair_obj in record.get("pairs", []):
        e1 = _require(pair_obj, "e1", list, lineno)
        e2 = _require(pair_obj, "e2", list, lineno)
        label = _require(pair_obj, "label", str, lineno)
        for e in (e1, e2):
            if len(e) != 2 or not all(isinstance(v, int) for v in e):
                raise SchemaViolation("event ref must be [sentence, token]",
                                      field="pairs", line=lineno)
        pairs.append(EventPairExample((e1[0], e1[1]), (e2[0], e2[1]), label))
    doc = AnnotatedDocument(doc_id, tuple(sentences), tuple(spans),
                            tuple(events), tuple(pairs))
    try:
        check_document(doc)
    except (MalformedTree, SpanOutOfBounds) as exc:
        raise SchemaViolation(str(exc), line=lineno) from exc
    return doc


def write_documents(path, docs, force: bool = False) -> None:
    _write_lines(path, (document_to_dict(d) for d in docs), force)


def read_documents(path) -> list[AnnotatedDocument]:
    return [document_from_dict(record, lineno) for lineno, record in _iter_lines(path)]


# --- standalone event pairs (distant-labeler output) ---

def write_event_pairs(path, rows, force: bool = False) -> None:
    """rows: iterable of (doc_id, EventPairExample)."""
    _write_lines(path, (
        {"doc_id": doc_id, "e1": list(p.e1), "e2": list(p.e2), "label": p.label}
        for doc_id, p in rows
    ), force)


def read_event_pairs(path) -> list[tuple[str, EventPairExample]]:
    out = []
    for lineno, record in _iter_lines(path):
        doc_id = _require(record, "doc_id", str, lineno)
        e1 = _require(record, "e1", list, lineno)
        e2 = _require(record, "e2", list, lineno)
        label = _require(record, "label", str, lineno)
        out.append((doc_id, EventPairExample(tuple(e1), tuple(e2), label)))
    return out


# --- predictions ---

def write_predictions(path, rows, force: bool = False) -> None:
    """rows: iterable of dicts with pair_id, gold, pred, probs."""
    def encode(row):
        return {
            "pair_id": row["pair_id"],
            "gold": row["gold"],
            "pred": row["pred"],
            "probs": [float(p) for p in row["probs"]],
        }
    _write_lines(path, (encode(r) for r in rows), force)


def read_predictions(path) -> list[dict]:
    out = []
    for lineno, record in _iter_lines(path):
        probs = _require(record, "probs", list, lineno)
        if not all(isinstance(p, (int, float)) and not isinstance(p, bool)
                   for p in probs):
            raise SchemaViolation("probs must be numbers", field="probs", line=lineno)
        out.append({
            "pair_id": _require(record, "pair_id", str, lineno),
            "gold": _require(record, "gold", str, lineno),
            "pred": _require(record, "pred", str, lineno),
            "probs": [float(p) for p in probs],
        })
    return out
