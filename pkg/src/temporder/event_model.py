"""Event temporal ordering over dependency paths.

Per token the input is [word embedding; POS embedding; timex vector]. A
shared lower biLSTM contextualizes each sentence, the tokens along each
event's dependency path feed a shared upper biLSTM, and the two final path
states are concatenated into a ReLU stack with a 4-way softmax (before /
after / vague / simultaneous).

Three timex modes: with_timex injects frozen embeddings from a fitted
TimexPairClassifier (broadcast onto the events they modify), without_timex
drops that channel, masked_timex additionally replaces timex words with UNK.
A no-lower-biLSTM baseline feeds raw token inputs straight to the upper
biLSTM, as in earlier dependency-only models.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import nn
from .documents import (
    EVENT_LABELS,
    ROOT,
    AnnotatedDocument,
    Sentence,
    TimexSpan,
    check_tree,
    is_verb,
)
from .errors import ConfigInvalid, ModeMismatch, SpanOutOfBounds
from .stats import classification_metrics
from .timex_model import TimexPairClassifier
from .validation import check_event_instances, check_random_state

logger = logging.getLogger(__name__)

MODES = ("with_timex", "without_timex", "masked_timex")

# Relations a timex may climb when looking for the verb it modifies.
BROADCAST_RELATIONS = frozenset(
    {"tmod", "nmod", "obl", "advmod", "nmod:tmod", "obl:tmod"})
BROADCAST_MAX_HOPS = 2

UNK_WORD = "<unk>"


def find_governing_verb(sentence: Sentence, span: TimexSpan) -> int | None:
    """Ascend broadcast-relation edges from the span head to a verb.

    At most two hops; every traversed edge's relation must be in the
    broadcast set. Returns the verb token index, or None.
    """
    idx = span.head_token
    for _ in range(BROADCAST_MAX_HOPS):
        if sentence.tokens[idx].deprel not in BROADCAST_RELATIONS:
            return None
        head = sentence.tokens[idx].head
        if head == ROOT:
            return None
        if is_verb(sentence.tokens[head].pos):
            return head
        idx = head
    return None


def broadcast_timex(sentence: Sentence, timex_spans,
                    timex_model: TimexPairClassifier) -> np.ndarray:
    """(T, 2H) matrix of timex vectors; zero rows everywhere except span
    tokens and each span's governing verb."""
    T = len(sentence.tokens)
    out = np.zeros((T, timex_model.embedding_dim), dtype=np.float32)
    for span in timex_spans:
        if span.end > T:
            raise SpanOutOfBounds(f"span [{span.start}, {span.end}) exceeds sentence")
        surface = " ".join(t.word for t in sentence.tokens[span.start:span.end])
        vec = timex_model.embed(surface).astype(np.float32)
        out[span.start:span.end] = vec
        verb = find_governing_verb(sentence, span)
        if verb is not None:
            out[verb] = vec
    return out


def _ancestry(sentence: Sentence, idx: int) -> list[int]:
    chain = [idx]
    while sentence.tokens[chain[-1]].head != ROOT:
        chain.append(sentence.tokens[chain[-1]].head)
    return chain


def dep_path(sentence: Sentence, event_idx: int,
             other_event_idx: int | None = None) -> list[int]:
    """Token path from the event to the pair's lowest common ancestor.

    For cross-sentence pairs pass None: the path runs to the sentence root.
    Ordered event-first, ancestor-last; the LCA/root token is included.
    """
    check_tree(sentence)
    if other_event_idx is None:
        return _ancestry(sentence, event_idx)
    other = set(_ancestry(sentence, other_event_idx))
    path = []
    node = event_idx
    while True:
        path.append(node)
        if node in other:
            return path
        node = sentence.tokens[node].head


class EventOrderingClassifier(BaseEstimator, ClassifierMixin):
    """4-way event pair ordering with optional timex-embedding injection."""

    def __init__(self, mode="with_timex", timex_model=None, word_emb_dim=100,
                 pos_emb_dim=16, lower_hidden=64, upper_hidden=64,
                 ff_dims=(128, 64), baseline_no_lower_bilstm=False,
                 epochs=10, batch_size=16, learning_rate=1e-3, beta1=0.9,
                 beta2=0.999, epsilon=1e-8, clip_norm=5.0,
                 validation_fraction=0.1, word_vectors_path=None,
                 random_state=0):
        self.mode = mode
        self.timex_model = timex_model
        self.word_emb_dim = word_emb_dim
        self.pos_emb_dim = pos_emb_dim
        self.lower_hidden = lower_hidden
        self.upper_hidden = upper_hidden
        self.ff_dims = ff_dims
        self.baseline_no_lower_bilstm = baseline_no_lower_bilstm
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.clip_norm = clip_norm
        self.validation_fraction = validation_fraction
        self.word_vectors_path = word_vectors_path
        self.random_state = random_state

    # --- setup ---

    def _resolve_timex_model(self) -> TimexPairClassifier | None:
        if self.mode not in MODES:
            raise ConfigInvalid(f"unknown mode {self.mode!r}; pick one of {MODES}")
        if self.mode != "with_timex":
            return None
        if self.timex_model is None:
            raise ModeMismatch("mode with_timex requires a fitted timex model "
                               "or a checkpoint path")
        if isinstance(self.timex_model, TimexPairClassifier):
            return self.timex_model
        return TimexPairClassifier.load(self.timex_model)

    def _build_vocabs(self, instances) -> None:
        words, tags = set(), set()
        for inst in instances:
            masked = self._masked_words(inst.doc)
            for si, sent in enumerate(inst.doc.sentences):
                words.update(masked[si])
                tags.update(t.pos for t in sent.tokens)
        words.discard(UNK_WORD)
        self.word_vocab_ = {UNK_WORD: 0}
        for w in sorted(words):
            self.word_vocab_[w] = len(self.word_vocab_)
        self.pos_vocab_ = {UNK_WORD: 0}
        for t in sorted(tags):
            self.pos_vocab_[t] = len(self.pos_vocab_)

    def _masked_words(self, doc: AnnotatedDocument) -> list[list[str]]:
        """Per-sentence word lists, with timex tokens hidden in masked mode."""
        out = [[t.word for t in sent.tokens] for sent in doc.sentences]
        if self.mode == "masked_timex":
            for span in doc.timex_spans:
                for ti in range(span.start, span.end):
                    out[span.sentence][ti] = UNK_WORD
        return out

    def _build(self, rng: np.random.Generator, dtype=np.float32) -> None:
        self.input_dim_ = self.word_emb_dim + self.pos_emb_dim
        if self.mode == "with_timex":
            self.input_dim_ += self._timex.embedding_dim
        self.word_emb_ = nn.Embedding(len(self.word_vocab_), self.word_emb_dim,
                                      rng, dtype, name="word_emb")
        self.pos_emb_ = nn.Embedding(len(self.pos_vocab_), self.pos_emb_dim,
                                     rng, dtype, name="pos_emb")
        if self.baseline_no_lower_bilstm:
            self.lower_ = None
            upper_in = self.input_dim_
        else:
            self.lower_ = nn.BiLstm(self.input_dim_, self.lower_hidden, rng,
                                    dtype, name="lower")
            upper_in = 2 * self.lower_hidden
        self.upper_ = nn.BiLstm(upper_in, self.upper_hidden, rng, dtype,
                                name="upper")
        self.ff_ = nn.FeedForward(4 * self.upper_hidden, tuple(self.ff_dims),
                                  len(EVENT_LABELS), rng, dtype, name="event_ff")
        if self.word_vectors_path is not None:
            _init_from_word_vectors(self.word_emb_, self.word_vocab_,
                                    self.word_vectors_path, self.word_emb_dim)
        self.classes_ = np.array(EVENT_LABELS)

    def parameters(self) -> list[nn.Parameter]:
        params = self.word_emb_.parameters() + self.pos_emb_.parameters()
        if self.lower_ is not None:
            params += self.lower_.parameters()
        params += self.upper_.parameters() + self.ff_.parameters()
        return params

    # --- encoding ---

    def _encode_doc(self, doc: AnnotatedDocument) -> list[dict]:
        """Per-sentence id arrays and (frozen) timex vectors."""
        masked = self._masked_words(doc)
        encoded = []
        for si, sent in enumerate(doc.sentences):
            word_ids = np.array([self.word_vocab_.get(w, 0) for w in masked[si]],
                                dtype=np.int64)
            pos_ids = np.array([self.pos_vocab_.get(t.pos, 0) for t in sent.tokens],
                               dtype=np.int64)
            vt = None
            if self.mode == "with_timex":
                vt = broadcast_timex(sent, doc.spans_in(si), self._timex)
            encoded.append({"word_ids": word_ids, "pos_ids": pos_ids, "vt": vt})
        return encoded

    def _doc_cache_entry(self, cache: dict, doc: AnnotatedDocument) -> list[dict]:
        entry = cache.get(id(doc))
        if entry is None:
            entry = self._encode_doc(doc)
            cache[id(doc)] = entry
        return entry

    @staticmethod
    def _paths(inst) -> tuple[list[int], list[int]]:
        (s1, t1), (s2, t2) = inst.e1, inst.e2
        doc = inst.doc
        if s1 == s2:
            return (dep_path(doc.sentences[s1], t1, t2),
                    dep_path(doc.sentences[s2], t2, t1))
        return (dep_path(doc.sentences[s1], t1, None),
                dep_path(doc.sentences[s2], t2, None))

    # --- forward / backward ---

    def _sentence_input(self, enc: dict) -> np.ndarray:
        parts = [self.word_emb_.forward(enc["word_ids"]),
                 self.pos_emb_.forward(enc["pos_ids"])]
        if self.mode == "with_timex":
            parts.append(enc["vt"])
        return np.concatenate(parts, axis=1)

    def _forward(self, enc_doc: list[dict], inst):
        (s1, _), (s2, _) = inst.e1, inst.e2
        path1, path2 = self._paths(inst)
        sent_ids = [s1] if s1 == s2 else [s1, s2]
        reps, lower_caches, inputs = {}, {}, {}
        for si in sent_ids:
            X = self._sentence_input(enc_doc[si])
            inputs[si] = X
            if self.lower_ is None:
                reps[si] = X
            else:
                reps[si], lower_caches[si] = self.lower_.forward(X)
        seq1 = np.ascontiguousarray(reps[s1][path1])
        seq2 = np.ascontiguousarray(reps[s2][path2])
        up1, up_cache1 = self.upper_.forward(seq1)
        up2, up_cache2 = self.upper_.forward(seq2)
        z = nn.concat([up1[-1], up2[-1]])
        logits, ff_cache = self.ff_.forward(z)
        cache = (enc_doc, inst, path1, path2, sent_ids, inputs, lower_caches,
                 up_cache1, up_cache2, len(up1), len(up2), ff_cache)
        return logits, cache

    def _backward(self, dlogits: np.ndarray, cache) -> None:
        (enc_doc, inst, path1, path2, sent_ids, inputs, lower_caches,
         up_cache1, up_cache2, len1, len2, ff_cache) = cache
        (s1, _), (s2, _) = inst.e1, inst.e2
        dz = self.ff_.backward(dlogits, ff_cache)
        k = 2 * self.upper_hidden
        dU1 = np.zeros((len1, k), dtype=dz.dtype)
        dU2 = np.zeros((len2, k), dtype=dz.dtype)
        dU1[-1] = dz[:k]
        dU2[-1] = dz[k:]
        dSeq1 = self.upper_.backward(dU1, up_cache1)
        dSeq2 = self.upper_.backward(dU2, up_cache2)
        rep_dim = (inputs[s1].shape[1] if self.lower_ is None
                   else 2 * self.lower_hidden)
        dReps = {si: np.zeros((inputs[si].shape[0], rep_dim), dtype=dz.dtype)
                 for si in sent_ids}
        np.add.at(dReps[s1], path1, dSeq1)
        np.add.at(dReps[s2], path2, dSeq2)
        w = self.word_emb_dim
        p = self.pos_emb_dim
        for si in sent_ids:
            if self.lower_ is None:
                dX = dReps[si]
            else:
                dX = self.lower_.backward(dReps[si], lower_caches[si])
            self.word_emb_.backward(dX[:, :w], enc_doc[si]["word_ids"])
            self.pos_emb_.backward(dX[:, w:w + p], enc_doc[si]["pos_ids"])
            # the timex channel is frozen: its gradient is dropped

    # --- estimator API ---

    def fit(self, X, y, dev=None):
        instances, labels = check_event_instances(X, y)
        if not instances:
            raise ConfigInvalid("training set is empty")
        if self.epochs < 1:
            raise ConfigInvalid("epochs must be >= 1")
        self._timex = self._resolve_timex_model()
        rng = check_random_state(self.random_state)
        self._build_vocabs(instances)
        self._build(rng)
        label_index = {label: i for i, label in enumerate(EVENT_LABELS)}

        if dev is not None:
            dev_instances, dev_labels = check_event_instances(*dev)
        elif self.validation_fraction > 0:
            n_dev = int(round(len(instances) * self.validation_fraction))
            order = rng.permutation(len(instances))
            dev_pick = set(order[:n_dev].tolist())
            dev_instances = [instances[i] for i in sorted(dev_pick)]
            dev_labels = [labels[i] for i in sorted(dev_pick)]
            instances = [instances[i] for i in range(len(instances))
                         if i not in dev_pick]
            labels = [lab for i, lab in enumerate(labels) if i not in dev_pick]
        else:
            dev_instances, dev_labels = [], []

        cache: dict = {}
        train_enc = [(self._doc_cache_entry(cache, inst.doc), inst,
                      label_index[label])
                     for inst, label in zip(instances, labels)]
        dev_enc = [(self._doc_cache_entry(cache, inst.doc), inst,
                    label_index[label])
                   for inst, label in zip(dev_instances, dev_labels)]

        params = self.parameters()
        optimizer = nn.Adam(params, lr=self.learning_rate, beta1=self.beta1,
                            beta2=self.beta2, eps=self.epsilon,
                            clip_norm=self.clip_norm)
        self.history_ = []
        best_acc = -1.0
        best_state = None
        n = len(train_enc)
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            total_loss = 0.0
            for start in range(0, n, self.batch_size):
                batch = order[start:start + self.batch_size]
                inv = 1.0 / len(batch)
                for idx in batch:
                    enc_doc, inst, gold = train_enc[idx]
                    logits, fw_cache = self._forward(enc_doc, inst)
                    loss, _, dlogits = nn.softmax_cross_entropy(logits, gold)
                    total_loss += loss
                    self._backward(dlogits.astype(logits.dtype) * inv, fw_cache)
                optimizer.step()
                optimizer.zero_grad()
            train_loss = total_loss / max(1, n)
            dev_acc = self._accuracy(dev_enc) if dev_enc else float("nan")
            self.history_.append({
                "epoch": epoch,
                "train_loss": train_loss,
                "dev_accuracy": dev_acc,
            })
            logger.info("event epoch %d: train_loss=%.4f dev_acc=%.4f",
                        epoch, train_loss, dev_acc)
            if dev_enc and dev_acc > best_acc:
                best_acc = dev_acc
                best_state = [p.data.copy() for p in params]
        if best_state is not None:
            for p, data in zip(params, best_state):
                p.data[...] = data
        return self

    def _accuracy(self, encoded) -> float:
        correct = 0
        for enc_doc, inst, gold in encoded:
            logits, _ = self._forward(enc_doc, inst)
            correct += int(np.argmax(logits) == gold)
        return correct / max(1, len(encoded))

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "word_vocab_")
        instances = check_event_instances(X)
        cache: dict = {}
        out = np.empty((len(instances), len(EVENT_LABELS)), dtype=np.float64)
        for i, inst in enumerate(instances):
            enc_doc = self._doc_cache_entry(cache, inst.doc)
            logits, _ = self._forward(enc_doc, inst)
            _, probs, _ = nn.softmax_cross_entropy(logits, 0)
            out[i] = probs
        return out

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=1)]

    def forward_pair(self, instance) -> np.ndarray:
        """Probability vector over (before, after, vague, simultaneous)."""
        return self.predict_proba([instance])[0]

    # --- persistence ---

    def save(self, stem) -> None:
        check_is_fitted(self, "word_vocab_")
        stem = Path(stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        tensors = {p.name: p.data for p in self.parameters()}
        sidecar_timex = None
        if self.mode == "with_timex":
            for p in self._timex.parameters():
                tensors[f"timex:{p.name}"] = p.data
            sidecar_timex = {
                "params": _jsonable(self._timex.get_params(deep=False)),
                "alphabet": "".join(sorted(self._timex.vocab_,
                                           key=self._timex.vocab_.get)),
            }
        nn.save_tensors(stem.with_suffix(".tnsr"), tensors)
        params = _jsonable(self.get_params(deep=False))
        params["timex_model"] = None
        sidecar = {
            "model": "event_ordering_classifier",
            "params": params,
            "word_vocab": sorted(self.word_vocab_, key=self.word_vocab_.get),
            "pos_vocab": sorted(self.pos_vocab_, key=self.pos_vocab_.get),
            "labels": list(EVENT_LABELS),
            "timex": sidecar_timex,
        }
        stem.with_suffix(".json").write_text(
            json.dumps(sidecar, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8")

    @classmethod
    def load(cls, stem) -> "EventOrderingClassifier":
        stem = Path(stem)
        sidecar = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
        if sidecar.get("model") != "event_ordering_classifier":
            raise ConfigInvalid(f"{stem} is not an event model checkpoint")
        params = sidecar["params"]
        params["ff_dims"] = tuple(params["ff_dims"])
        params["word_vectors_path"] = None  # already absorbed into the weights
        model = cls(**params)
        model.word_vocab_ = {w: i for i, w in enumerate(sidecar["word_vocab"])}
        model.pos_vocab_ = {t: i for i, t in enumerate(sidecar["pos_vocab"])}
        if model.mode == "with_timex":
            tm_info = sidecar["timex"]
            tm_params = tm_info["params"]
            tm_params["ff_dims"] = tuple(tm_params["ff_dims"])
            timex = TimexPairClassifier(**tm_params)
            timex._build(np.random.default_rng(0))
            model._timex = timex
        else:
            model._timex = None
        model._build(np.random.default_rng(0))
        expected = {p.name: p.data.shape for p in model.parameters()}
        if model.mode == "with_timex":
            expected.update({f"timex:{p.name}": p.data.shape
                             for p in model._timex.parameters()})
        tensors = nn.load_tensors(stem.with_suffix(".tnsr"), expected)
        for p in model.parameters():
            p.data[...] = tensors[p.name]
        if model.mode == "with_timex":
            for p in model._timex.parameters():
                p.data[...] = tensors[f"timex:{p.name}"]
        return model


def _init_from_word_vectors(emb: nn.Embedding, vocab: dict[str, int],
                            path, dim: int) -> None:
    """Optional plain-text word-vector file: "token v1 v2 ..." per line."""
    found = 0
    with Path(path).open("r", encoding="utf-8") as fh:
        for raw in fh:
            parts = raw.rstrip("\n").split(" ")
            if len(parts) < 2:
                continue
            token = parts[0]
            if token not in vocab:
                continue
            values = np.array([float(v) for v in parts[1:]], dtype=np.float32)
            if values.shape[0] != dim:
                raise ConfigInvalid(
                    f"word vector for {token!r} has dim {values.shape[0]}, "
                    f"expected {dim}")
            emb.table.data[vocab[token]] = values
            found += 1
    logger.info("initialized %d/%d word embeddings from %s", found, len(vocab), path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def evaluate_events(model: EventOrderingClassifier, X, y) -> dict:
    """Accuracy, per-class F1, and confusion matrix on event pairs."""
    pred = model.predict(X)
    return classification_metrics(y, pred, EVENT_LABELS)
