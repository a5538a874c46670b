"""Character-level biLSTM classifier over timex pairs.

Both surfaces go through one shared character biLSTM; mean-pooled outputs
are the timex embeddings, and the concatenated pair feeds a ReLU stack with
a 3-way softmax (before / after / simultaneous). The fitted embeddings are
what the event model consumes downstream.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import nn
from .documents import TIMEX_LABELS
from .errors import ConfigInvalid
from .grammar import grammar_alphabet
from .stats import classification_metrics
from .validation import check_random_state, check_surface, check_timex_pairs

logger = logging.getLogger(__name__)

UNK_CHAR_ID = 0


def build_char_vocab(alphabet: str | None = None) -> dict[str, int]:
    """Character -> id map over the grammar alphabet; id 0 is UNK."""
    if alphabet is None:
        alphabet = grammar_alphabet()
    return {ch: i + 1 for i, ch in enumerate(alphabet)}


def encode_chars(surface: str, vocab: dict[str, int]) -> np.ndarray:
    """One id per character; unknown characters map to UNK (0)."""
    check_surface(surface)
    return np.array([vocab.get(ch, UNK_CHAR_ID) for ch in surface], dtype=np.int64)


class TimexPairClassifier(BaseEstimator, ClassifierMixin):
    """Orders two time expressions from their surface strings alone."""

    def __init__(self, char_emb_dim=32, hidden_dim=64, ff_dims=(128, 64),
                 epochs=5, batch_size=16, learning_rate=1e-3, beta1=0.9,
                 beta2=0.999, epsilon=1e-8, clip_norm=5.0,
                 validation_fraction=0.1, random_state=0):
        self.char_emb_dim = char_emb_dim
        self.hidden_dim = hidden_dim
        self.ff_dims = ff_dims
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.clip_norm = clip_norm
        self.validation_fraction = validation_fraction
        self.random_state = random_state

    # --- construction ---

    def _build(self, rng: np.random.Generator, dtype=np.float32) -> None:
        self.vocab_ = build_char_vocab()
        vocab_size = len(self.vocab_) + 1
        self.emb_ = nn.Embedding(vocab_size, self.char_emb_dim, rng, dtype,
                                 name="char_emb")
        self.bilstm_ = nn.BiLstm(self.char_emb_dim, self.hidden_dim, rng, dtype,
                                 name="char_bilstm")
        self.ff_ = nn.FeedForward(4 * self.hidden_dim, tuple(self.ff_dims),
                                  len(TIMEX_LABELS), rng, dtype, name="pair_ff")
        self.classes_ = np.array(TIMEX_LABELS)

    def parameters(self) -> list[nn.Parameter]:
        return (self.emb_.parameters() + self.bilstm_.parameters()
                + self.ff_.parameters())

    @property
    def embedding_dim(self) -> int:
        return 2 * self.hidden_dim

    # --- forward / backward ---

    def _embed_ids(self, ids: np.ndarray):
        X = self.emb_.forward(ids)
        H, lstm_cache = self.bilstm_.forward(X)
        vec = nn.mean_pool(H)
        return vec, (ids, H.shape[0], lstm_cache)

    def _embed_ids_backward(self, dvec: np.ndarray, cache) -> None:
        ids, T, lstm_cache = cache
        dH = nn.mean_pool_backward(dvec, T)
        dX = self.bilstm_.backward(dH, lstm_cache)
        self.emb_.backward(dX, ids)

    def _forward_pair(self, ids1: np.ndarray, ids2: np.ndarray):
        v1, c1 = self._embed_ids(ids1)
        v2, c2 = self._embed_ids(ids2)
        z = nn.concat([v1, v2])
        logits, ff_cache = self.ff_.forward(z)
        return logits, (c1, c2, ff_cache, v1.shape[0])

    def _backward_pair(self, dlogits: np.ndarray, cache) -> None:
        c1, c2, ff_cache, k = cache
        dz = self.ff_.backward(dlogits, ff_cache)
        self._embed_ids_backward(dz[:k], c1)
        self._embed_ids_backward(dz[k:], c2)

    # --- estimator API ---

    def fit(self, X, y, dev=None):
        """Train on (t1, t2) surface pairs with timex labels.

        `dev` is an optional (X_dev, y_dev) tuple; without it a fraction of
        the training data is held out. The best-dev epoch's weights are
        retained.
        """
        pairs, labels = check_timex_pairs(X, y)
        if not pairs:
            raise ConfigInvalid("training set is empty")
        if self.epochs < 1:
            raise ConfigInvalid("epochs must be >= 1")
        rng = check_random_state(self.random_state)
        self._build(rng)
        label_index = {label: i for i, label in enumerate(TIMEX_LABELS)}

        if dev is not None:
            dev_pairs, dev_labels = check_timex_pairs(*dev)
            train_pairs, train_labels = pairs, labels
        else:
            n_dev = int(round(len(pairs) * self.validation_fraction))
            order = rng.permutation(len(pairs))
            dev_idx = set(order[:n_dev].tolist())
            train_pairs = [pairs[i] for i in range(len(pairs)) if i not in dev_idx]
            train_labels = [labels[i] for i in range(len(pairs)) if i not in dev_idx]
            dev_pairs = [pairs[i] for i in sorted(dev_idx)]
            dev_labels = [labels[i] for i in sorted(dev_idx)]

        encoded = [
            (encode_chars(t1, self.vocab_), encode_chars(t2, self.vocab_),
             label_index[label])
            for (t1, t2), label in zip(train_pairs, train_labels)
        ]
        dev_encoded = [
            (encode_chars(t1, self.vocab_), encode_chars(t2, self.vocab_),
             label_index[label])
            for (t1, t2), label in zip(dev_pairs, dev_labels)
        ]

        params = self.parameters()
        optimizer = nn.Adam(params, lr=self.learning_rate, beta1=self.beta1,
                            beta2=self.beta2, eps=self.epsilon,
                            clip_norm=self.clip_norm)
        self.history_ = []
        best_acc = -1.0
        best_state = None
        n = len(encoded)
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            total_loss = 0.0
            for start in range(0, n, self.batch_size):
                batch = order[start:start + self.batch_size]
                inv = 1.0 / len(batch)
                for idx in batch:
                    ids1, ids2, gold = encoded[idx]
                    logits, cache = self._forward_pair(ids1, ids2)
                    loss, _, dlogits = nn.softmax_cross_entropy(logits, gold)
                    total_loss += loss
                    self._backward_pair(dlogits.astype(logits.dtype) * inv, cache)
                optimizer.step()
                optimizer.zero_grad()
            train_loss = total_loss / max(1, n)
            dev_acc = self._accuracy_encoded(dev_encoded) if dev_encoded else float("nan")
            self.history_.append({
                "epoch": epoch,
                "train_loss": train_loss,
                "dev_accuracy": dev_acc,
            })
            logger.info("timex epoch %d: train_loss=%.4f dev_acc=%.4f",
                        epoch, train_loss, dev_acc)
            if dev_encoded and dev_acc > best_acc:
                best_acc = dev_acc
                best_state = [p.data.copy() for p in params]
        if best_state is not None:
            for p, data in zip(params, best_state):
                p.data[...] = data
        return self

    def _accuracy_encoded(self, encoded) -> float:
        correct = 0
        for ids1, ids2, gold in encoded:
            logits, _ = self._forward_pair(ids1, ids2)
            correct += int(np.argmax(logits) == gold)
        return correct / max(1, len(encoded))

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "vocab_")
        pairs = check_timex_pairs(X)
        out = np.empty((len(pairs), len(TIMEX_LABELS)), dtype=np.float64)
        for i, (t1, t2) in enumerate(pairs):
            logits, _ = self._forward_pair(
                encode_chars(t1, self.vocab_), encode_chars(t2, self.vocab_))
            _, probs, _ = nn.softmax_cross_entropy(logits, 0)
            out[i] = probs
        return out

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=1)]

    def classify_pair(self, t1: str, t2: str) -> np.ndarray:
        """Probability vector over (before, after, simultaneous)."""
        return self.predict_proba([(t1, t2)])[0]

    def embed(self, surface: str) -> np.ndarray:
        """Mean-pooled char-biLSTM vector for one surface string."""
        check_is_fitted(self, "vocab_")
        ids = encode_chars(check_surface(surface), self.vocab_)
        vec, _ = self._embed_ids(ids)
        return vec

    def transform(self, surfaces) -> np.ndarray:
        """Embeddings for a sequence of surface strings, row per input."""
        return np.stack([self.embed(s) for s in surfaces])

    # --- persistence ---

    def _tensor_dict(self) -> dict[str, np.ndarray]:
        return {p.name: p.data for p in self.parameters()}

    def save(self, stem) -> None:
        """Write `<stem>.tnsr` (weights) and `<stem>.json` (config sidecar)."""
        check_is_fitted(self, "vocab_")
        stem = Path(stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        nn.save_tensors(stem.with_suffix(".tnsr"), self._tensor_dict())
        sidecar = {
            "model": "timex_pair_classifier",
            "params": _jsonable(self.get_params(deep=False)),
            "alphabet": "".join(sorted(self.vocab_, key=self.vocab_.get)),
            "labels": list(TIMEX_LABELS),
        }
        stem.with_suffix(".json").write_text(
            json.dumps(sidecar, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8")

    @classmethod
    def load(cls, stem) -> "TimexPairClassifier":
        stem = Path(stem)
        sidecar = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
        if sidecar.get("model") != "timex_pair_classifier":
            raise ConfigInvalid(f"{stem} is not a timex model checkpoint")
        params = sidecar["params"]
        params["ff_dims"] = tuple(params["ff_dims"])
        model = cls(**params)
        model._build(np.random.default_rng(0))
        expected = {p.name: p.data.shape for p in model.parameters()}
        tensors = nn.load_tensors(stem.with_suffix(".tnsr"), expected)
        for p in model.parameters():
            p.data[...] = tensors[p.name]
        return model


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


def pairs_to_xy(examples):
    """TimexPairExample list -> ((t1, t2) surface pairs, labels)."""
    X = [(ex.t1.surface, ex.t2.surface) for ex in examples]
    y = [ex.label for ex in examples]
    return X, y


def evaluate_timex(model: TimexPairClassifier, pairs, labels) -> dict:
    """Accuracy plus per-class confusion over (t1, t2) pairs."""
    pred = model.predict(pairs)
    return classification_metrics(labels, pred, TIMEX_LABELS)


def swap_consistency(model: TimexPairClassifier, pairs) -> float:
    """Fraction of before/after predictions that flip when arguments swap.

    Reported, not asserted: the network is not architecturally antisymmetric.
    """
    forward = model.predict(pairs)
    backward = model.predict([(t2, t1) for t1, t2 in pairs])
    flip = {"before": "after", "after": "before"}
    relevant = [(f, b) for f, b in zip(forward, backward) if f in flip]
    if not relevant:
        return float("nan")
    return sum(b == flip[f] for f, b in relevant) / len(relevant)
