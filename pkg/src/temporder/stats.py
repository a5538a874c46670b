"""Evaluation metrics and the paired bootstrap significance test."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch


def classification_metrics(gold, pred, labels) -> dict:
    """Accuracy, per-class F1, and a confusion matrix (rows = gold)."""
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise LengthMismatch(f"{len(gold)} gold vs {len(pred)} predictions")
    index = {label: i for i, label in enumerate(labels)}
    k = len(labels)
    confusion = np.zeros((k, k), dtype=np.int64)
    for g, p in zip(gold, pred):
        confusion[index[g], index[p]] += 1
    correct = int(np.trace(confusion))
    f1 = {}
    for label, i in index.items():
        tp = confusion[i, i]
        precision = tp / max(1, confusion[:, i].sum())
        recall = tp / max(1, confusion[i, :].sum())
        f1[label] = (2 * precision * recall / (precision + recall)
                     if precision + recall > 0 else 0.0)
    return {
        "accuracy": correct / max(1, len(gold)),
        "f1": f1,
        "confusion": confusion.tolist(),
        "labels": list(labels),
        "n": len(gold),
    }


def bootstrap_compare(preds_a, preds_b, gold, n_resamples: int = 10_000,
                      seed: int = 0) -> float:
    """One-sided paired bootstrap p-value for "system A beats system B".

    Resamples test indices with replacement; p is the fraction of resamples
    where accuracy(A) falls at or below accuracy(B), ties counting one half.
    Identical prediction vectors therefore give exactly p = 0.5.
    """
    preds_a = list(preds_a)
    preds_b = list(preds_b)
    gold = list(gold)
    if not len(preds_a) == len(preds_b) == len(gold):
        raise LengthMismatch(
            f"prediction/gold lengths differ: {len(preds_a)}, "
            f"{len(preds_b)}, {len(gold)}")
    n = len(gold)
    correct_a = np.array([a == g for a, g in zip(preds_a, gold)], dtype=np.float64)
    correct_b = np.array([b == g for b, g in zip(preds_b, gold)], dtype=np.float64)
    diff = correct_a - correct_b
    rng = np.random.default_rng(seed)
    worse = 0.0
    for _ in range(n_resamples):
        idx = rng.integers(0, n, size=n)
        delta = diff[idx].sum()
        if delta < 0:
            worse += 1.0
        elif delta == 0:
            worse += 0.5
    return worse / n_resamples
