import numpy as np
import pytest

from temporder.errors import LengthMismatch
from temporder.stats import bootstrap_compare, classification_metrics


class TestClassificationMetrics:
    def test_perfect_predictions(self):
        gold = ["before", "after", "before", "simultaneous"]
        m = classification_metrics(gold, gold, ("before", "after", "simultaneous"))
        assert m["accuracy"] == 1.0
        assert all(f == 1.0 for f in m["f1"].values())

    def test_single_class_predictor_on_balanced_set(self):
        gold = ["before", "after", "simultaneous"] * 30
        pred = ["before"] * 90
        m = classification_metrics(gold, pred, ("before", "after", "simultaneous"))
        assert m["accuracy"] == pytest.approx(1 / 3)
        assert m["f1"]["after"] == 0.0

    def test_confusion_rows_sum_to_class_counts(self):
        gold = ["a", "a", "b", "b", "b"]
        pred = ["a", "b", "b", "a", "b"]
        m = classification_metrics(gold, pred, ("a", "b"))
        confusion = np.array(m["confusion"])
        assert confusion[0].sum() == 2
        assert confusion[1].sum() == 3

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            classification_metrics(["a"], ["a", "b"], ("a", "b"))


class TestBootstrapCompare:
    def test_identical_systems_p_half(self):
        gold = ["x", "y"] * 50
        preds = ["x"] * 100
        p = bootstrap_compare(preds, preds, gold, n_resamples=500, seed=0)
        assert p == pytest.approx(0.5)
        assert p >= 0.49

    def test_maximal_separation(self):
        gold = ["x"] * 100
        perfect = ["x"] * 100
        wrong = ["y"] * 100
        p = bootstrap_compare(perfect, wrong, gold, n_resamples=2000, seed=0)
        assert p < 1e-3

    def test_fifty_fixes_on_thousand_items(self):
        gold = ["x"] * 1000
        b = ["y"] * 200 + ["x"] * 800
        a = ["x"] * 50 + b[50:]   # fixes 50 of B's errors, introduces none
        p = bootstrap_compare(a, b, gold, n_resamples=10_000, seed=0)
        assert p < 0.01

    def test_small_improvement_reproducible(self):
        rng = np.random.default_rng(4)
        gold = [str(v) for v in rng.integers(0, 2, size=1000)]
        b = [str(v) for v in rng.integers(0, 2, size=1000)]
        a = list(b)
        flipped = 0
        for i, (g, pb) in enumerate(zip(gold, b)):
            if pb != g and flipped < 5:
                a[i] = g
                flipped += 1
        p1 = bootstrap_compare(a, b, gold, n_resamples=2000, seed=9)
        p2 = bootstrap_compare(a, b, gold, n_resamples=2000, seed=9)
        assert p1 == p2
        assert 0.0 < p1 < 1.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            bootstrap_compare(["x"], ["x", "y"], ["x", "y"])
