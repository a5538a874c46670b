"""Acceptance suite: every gate criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line
per criterion. The heavy fixtures (the 50K-pair classifier, the ablation
grid) train real models, so the full module takes tens of minutes.
"""

import json
import time

import numpy as np
import pytest

from temporder import corpus_io, experiments, nn, oracle
from temporder.cli import main as cli_main
from temporder.datasets import (
    SyntheticEventCorpusConfig,
    corpus_to_instances,
    generate_event_corpus,
    generate_timex_pairs,
)
from temporder.distant import build_distant_dataset
from temporder.errors import TempOrderError
from temporder.event_model import EventOrderingClassifier
from temporder.stats import bootstrap_compare
from temporder.timex_model import (
    TimexPairClassifier,
    encode_chars,
    evaluate_timex,
    pairs_to_xy,
)

pytestmark = pytest.mark.slow

ANCHOR_TUPLE = (1998, 6, 15)
N_JOBS = 2


def report(number: int, description: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {number} {status} - {description}: {detail}", flush=True)
    assert ok, f"criterion {number}: {detail}"


@pytest.fixture(scope="module")
def timex_bundle():
    train = generate_timex_pairs(50_000, seed=1, explicit_fraction=0.75)
    dev = generate_timex_pairs(2_000, seed=2, explicit_fraction=0.75)
    test = generate_timex_pairs(5_000, seed=3, explicit_fraction=0.75)
    model = TimexPairClassifier(random_state=0)
    start = time.time()
    model.fit(*pairs_to_xy(train), dev=pairs_to_xy(dev))
    train_minutes = (time.time() - start) / 60
    metrics = evaluate_timex(model, *pairs_to_xy(test))
    return {
        "train": train,
        "test": test,
        "model": model,
        "train_minutes": train_minutes,
        "metrics": metrics,
    }


@pytest.fixture(scope="module")
def event_corpora():
    train = generate_event_corpus(SyntheticEventCorpusConfig(
        n_examples=4_000, seed=100))
    test = generate_event_corpus(SyntheticEventCorpusConfig(
        n_examples=1_000, seed=200))
    return train, test


@pytest.fixture(scope="module")
def ablation_grid(timex_bundle, event_corpora):
    train, test = event_corpora
    return experiments.learning_curve(
        train, test, timex_model=timex_bundle["model"],
        sizes=(2000, 3000, 4000), modes=("with", "masked"), seeds=(0, 1, 2),
        n_jobs=N_JOBS)


def test_criterion_1_synthetic_timex_ordering(timex_bundle):
    accuracy = timex_bundle["metrics"]["accuracy"]
    minutes = timex_bundle["train_minutes"]
    report(1, "synthetic timex ordering (50K train / 5K test)",
           accuracy >= 0.95 and minutes <= 30,
           f"accuracy {accuracy:.4f} (>= 0.95), training {minutes:.1f} min "
           f"(<= 30)")


def test_trained_timex_regressions(timex_bundle):
    """Behavioral expectations recorded against the trained model."""
    model = timex_bundle["model"]
    probs = model.classify_pair("1963", "1992")
    assert model.classes_[int(np.argmax(probs))] == "before"

    def cosine(a, b):
        return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

    near = cosine(model.embed("1992"), model.embed("1993"))
    far = cosine(model.embed("1992"), model.embed("3 weeks ago"))
    assert near > far


def test_criterion_2_oracle_soundness(timex_bundle):
    mismatches = 0
    for pair in timex_bundle["train"]:
        expected = oracle.label_pair(
            pair.t1.template_id, pair.t1.slots,
            pair.t2.template_id, pair.t2.slots, ANCHOR_TUPLE)
        if pair.label != expected:
            mismatches += 1
    report(2, "oracle soundness on 50,000 generated labels",
           mismatches == 0, f"{mismatches} disagreements out of 50,000")


def _layer_checks() -> dict[str, float]:
    errs = {}
    rng = np.random.default_rng(0)

    lin = nn.Linear(4, 3, rng, dtype=np.float64)
    x = nn.Parameter("x", rng.normal(size=4))
    r = rng.normal(size=3)

    def run_linear(compute):
        y, cache = lin.forward(x.data)
        if compute:
            x.grad += lin.backward(r.copy(), cache)
        return float(r @ y)

    errs["linear"] = nn.grad_check(run_linear, lin.parameters() + [x])

    xr = nn.Parameter("xr", rng.normal(size=6) + np.sign(rng.normal(size=6)))
    rr = rng.normal(size=6)

    def run_relu(compute):
        y = nn.relu(xr.data)
        if compute:
            xr.grad += nn.relu_backward(rr.copy(), xr.data)
        return float(rr @ y)

    errs["relu"] = nn.grad_check(run_relu, [xr])

    Xp = nn.Parameter("Xp", rng.normal(size=(5, 3)))
    rp = rng.normal(size=3)

    def run_pool(compute):
        v = nn.mean_pool(Xp.data)
        if compute:
            Xp.grad += nn.mean_pool_backward(rp.copy(), 5)
        return float(rp @ v)

    errs["mean_pool"] = nn.grad_check(run_pool, [Xp])

    logits = nn.Parameter("logits", rng.normal(size=4))

    def run_ce(compute):
        loss, _, dlogits = nn.softmax_cross_entropy(logits.data, 1)
        if compute:
            logits.grad += dlogits
        return loss

    errs["softmax_ce"] = nn.grad_check(run_ce, [logits])

    cell = nn.LstmCell(3, 4, rng, dtype=np.float64)
    cx = nn.Parameter("cx", rng.normal(size=3))
    ch = nn.Parameter("ch", rng.normal(size=4) * 0.5)
    cc = nn.Parameter("cc", rng.normal(size=4) * 0.5)
    rh, rc = rng.normal(size=4), rng.normal(size=4)

    def run_cell(compute):
        h2, c2, cache = cell.step(cx.data, ch.data, cc.data)
        if compute:
            dx, dh, dc = cell.step_backward(rh.copy(), rc.copy(), cache)
            cx.grad += dx
            ch.grad += dh
            cc.grad += dc
        return float(rh @ h2 + rc @ c2)

    errs["lstm_cell"] = nn.grad_check(run_cell, cell.parameters() + [cx, ch, cc])

    bi = nn.BiLstm(3, 4, rng, dtype=np.float64)
    BX = nn.Parameter("BX", rng.normal(size=(5, 3)))
    BR = rng.normal(size=(5, 8))

    def run_bilstm(compute):
        Y, cache = bi.forward(BX.data)
        if compute:
            BX.grad += bi.backward(BR.copy(), cache)
        return float((BR * Y).sum())

    errs["bilstm"] = nn.grad_check(run_bilstm, bi.parameters() + [BX])
    return errs


def _timex_model_check() -> float:
    model = TimexPairClassifier(char_emb_dim=8, hidden_dim=8, ff_dims=(16,),
                                random_state=0)
    model._build(np.random.default_rng(0))
    for layer in model.ff_.layers:
        layer.b.data[...] = 0.25   # keep ReLU inputs off the kink
    ids1 = encode_chars("Sept. 12, 1993", model.vocab_)
    ids2 = encode_chars("two months ago", model.vocab_)

    def run(compute):
        logits, cache = model._forward_pair(ids1, ids2)
        loss, _, dlogits = nn.softmax_cross_entropy(logits, 1)
        if compute:
            model._backward_pair(dlogits, cache)
        return loss

    with nn.params_as_dtype(model.parameters(), np.float64) as params:
        return nn.grad_check(run, params, eps=1e-5, max_coords=250,
                             rng=np.random.default_rng(0))


def _event_model_check() -> float:
    pairs = generate_timex_pairs(200, seed=5, explicit_fraction=1.0)
    timex = TimexPairClassifier(char_emb_dim=8, hidden_dim=8, ff_dims=(16,),
                                epochs=1, random_state=0)
    timex.fit(*pairs_to_xy(pairs))
    docs = generate_event_corpus(SyntheticEventCorpusConfig(n_examples=4, seed=6))
    X, _ = corpus_to_instances(docs)
    model = EventOrderingClassifier(
        mode="with_timex", timex_model=timex, word_emb_dim=12, pos_emb_dim=4,
        lower_hidden=6, upper_hidden=6, ff_dims=(16,), random_state=0)
    model._timex = timex
    model._build_vocabs(X)
    model._build(np.random.default_rng(0))
    for layer in model.ff_.layers:
        layer.b.data[...] = 0.25
    inst = X[0]
    enc_doc = model._encode_doc(inst.doc)

    def run(compute):
        logits, cache = model._forward(enc_doc, inst)
        loss, _, dlogits = nn.softmax_cross_entropy(logits, 0)
        if compute:
            model._backward(dlogits, cache)
        return loss

    with nn.params_as_dtype(model.parameters(), np.float64) as params:
        return nn.grad_check(run, params, eps=1e-5, max_coords=250,
                             rng=np.random.default_rng(1))


def test_criterion_3_gradient_correctness():
    layer_errs = _layer_checks()
    timex_err = _timex_model_check()
    event_err = _event_model_check()
    layers_ok = all(err < 1e-3 for err in layer_errs.values())
    models_ok = timex_err < 5e-3 and event_err < 5e-3
    detail = (", ".join(f"{k}={v:.1e}" for k, v in layer_errs.items())
              + f" (< 1e-3); timex_model={timex_err:.1e}, "
                f"event_model={event_err:.1e} (< 5e-3, 250 coords)")
    report(3, "finite-difference gradient checks", layers_ok and models_ok,
           detail)


def test_criterion_4_ablation_gap(ablation_grid):
    means = ablation_grid["mean_accuracy"]
    checks = []
    details = []
    for size in ("2000", "3000", "4000"):
        with_acc = means["with"][size]
        masked_acc = means["masked"][size]
        gap = with_acc - masked_acc
        checks.append(with_acc >= 0.90 and gap >= 0.10 and masked_acc <= 0.65)
        details.append(f"n={size}: with={with_acc:.3f} masked={masked_acc:.3f} "
                       f"gap={gap * 100:.1f}pt")
    report(4, "timex ablation gap on the synthetic event corpus (3 seeds)",
           all(checks), "; ".join(details))


@pytest.fixture(scope="module")
def baseline_runs(event_corpora):
    train, test = event_corpora
    from joblib import Parallel, delayed
    jobs = [(baseline, seed) for baseline in (False, True) for seed in (0, 1, 2)]
    cells = Parallel(n_jobs=N_JOBS)(
        delayed(experiments.train_event_cell)(
            train, test, "without", 2000, seed,
            None, baseline, None)
        for baseline, seed in jobs)
    full = [c["accuracy"] for c, (b, _) in zip(cells, jobs) if not b]
    base = [c["accuracy"] for c, (b, _) in zip(cells, jobs) if b]
    return np.mean(full), np.mean(base)


def test_criterion_5_lower_bilstm_matters(baseline_runs):
    full_acc, base_acc = baseline_runs
    gap = full_acc - base_acc
    report(5, "no-lower-biLSTM baseline underperforms the full model "
              "(n=2000, 3 seeds)", gap >= 0.03,
           f"full={full_acc:.3f} baseline={base_acc:.3f} gap={gap * 100:.1f}pt "
           f"(>= 3pt)")


def test_criterion_6_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"char_emb_dim": 8, "hidden_dim": 8,
                               "ff_dims": [16], "epochs": 2}))
    event_cfg = tmp_path / "event_cfg.json"
    event_cfg.write_text(json.dumps({"word_emb_dim": 12, "pos_emb_dim": 4,
                                     "lower_hidden": 6, "upper_hidden": 6,
                                     "ff_dims": [16], "epochs": 1}))
    artifacts = {}
    for run_id in ("a", "b"):
        root = tmp_path / run_id
        root.mkdir()
        assert cli_main(["gen-pairs", "--n", "400", "--seed", "11",
                         "--out", str(root / "pairs.jsonl")]) == 0
        assert cli_main(["gen-events", "--n", "30", "--seed", "12",
                         "--out", str(root / "docs.jsonl")]) == 0
        assert cli_main(["train-timex", "--train", str(root / "pairs.jsonl"),
                         "--seed", "5", "--config", str(cfg),
                         "--out", str(root / "timex")]) == 0
        assert cli_main(["train-events", "--train", str(root / "docs.jsonl"),
                         "--mode", "without", "--seed", "5",
                         "--config", str(event_cfg),
                         "--out", str(root / "events")]) == 0
        artifacts[run_id] = {
            rel: (root / rel).read_bytes()
            for rel in ("pairs.jsonl", "docs.jsonl", "timex/metrics.json",
                        "timex/timex-model.tnsr", "timex/timex-model.json",
                        "events/metrics.json", "events/event-model.tnsr")
        }
    mismatched = [rel for rel in artifacts["a"]
                  if artifacts["a"][rel] != artifacts["b"][rel]]
    report(6, "bitwise-identical artifacts for identical config + seed",
           not mismatched,
           f"{len(artifacts['a'])} artifacts compared, mismatches: "
           f"{mismatched or 'none'}")


def test_criterion_7_significance_harness():
    gold = ["x"] * 1000
    identical = ["x"] * 600 + ["y"] * 400
    p_same = bootstrap_compare(identical, identical, gold,
                               n_resamples=10_000, seed=0)
    preds_b = ["y"] * 200 + ["x"] * 800          # 200 errors
    preds_a = ["x"] * 50 + preds_b[50:]          # fixes 50, introduces none
    p_better = bootstrap_compare(preds_a, preds_b, gold,
                                 n_resamples=10_000, seed=0)
    report(7, "paired bootstrap harness",
           p_same >= 0.49 and p_better < 0.01,
           f"identical systems p={p_same:.3f} (>= 0.49), "
           f"50-fix improvement p={p_better:.5f} (< 0.01)")


def test_criterion_8_distant_labeler_round_trip():
    docs = generate_event_corpus(SyntheticEventCorpusConfig(
        n_examples=1_000, seed=77))
    rows, _ = build_distant_dataset(docs)
    recovered = {(doc_id, p.e1, p.e2): p.label for doc_id, p in rows}
    gold_total = 0
    found = 0
    label_disagreements = 0
    for doc in docs:
        for pair in doc.pairs:
            gold_total += 1
            key = (doc.doc_id, pair.e1, pair.e2)
            if key in recovered:
                found += 1
                if recovered[key] != pair.label:
                    label_disagreements += 1
    recovery = found / gold_total
    report(8, "distant labeler recovers generator gold pairs",
           recovery >= 0.99 and label_disagreements == 0,
           f"recovered {found}/{gold_total} ({recovery:.1%}), "
           f"{label_disagreements} label disagreements")


def test_criterion_9_format_integrity(tmp_path, timex_bundle):
    rng = np.random.default_rng(55)
    counts = {}

    pairs = generate_timex_pairs(3_000, seed=31, explicit_fraction=0.75)
    path = tmp_path / "pairs.jsonl"
    corpus_io.write_timex_pairs(path, pairs)
    counts["timex_pairs"] = int(corpus_io.read_timex_pairs(path) == pairs) * 3_000

    docs = generate_event_corpus(SyntheticEventCorpusConfig(
        n_examples=3_000, seed=33))
    path = tmp_path / "docs.jsonl"
    corpus_io.write_documents(path, docs)
    counts["documents"] = int(corpus_io.read_documents(path) == docs) * 3_000

    labels = ["before", "after", "vague", "simultaneous"]
    preds = []
    for i in range(2_500):
        probs = rng.dirichlet(np.ones(4))
        preds.append({"pair_id": f"p{i}", "gold": labels[i % 4],
                      "pred": labels[int(rng.integers(4))],
                      "probs": [float(v) for v in probs]})
    path = tmp_path / "preds.jsonl"
    corpus_io.write_predictions(path, preds)
    counts["predictions"] = int(corpus_io.read_predictions(path) == preds) * 2_500

    rows, _ = build_distant_dataset(docs[:1_500])
    path = tmp_path / "event_pairs.jsonl"
    corpus_io.write_event_pairs(path, rows)
    counts["event_pairs"] = int(corpus_io.read_event_pairs(path) == rows) * 1_500

    total = sum(counts.values())

    stem = tmp_path / "ck"
    timex_bundle["model"].save(stem)
    blob = (stem.with_suffix(".tnsr")).read_bytes()
    corrupt_path = tmp_path / "corrupt.tnsr"
    rejected = 0
    attempts = 0
    cuts = [0, 3, 7, 11, 15, len(blob) // 3, len(blob) // 2, len(blob) - 5,
            len(blob) - 1]
    flips = [int(v) for v in rng.integers(0, len(blob), size=40)]
    for cut in cuts:
        attempts += 1
        corrupt_path.write_bytes(blob[:cut])
        try:
            corpus_io.load_tensors(corrupt_path)
        except TempOrderError:
            rejected += 1
    for pos in flips:
        attempts += 1
        mutated = bytearray(blob)
        mutated[pos] ^= 0xFF
        corrupt_path.write_bytes(bytes(mutated))
        try:
            corpus_io.load_tensors(corrupt_path)
        except TempOrderError:
            rejected += 1

    report(9, "format integrity",
           total >= 10_000 and rejected == attempts,
           f"{total} records round-tripped across 4 schemas; "
           f"{rejected}/{attempts} corrupted checkpoints rejected")
