import math
from collections import Counter, defaultdict

import pytest

from temporder import oracle
from temporder.datasets import (
    SyntheticEventCorpusConfig,
    corpus_to_instances,
    generate_event_corpus,
    generate_timex_pairs,
    split_and_write,
)
from temporder.documents import check_document, is_verb, span_surface
from temporder.errors import ConfigInvalid
from temporder.normalize import compare, parse_timex

ANCHOR_TUPLE = (1998, 6, 15)


class TestTimexPairs:
    def test_exact_count_and_labels(self):
        pairs = generate_timex_pairs(500, seed=4, explicit_fraction=0.75)
        assert len(pairs) == 500
        assert all(p.label in ("before", "after", "simultaneous") for p in pairs)

    def test_label_matches_compare_invariant(self):
        for p in generate_timex_pairs(300, seed=6, explicit_fraction=0.5):
            assert p.label == compare(p.t1.interval, p.t2.interval)

    def test_oracle_agreement(self):
        for p in generate_timex_pairs(2000, seed=8, explicit_fraction=0.75):
            assert p.label == oracle.label_pair(
                p.t1.template_id, p.t1.slots,
                p.t2.template_id, p.t2.slots, ANCHOR_TUPLE)

    def test_seed_determinism(self):
        a = generate_timex_pairs(100, seed=10, explicit_fraction=0.75)
        b = generate_timex_pairs(100, seed=10, explicit_fraction=0.75)
        assert a == b

    def test_disjoint_seeds_differ(self):
        a = generate_timex_pairs(100, seed=1, explicit_fraction=0.75)
        b = generate_timex_pairs(100, seed=2, explicit_fraction=0.75)
        assert a != b

    def test_n_must_be_positive(self):
        with pytest.raises(ConfigInvalid):
            generate_timex_pairs(0, seed=1)


@pytest.fixture(scope="module")
def corpus():
    return generate_event_corpus(SyntheticEventCorpusConfig(n_examples=400, seed=0))


class TestEventCorpusStructure:
    def test_documents_validate(self, corpus):
        for doc in corpus:
            check_document(doc)

    def test_two_verb_events_each_with_tmod_timex(self, corpus):
        for doc in corpus:
            assert len(doc.events) == 2
            assert len(doc.timex_spans) == 2
            for (si, ti) in doc.events:
                assert is_verb(doc.sentences[si].tokens[ti].pos)
            for span, event in zip(doc.timex_spans, doc.events):
                sent = doc.sentences[span.sentence]
                head_tok = sent.tokens[span.head_token]
                assert head_tok.deprel == "tmod"
                assert head_tok.head == event[1]
                assert span.sentence == event[0]

    def test_label_is_timex_comparison_and_flips(self, corpus):
        for doc in corpus:
            s1, s2 = doc.timex_spans
            i1 = parse_timex(span_surface(doc, s1))
            i2 = parse_timex(span_surface(doc, s2))
            assert doc.pairs[0].label == compare(i1, i2)
            flipped = {"before": "after", "after": "before"}
            assert compare(i2, i1) == flipped[doc.pairs[0].label]

    def test_sentence_layout_fractions(self):
        intra = generate_event_corpus(SyntheticEventCorpusConfig(
            n_examples=50, seed=1, intra_sentence_fraction=1.0))
        assert all(len(d.sentences) == 1 for d in intra)
        inter = generate_event_corpus(SyntheticEventCorpusConfig(
            n_examples=50, seed=1, intra_sentence_fraction=0.0))
        assert all(len(d.sentences) == 2 for d in inter)

    def test_config_validation(self):
        with pytest.raises(ConfigInvalid):
            generate_event_corpus(SyntheticEventCorpusConfig(
                n_examples=5, timex_fraction_determining=0.5))
        with pytest.raises(ConfigInvalid):
            generate_event_corpus(SyntheticEventCorpusConfig(
                n_examples=0))
        with pytest.raises(ConfigInvalid):
            generate_event_corpus(SyntheticEventCorpusConfig(
                n_examples=5, verbs=()))

    def test_corpus_to_instances_alignment(self, corpus):
        X, y = corpus_to_instances(corpus)
        assert len(X) == len(y) == len(corpus)
        for inst, label, doc in zip(X, y, corpus):
            assert inst.doc is doc
            assert label == doc.pairs[0].label


class TestEventCorpusLeakage:
    def test_per_verb_label_balance(self):
        docs = generate_event_corpus(SyntheticEventCorpusConfig(
            n_examples=4000, seed=0))
        counts = defaultdict(Counter)
        for doc in docs:
            label = doc.pairs[0].label
            for (si, ti) in doc.events:
                counts[doc.sentences[si].tokens[ti].word][label] += 1
        for verb, c in counts.items():
            total = c["before"] + c["after"]
            assert total > 100
            frac = c["before"] / total
            assert abs(frac - 0.5) <= 0.03, (verb, frac)

    def test_unigram_and_majority_classifiers_near_chance(self):
        docs = generate_event_corpus(SyntheticEventCorpusConfig(
            n_examples=2000, seed=3))
        half = len(docs) // 2
        train, test = docs[:half], docs[half:]

        majority = Counter(d.pairs[0].label for d in train).most_common(1)[0][0]
        maj_acc = sum(d.pairs[0].label == majority for d in test) / len(test)
        assert maj_acc <= 0.55

        word_counts = {"before": Counter(), "after": Counter()}
        label_counts = Counter()
        for doc in train:
            label = doc.pairs[0].label
            label_counts[label] += 1
            for sent in doc.sentences:
                word_counts[label].update(t.word for t in sent.tokens)
        vocab = set(word_counts["before"]) | set(word_counts["after"])
        totals = {lab: sum(word_counts[lab].values()) for lab in word_counts}

        def nb_predict(doc):
            scores = {}
            for lab in ("before", "after"):
                score = math.log(label_counts[lab] / len(train))
                for sent in doc.sentences:
                    for t in sent.tokens:
                        p = ((word_counts[lab][t.word] + 1)
                             / (totals[lab] + len(vocab)))
                        score += math.log(p)
                scores[lab] = score
            return max(scores, key=scores.get)

        nb_acc = sum(nb_predict(d) == d.pairs[0].label for d in test) / len(test)
        assert nb_acc <= 0.55


class TestSplitAndWrite:
    def test_round_trip_docs(self, tmp_path, corpus):
        from temporder import corpus_io
        path = tmp_path / "docs.jsonl"
        split_and_write(corpus[:20], path)
        assert corpus_io.read_documents(path) == corpus[:20]

    def test_force_flag(self, tmp_path, corpus):
        path = tmp_path / "docs.jsonl"
        split_and_write(corpus[:5], path)
        with pytest.raises(FileExistsError):
            split_and_write(corpus[:5], path)
        split_and_write(corpus[:5], path, force=True)

    def test_byte_determinism_for_fixed_seed(self, tmp_path):
        a = generate_event_corpus(SyntheticEventCorpusConfig(n_examples=25, seed=9))
        b = generate_event_corpus(SyntheticEventCorpusConfig(n_examples=25, seed=9))
        pa, pb = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        split_and_write(a, pa)
        split_and_write(b, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ConfigInvalid):
            split_and_write([object()], tmp_path / "x.jsonl")
