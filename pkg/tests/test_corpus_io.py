import json

import pytest

from temporder import corpus_io
from temporder.datasets import (
    SyntheticEventCorpusConfig,
    generate_event_corpus,
    generate_timex_pairs,
)
from temporder.errors import ParseError, SchemaViolation


@pytest.fixture(scope="module")
def pairs():
    return generate_timex_pairs(50, seed=1, explicit_fraction=0.75)


@pytest.fixture(scope="module")
def docs():
    return generate_event_corpus(SyntheticEventCorpusConfig(n_examples=30, seed=2))


class TestTimexPairs:
    def test_round_trip(self, tmp_path, pairs):
        path = tmp_path / "pairs.jsonl"
        corpus_io.write_timex_pairs(path, pairs)
        assert corpus_io.read_timex_pairs(path) == pairs

    def test_deterministic_bytes(self, tmp_path, pairs):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        corpus_io.write_timex_pairs(a, pairs)
        corpus_io.write_timex_pairs(b, pairs)
        assert a.read_bytes() == b.read_bytes()

    def test_refuses_overwrite_without_force(self, tmp_path, pairs):
        path = tmp_path / "pairs.jsonl"
        corpus_io.write_timex_pairs(path, pairs)
        with pytest.raises(FileExistsError):
            corpus_io.write_timex_pairs(path, pairs)
        corpus_io.write_timex_pairs(path, pairs, force=True)

    def test_bad_label_rejected(self, tmp_path, pairs):
        path = tmp_path / "pairs.jsonl"
        corpus_io.write_timex_pairs(path, pairs)
        lines = path.read_text().splitlines()
        record = json.loads(lines[3])
        record["label"] = "sideways"
        lines[3] = json.dumps(record)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaViolation) as err:
            corpus_io.read_timex_pairs(path)
        assert err.value.line == 4


class TestDocuments:
    def test_round_trip(self, tmp_path, docs):
        path = tmp_path / "docs.jsonl"
        corpus_io.write_documents(path, docs)
        assert corpus_io.read_documents(path) == docs

    def test_parse_error_names_line(self, tmp_path, docs):
        path = tmp_path / "docs.jsonl"
        corpus_io.write_documents(path, docs)
        text = path.read_text().splitlines()
        text[4] = "{not json"
        path.write_text("\n".join(text) + "\n")
        with pytest.raises(ParseError) as err:
            corpus_io.read_documents(path)
        assert err.value.line == 5

    def test_head_out_of_range_names_line(self, tmp_path, docs):
        path = tmp_path / "docs.jsonl"
        corpus_io.write_documents(path, docs)
        lines = path.read_text().splitlines()
        record = json.loads(lines[2])
        record["sentences"][0]["tokens"][0]["head"] = 99
        lines[2] = json.dumps(record)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaViolation) as err:
            corpus_io.read_documents(path)
        assert err.value.line == 3

    def test_missing_field_names_field_and_line(self, tmp_path, docs):
        path = tmp_path / "docs.jsonl"
        corpus_io.write_documents(path, docs)
        lines = path.read_text().splitlines()
        record = json.loads(lines[0])
        del record["sentences"][0]["tokens"][1]["pos"]
        lines[0] = json.dumps(record)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaViolation) as err:
            corpus_io.read_documents(path)
        assert err.value.field == "pos"
        assert err.value.line == 1


class TestEventPairsAndPredictions:
    def test_event_pair_round_trip(self, tmp_path, docs):
        rows = [(d.doc_id, p) for d in docs for p in d.pairs]
        path = tmp_path / "pairs.jsonl"
        corpus_io.write_event_pairs(path, rows)
        assert corpus_io.read_event_pairs(path) == rows

    def test_prediction_round_trip(self, tmp_path):
        rows = [
            {"pair_id": "d0:0", "gold": "before", "pred": "after",
             "probs": [0.2, 0.6, 0.1, 0.1]},
            {"pair_id": "d1:0", "gold": "after", "pred": "after",
             "probs": [0.1, 0.7, 0.1, 0.1]},
        ]
        path = tmp_path / "preds.jsonl"
        corpus_io.write_predictions(path, rows)
        assert corpus_io.read_predictions(path) == rows

    def test_non_numeric_probs_rejected(self, tmp_path):
        path = tmp_path / "preds.jsonl"
        path.write_text('{"pair_id": "x", "gold": "a", "pred": "b", '
                        '"probs": ["high"]}\n')
        with pytest.raises(SchemaViolation):
            corpus_io.read_predictions(path)
