"""Command-line entry points for generation, training, evaluation, and
significance testing.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, corpus_io, datasets, distant, experiments
from .errors import ConfigInvalid, NonFinite, TempOrderError
from .event_model import EventOrderingClassifier, evaluate_events
from .normalize import DEFAULT_ANCHOR, ReferenceAnchor, parse_timex
from .grammar import templates_json
from .stats import bootstrap_compare
from .timex_model import (
    TimexPairClassifier,
    evaluate_timex,
    pairs_to_xy,
    swap_consistency,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _anchor_arg(value: str) -> ReferenceAnchor:
    return ReferenceAnchor.from_iso(value)


def _int_list(value: str) -> list[int]:
    return [int(v) for v in value.split(",") if v]


def _str_list(value: str) -> list[str]:
    return [v for v in value.split(",") if v]


def _load_overrides(path) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _build_estimator(cls, overrides: dict, **fixed):
    try:
        return cls(**fixed, **overrides)
    except TypeError as exc:
        raise ConfigInvalid(f"bad config override: {exc}") from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="temporder", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"temporder {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dump-templates", help="print the template grammar as JSON")
    p.add_argument("--out", type=Path, help="write here instead of stdout")

    p = sub.add_parser("normalize", help="print a timex's interval as ISO dates")
    p.add_argument("surface")
    p.add_argument("--anchor", type=_anchor_arg, default=DEFAULT_ANCHOR,
                   help="reference date for relative timexes (ISO)")

    p = sub.add_parser("gen-pairs", help="generate labeled timex pairs (JSONL)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--explicit-fraction", type=float, default=0.75)
    p.add_argument("--anchor", type=_anchor_arg, default=DEFAULT_ANCHOR)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("gen-events", help="generate the synthetic event corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intra-fraction", type=float, default=0.5)
    p.add_argument("--anchor", type=_anchor_arg, default=DEFAULT_ANCHOR)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("train-timex", help="train the timex pair classifier")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--dev", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=Path, help="JSON with estimator overrides")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("eval-timex", help="evaluate a timex model checkpoint")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("embed", help="print the embedding vector of a timex")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("surface")

    p = sub.add_parser("train-events", help="train the event ordering model")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--dev", type=Path)
    p.add_argument("--mode", choices=("with", "without", "masked"),
                   default="with")
    p.add_argument("--timex-model", type=Path)
    p.add_argument("--baseline-no-lower-bilstm", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("eval-events", help="evaluate an event model checkpoint")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("distant-label", help="rule-label event pairs in a corpus")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--anchor", type=_anchor_arg, default=DEFAULT_ANCHOR)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("significance",
                       help="paired bootstrap test between two prediction files")
    p.add_argument("--preds-a", type=Path, required=True)
    p.add_argument("--preds-b", type=Path, required=True)
    p.add_argument("--n-resamples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("learning-curve",
                       help="ablation grid over train sizes and timex modes")
    p.add_argument("--train", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)
    p.add_argument("--timex-model", type=Path)
    p.add_argument("--sizes", type=_int_list, default=list(experiments.DEFAULT_SIZES))
    p.add_argument("--modes", type=_str_list, default=list(experiments.DEFAULT_MODES))
    p.add_argument("--seeds", type=_int_list, default=list(experiments.DEFAULT_SEEDS))
    p.add_argument("--config", type=Path)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    return parser


def _echo_for(args: argparse.Namespace) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "command":
            continue
        if isinstance(value, Path):
            value = str(value)
        elif isinstance(value, ReferenceAnchor):
            value = value.date().isoformat()
        out[key] = value
    return out


def _sibling_run_file(out_path: Path, command: str, args) -> None:
    payload = {
        "command": command,
        "config": _echo_for(args),
        "version": experiments.runtime_version(),
    }
    Path(str(out_path) + ".run.json").write_text(
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")


def _cmd_dump_templates(args) -> int:
    text = json.dumps(templates_json(), ensure_ascii=False, indent=2)
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def _cmd_normalize(args) -> int:
    print(parse_timex(args.surface, args.anchor).iso())
    return EXIT_OK


def _cmd_gen_pairs(args) -> int:
    pairs = datasets.generate_timex_pairs(args.n, args.seed,
                                          args.explicit_fraction, args.anchor)
    datasets.split_and_write(pairs, args.out, force=args.force)
    _sibling_run_file(args.out, "gen-pairs", args)
    counts = datasets.label_counts(pairs)
    print(f"wrote {len(pairs)} pairs to {args.out} "
          f"(balance: {dict(sorted(counts.items()))})")
    return EXIT_OK


def _cmd_gen_events(args) -> int:
    config = datasets.SyntheticEventCorpusConfig(
        n_examples=args.n, intra_sentence_fraction=args.intra_fraction,
        seed=args.seed, anchor=args.anchor)
    docs = datasets.generate_event_corpus(config)
    datasets.split_and_write(docs, args.out, force=args.force)
    _sibling_run_file(args.out, "gen-events", args)
    print(f"wrote {len(docs)} documents to {args.out}")
    return EXIT_OK


def _cmd_train_timex(args) -> int:
    train = corpus_io.read_timex_pairs(args.train)
    X, y = pairs_to_xy(train)
    dev = None
    if args.dev:
        dev = pairs_to_xy(corpus_io.read_timex_pairs(args.dev))
    overrides = _load_overrides(args.config)
    model = _build_estimator(TimexPairClassifier, overrides,
                             random_state=args.seed)
    experiments.write_run_config(args.out, "train-timex", {
        **_echo_for(args), "estimator": experiments_jsonable(model.get_params()),
    })
    model.fit(X, y, dev=dev)
    model.save(args.out / "timex-model")
    experiments.write_metrics(args.out, {
        "history": model.history_,
        "train_examples": len(X),
    })
    print(f"saved timex model to {args.out / 'timex-model'}")
    return EXIT_OK


def _cmd_eval_timex(args) -> int:
    model = TimexPairClassifier.load(args.model)
    test = corpus_io.read_timex_pairs(args.test)
    X, y = pairs_to_xy(test)
    metrics = evaluate_timex(model, X, y)
    metrics["swap_consistency"] = swap_consistency(model, X)
    print(json.dumps(metrics, indent=2, sort_keys=True))
    if args.out:
        experiments.write_metrics(args.out, metrics)
        probs = model.predict_proba(X)
        pred = model.classes_[np.argmax(probs, axis=1)]
        corpus_io.write_predictions(
            args.out / "predictions.jsonl",
            ({"pair_id": str(i), "gold": g, "pred": p, "probs": list(row)}
             for i, (g, p, row) in enumerate(zip(y, pred, probs))),
            force=True)
        experiments.write_run_config(args.out, "eval-timex", _echo_for(args))
    return EXIT_OK


def _cmd_embed(args) -> int:
    model = TimexPairClassifier.load(args.model)
    vec = model.embed(args.surface)
    print(" ".join(f"{v:.6f}" for v in vec))
    return EXIT_OK


def _instances_from(path: Path):
    docs = corpus_io.read_documents(path)
    return datasets.corpus_to_instances(docs)


def _cmd_train_events(args) -> int:
    X, y = _instances_from(args.train)
    dev = None
    if args.dev:
        dev = _instances_from(args.dev)
    overrides = _load_overrides(args.config)
    model = _build_estimator(
        EventOrderingClassifier, overrides,
        mode=experiments.resolve_mode(args.mode),
        timex_model=str(args.timex_model) if args.timex_model else None,
        baseline_no_lower_bilstm=args.baseline_no_lower_bilstm,
        random_state=args.seed)
    experiments.write_run_config(args.out, "train-events", {
        **_echo_for(args), "estimator": experiments_jsonable(model.get_params()),
    })
    model.fit(X, y, dev=dev)
    model.save(args.out / "event-model")
    experiments.write_metrics(args.out, {
        "history": model.history_,
        "train_examples": len(X),
    })
    print(f"saved event model to {args.out / 'event-model'}")
    return EXIT_OK


def _cmd_eval_events(args) -> int:
    model = EventOrderingClassifier.load(args.model)
    X, y = _instances_from(args.test)
    metrics = evaluate_events(model, X, y)
    print(json.dumps(metrics, indent=2, sort_keys=True))
    if args.out:
        experiments.write_metrics(args.out, metrics)
        probs = model.predict_proba(X)
        pred = model.classes_[np.argmax(probs, axis=1)]
        corpus_io.write_predictions(
            args.out / "predictions.jsonl",
            ({"pair_id": f"{inst.doc.doc_id}:{i}", "gold": g, "pred": p,
              "probs": list(row)}
             for i, (inst, g, p, row) in enumerate(zip(X, y, pred, probs))),
            force=True)
        experiments.write_run_config(args.out, "eval-events", _echo_for(args))
    return EXIT_OK


def _cmd_distant_label(args) -> int:
    docs = corpus_io.read_documents(args.input)
    rows, stats = distant.build_distant_dataset(docs, args.anchor)
    corpus_io.write_event_pairs(args.out, rows, force=args.force)
    _sibling_run_file(args.out, "distant-label", args)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_significance(args) -> int:
    rows_a = corpus_io.read_predictions(args.preds_a)
    rows_b = corpus_io.read_predictions(args.preds_b)
    gold_a = [r["gold"] for r in rows_a]
    gold_b = [r["gold"] for r in rows_b]
    if gold_a != gold_b:
        raise TempOrderError("prediction files disagree on the gold labels")
    p = bootstrap_compare([r["pred"] for r in rows_a],
                          [r["pred"] for r in rows_b],
                          gold_a, n_resamples=args.n_resamples, seed=args.seed)
    print(f"p_value: {p:.6f}")
    return EXIT_OK


def _cmd_learning_curve(args) -> int:
    train_docs = corpus_io.read_documents(args.train)
    test_docs = corpus_io.read_documents(args.test)
    overrides = _load_overrides(args.config)
    experiments.write_run_config(args.out, "learning-curve", _echo_for(args))
    results = experiments.learning_curve(
        train_docs, test_docs,
        timex_model=str(args.timex_model) if args.timex_model else None,
        sizes=args.sizes, modes=args.modes, seeds=args.seeds,
        overrides=overrides, n_jobs=args.jobs)
    experiments.write_metrics(args.out, results, name="learning_curve.json")
    table = experiments.learning_curve_table(results)
    (args.out / "learning_curve.md").write_text(table, encoding="utf-8")
    print(table)
    return EXIT_OK


def experiments_jsonable(params: dict) -> dict:
    out = {}
    for key, value in params.items():
        if isinstance(value, tuple):
            value = list(value)
        elif isinstance(value, Path):
            value = str(value)
        elif value is not None and not isinstance(value, (str, int, float, bool,
                                                          list, dict)):
            value = repr(value)
        out[key] = value
    return out


_COMMANDS = {
    "dump-templates": _cmd_dump_templates,
    "normalize": _cmd_normalize,
    "gen-pairs": _cmd_gen_pairs,
    "gen-events": _cmd_gen_events,
    "train-timex": _cmd_train_timex,
    "eval-timex": _cmd_eval_timex,
    "embed": _cmd_embed,
    "train-events": _cmd_train_events,
    "eval-events": _cmd_eval_events,
    "distant-label": _cmd_distant_label,
    "significance": _cmd_significance,
    "learning-curve": _cmd_learning_curve,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(name)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NonFinite as exc:
        print(f"temporder: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TempOrderError, FileNotFoundError, FileExistsError,
            json.JSONDecodeError) as exc:
        print(f"temporder: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
