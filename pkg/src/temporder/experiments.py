"""Experiment orchestration: run artifacts and the ablation learning curve."""

from __future__ import annotations

import json
import logging
import subprocess
from pathlib import Path

from .datasets import corpus_to_instances
from .errors import ConfigInvalid
from .event_model import EventOrderingClassifier, evaluate_events

logger = logging.getLogger(__name__)

MODE_ALIASES = {"with": "with_timex", "without": "without_timex",
                "masked": "masked_timex"}

DEFAULT_SIZES = (2000, 3000, 4000)
DEFAULT_MODES = ("without", "masked", "with")
DEFAULT_SEEDS = (0, 1, 2)


def runtime_version() -> str:
    """Git-describable version of the working tree, or the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=10)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    from . import __version__
    return f"temporder-{__version__}"


def write_run_config(out_dir, command: str, config: dict) -> Path:
    """Echo the effective configuration + version string into the run dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": command,
        "config": config,
        "version": runtime_version(),
    }
    path = out_dir / "run.json"
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2,
                               sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_metrics(out_dir, metrics: dict, name: str = "metrics.json") -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(metrics, ensure_ascii=False, indent=2,
                               sort_keys=True) + "\n", encoding="utf-8")
    return path


def resolve_mode(mode: str) -> str:
    full = MODE_ALIASES.get(mode, mode)
    if full not in MODE_ALIASES.values():
        raise ConfigInvalid(f"unknown mode {mode!r}")
    return full


def train_event_cell(train_docs, test_docs, mode: str, size: int, seed: int,
                     timex_model=None, baseline_no_lower_bilstm: bool = False,
                     overrides: dict | None = None) -> dict:
    """Train one learning-curve cell and score it on the fixed test set."""
    X_train, y_train = corpus_to_instances(train_docs)
    if size > len(X_train):
        raise ConfigInvalid(f"requested {size} training pairs, corpus has "
                            f"{len(X_train)}")
    X_test, y_test = corpus_to_instances(test_docs)
    kwargs = dict(mode=resolve_mode(mode), timex_model=timex_model,
                  baseline_no_lower_bilstm=baseline_no_lower_bilstm,
                  random_state=seed)
    kwargs.update(overrides or {})
    model = EventOrderingClassifier(**kwargs)
    model.fit(X_train[:size], y_train[:size])
    metrics = evaluate_events(model, X_test, y_test)
    return {
        "mode": mode,
        "size": size,
        "seed": seed,
        "accuracy": metrics["accuracy"],
        "f1": metrics["f1"],
    }


def learning_curve(train_docs, test_docs, timex_model=None,
                   sizes=DEFAULT_SIZES, modes=DEFAULT_MODES,
                   seeds=DEFAULT_SEEDS, overrides: dict | None = None,
                   n_jobs: int = 1) -> dict:
    """Accuracy grid (modes x sizes), mean over seeds, per-seed cells kept."""
    jobs = [(mode, size, seed) for mode in modes for size in sizes
            for seed in seeds]
    if n_jobs != 1:
        from joblib import Parallel, delayed
        cells = Parallel(n_jobs=n_jobs)(
            delayed(train_event_cell)(train_docs, test_docs, mode, size, seed,
                                      timex_model, False, overrides)
            for mode, size, seed in jobs)
    else:
        cells = [train_event_cell(train_docs, test_docs, mode, size, seed,
                                  timex_model, False, overrides)
                 for mode, size, seed in jobs]
    by_key = {(c["mode"], c["size"], c["seed"]): c["accuracy"] for c in cells}
    grid = {
        mode: {
            size: sum(by_key[(mode, size, s)] for s in seeds) / len(seeds)
            for size in sizes
        }
        for mode in modes
    }
    return {
        "sizes": list(sizes),
        "modes": list(modes),
        "seeds": list(seeds),
        "mean_accuracy": {m: {str(s): grid[m][s] for s in sizes} for m in modes},
        "cells": cells,
    }


def learning_curve_table(results: dict) -> str:
    """Markdown table mirroring the modes-by-sizes report layout."""
    sizes = results["sizes"]
    lines = ["| model | " + " | ".join(str(s) for s in sizes) + " |",
             "|---|" + "---|" * len(sizes)]
    for mode in results["modes"]:
        accs = results["mean_accuracy"][mode]
        row = " | ".join(f"{accs[str(s)] * 100:.1f}" for s in sizes)
        lines.append(f"| {mode} timex | {row} |")
    return "\n".join(lines) + "\n"
