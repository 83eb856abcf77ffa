"""Classification metrics and stratified cross-validation."""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from .core.concept import Concept, bot, node_count
from .core.database import FittingProblem
from .core.semantics import eval_concept
from .errors import InputError


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    # set when precision or F1 is undefined (nothing predicted positive,
    # or no positives at all) and reported as 0
    f1_undefined: bool = False
    node_count: int | None = None
    runtime: float | None = None
    folds: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "f1_undefined": self.f1_undefined,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "node_count": self.node_count,
            "runtime": self.runtime,
        }
        if self.folds:
            out["folds"] = self.folds
        return out


def confusion(concept: Concept, problem: FittingProblem) -> tuple[int, int, int, int]:
    ext = eval_concept(concept, problem.database)
    tp = sum(1 for a in problem.positives if a in ext)
    fn = len(problem.positives) - tp
    fp = sum(1 for b in problem.negatives if b in ext)
    tn = len(problem.negatives) - fp
    return tp, fp, tn, fn


def scores(tp: int, fp: int, tn: int, fn: int) -> MetricsReport:
    total = tp + fp + tn + fn
    if total == 0:
        raise InputError("no examples to score")
    accuracy = (tp + tn) / total
    undefined = tp + fp == 0 or tp + fn == 0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(accuracy, precision, recall, f1, tp, fp, tn, fn, f1_undefined=undefined)


def evaluate(concept: Concept, problem: FittingProblem) -> MetricsReport:
    report = scores(*confusion(concept, problem))
    report.node_count = node_count(concept)
    return report


def stratified_folds(problem: FittingProblem, folds: int, seed: int = 0) -> list[tuple[list, list]]:
    """Split positives and negatives separately into ``folds`` test parts.

    Each example lands in exactly one test part; the split only depends on
    the example order and ``seed``.
    """
    n = len(problem.positives) + len(problem.negatives)
    if folds < 2:
        raise InputError("at least 2 folds are needed")
    if n < folds:
        raise InputError(f"{n} examples cannot be split into {folds} folds")
    rng = random.Random(seed)
    parts = [([], []) for _ in range(folds)]
    offset = 0
    for side, items in ((0, list(problem.positives)), (1, list(problem.negatives))):
        rng.shuffle(items)
        for i, a in enumerate(items):
            # continue where the positives stopped so fold sizes stay balanced
            parts[(offset + i) % folds][side].append(a)
        offset += len(items)
    return parts


def _summary(values):
    values = [v for v in values if v is not None]
    if not values:
        return None, None
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return statistics.fmean(values), sd


def cross_validate(problem: FittingProblem, learner, folds: int = 10, seed: int = 0) -> dict:
    """Learn on all but one fold, score on the held-out fold, for every fold.

    ``learner(train_problem)`` returns a concept or None (None scores as
    Bottom, i.e. everything predicted negative).  The result holds the
    per-fold reports and mean/std of node count, accuracy and F1.
    """
    per_fold = []
    for i, (test_pos, test_neg) in enumerate(stratified_folds(problem, folds, seed)):
        held = set(test_pos) | set(test_neg)
        train = problem.with_examples(
            [a for a in problem.positives if a not in held],
            [b for b in problem.negatives if b not in held],
        )
        t0 = time.monotonic()
        concept = learner(train)
        runtime = time.monotonic() - t0
        learned = concept if concept is not None else bot()
        report = evaluate(learned, problem.with_examples(test_pos, test_neg))
        report.runtime = runtime
        report.node_count = node_count(concept) if concept is not None else None
        per_fold.append({"fold": i, "test_size": len(held), **report.to_json()})
    out = {"folds": per_fold, "n_folds": folds, "seed": seed}
    for key in ("node_count", "accuracy", "f1"):
        mean, sd = _summary([f[key] for f in per_fold])
        out[key] = {"mean": mean, "std": sd}
    return out
