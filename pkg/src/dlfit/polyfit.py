"""Polynomial-time fitting through maximal bisimulations.

A fitting ALCQ concept exists iff no positive example is bisimilar to a
negative one.  When it does not, keeping per bisimulation class whichever
side has more examples (positives on ties) yields a largest separable
subset, and the disjunction over kept positives of conjunctions of pairwise
separators fits it.  The resulting concepts are DAGs that overfit by design.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bisim import ALCQ, BisimPartition, max_bisimulation, separator
from .core.concept import Concept, conj_all, disj_all
from .core.database import FittingProblem
from .errors import NotSeparable


def fitting_exists(problem: FittingProblem, kind: str = ALCQ, partition: BisimPartition | None = None) -> bool:
    p = partition or max_bisimulation(problem.database, kind)
    pos_classes = {p.class_of(a) for a in problem.positives}
    return not any(p.class_of(b) in pos_classes for b in problem.negatives)


@dataclass
class ApproxSelection:
    problem: FittingProblem
    kept_positives: tuple
    kept_negatives: tuple
    # class id -> (|P & X|, |N & X|, "positive" | "negative")
    class_report: dict = field(default_factory=dict)

    @property
    def n_kept(self) -> int:
        return len(self.kept_positives) + len(self.kept_negatives)

    def as_problem(self) -> FittingProblem:
        return self.problem.with_examples(self.kept_positives, self.kept_negatives)


def approx_select(problem: FittingProblem, partition: BisimPartition | None = None) -> ApproxSelection:
    p = partition or max_bisimulation(problem.database, ALCQ)
    pos_by: dict[int, list] = {}
    neg_by: dict[int, list] = {}
    for a in problem.positives:
        pos_by.setdefault(p.class_of(a), []).append(a)
    for b in problem.negatives:
        neg_by.setdefault(p.class_of(b), []).append(b)
    keep_pos, keep_neg = set(), set()
    report = {}
    for x in sorted(set(pos_by) | set(neg_by)):
        ps, ns = pos_by.get(x, []), neg_by.get(x, [])
        if len(ps) >= len(ns):
            keep_pos.update(ps)
            report[x] = (len(ps), len(ns), "positive")
        else:
            keep_neg.update(ns)
            report[x] = (len(ps), len(ns), "negative")
    return ApproxSelection(
        problem,
        tuple(a for a in problem.positives if a in keep_pos),
        tuple(b for b in problem.negatives if b in keep_neg),
        report,
    )


def construct_fitting(
    problem: FittingProblem | ApproxSelection, partition: BisimPartition | None = None
) -> Concept:
    """Disjunction over positives of the conjunction of their separators."""
    if isinstance(problem, ApproxSelection):
        problem = problem.as_problem()
    p = partition or max_bisimulation(problem.database, ALCQ)
    if not fitting_exists(problem, partition=p):
        raise NotSeparable("some positive example is bisimilar to a negative one")
    ext = separator(p)
    # one representative per class suffices: separators only depend on classes
    pos = list(dict.fromkeys(problem.positives, None))
    neg_reps = {}
    for b in problem.negatives:
        neg_reps.setdefault(p.class_of(b), b)
    pos_reps = {}
    for a in pos:
        pos_reps.setdefault(p.class_of(a), a)
    return disj_all(
        conj_all(ext.separate(a, b) for b in neg_reps.values()) for a in pos_reps.values()
    )
