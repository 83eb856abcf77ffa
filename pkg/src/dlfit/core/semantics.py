"""Closed-world evaluation of concepts and the fitting check."""

from __future__ import annotations

from dataclasses import dataclass

from .concept import (
    AND,
    ATLEAST,
    ATMOST,
    BOT,
    FGEQ,
    FLEQ,
    NAME,
    NOT,
    OR,
    TOP,
    Concept,
    dag_nodes,
)
from .database import Database, FittingProblem


def eval_mask(concept: Concept, db: Database) -> int:
    """Extension of ``concept`` as a bitmask over ``db.individuals``."""
    full = db.full_mask()
    memo: dict[int, int] = {}
    for node in dag_nodes(concept):
        kind = node.kind
        if kind == TOP:
            m = full
        elif kind == BOT:
            m = 0
        elif kind == NAME:
            m = db.mask(db.concepts.get(node.name, ()))
        elif kind == NOT:
            m = full & ~memo[id(node.child)]
        elif kind == AND:
            m = memo[id(node.left)] & memo[id(node.right)]
        elif kind == OR:
            m = memo[id(node.left)] | memo[id(node.right)]
        elif kind in (ATLEAST, ATMOST):
            inner = memo[id(node.child)]
            succ = db.succ_masks(node.role)
            n = node.n
            m = 0
            if kind == ATLEAST:
                for i, s in enumerate(succ):
                    if (s & inner).bit_count() >= n:
                        m |= 1 << i
            else:
                for i, s in enumerate(succ):
                    if (s & inner).bit_count() <= n:
                        m |= 1 << i
        elif kind in (FGEQ, FLEQ):
            values = db.features.get(node.name, {})
            v = node.value
            if kind == FGEQ:
                m = db.mask(a for a, w in values.items() if w >= v)
            else:
                m = db.mask(a for a, w in values.items() if w <= v)
        else:  # pragma: no cover
            raise ValueError(f"unknown concept kind {kind}")
        memo[id(node)] = m
    return memo[id(concept)]


def eval_concept(concept: Concept, db: Database) -> frozenset:
    """The extension C^I as a set of individual names."""
    return db.unmask(eval_mask(concept, db))


@dataclass(frozen=True)
class FitCheck:
    """Outcome of checking a concept against labelled examples.

    ``positives[i]`` / ``negatives[i]`` tell whether the i-th example is
    classified correctly.
    """

    positives: tuple
    negatives: tuple

    @property
    def ok(self) -> bool:
        return all(self.positives) and all(self.negatives)

    def __bool__(self):
        return self.ok

    @property
    def n_correct(self) -> int:
        return sum(self.positives) + sum(self.negatives)

    @property
    def vector(self) -> tuple:
        return self.positives + self.negatives


def fits(concept: Concept, problem: FittingProblem) -> FitCheck:
    db = problem.database
    m = eval_mask(concept, db)
    pos = tuple(bool(m >> db.index[a] & 1) for a in problem.positives)
    neg = tuple(not (m >> db.index[b] & 1) for b in problem.negatives)
    return FitCheck(pos, neg)
