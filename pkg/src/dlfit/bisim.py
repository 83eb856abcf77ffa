"""Maximal ALCQ / ALC bisimulations by partition refinement.

The refinement starts from the partition induced by concept-name labels and
splits classes whose members have different r-profiles until a fixpoint is
reached.  An ALCQ profile counts successors per class; an ALC profile only
records which classes are reached (plain colour refinement on sets).

Every round's class map is kept in :attr:`BisimPartition.rounds`; that trace
is what :func:`separating_concept` walks backwards to build a concept that
tells two non-bisimilar individuals apart.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .core.concept import (
    Concept,
    at_least,
    at_most,
    atom,
    conj_all,
    disj_all,
    neg,
    top,
)
from .core.database import ConceptFact, Database, RoleFact
from .errors import NotSeparable

ALCQ = "ALCQ"
ALC = "ALC"


@dataclass
class BisimPartition:
    db: Database
    kind: str
    # rounds[i][k] is the class id of db.individuals[k] in rho_i
    rounds: list = field(default_factory=list)

    @property
    def final(self) -> tuple:
        return self.rounds[-1]

    @property
    def classes(self) -> dict:
        return dict(zip(self.db.individuals, self.final))

    @property
    def n_classes(self) -> int:
        return len(set(self.final)) if self.final else 0

    def class_of(self, a: str) -> int:
        return self.final[self.db.index[a]]

    def members(self) -> list[tuple]:
        """Final classes as sorted tuples of individuals, ordered by class id."""
        groups: dict[int, list] = {}
        for a, c in zip(self.db.individuals, self.final):
            groups.setdefault(c, []).append(a)
        return [tuple(groups[c]) for c in sorted(groups)]

    def same(self, a: str, b: str) -> bool:
        return self.class_of(a) == self.class_of(b)

    def split_round(self, a: str, b: str):
        """First round index in which a and b are in different classes."""
        ia, ib = self.db.index[a], self.db.index[b]
        for i, rnd in enumerate(self.rounds):
            if rnd[ia] != rnd[ib]:
                return i
        return None

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "rounds": len(self.rounds),
                "classes": self.classes,
            },
            indent=2,
            sort_keys=True,
        )


def _canonical(keys: list) -> tuple:
    """Renumber arbitrary sortable keys to dense ids in sorted key order."""
    ids = {k: i for i, k in enumerate(sorted(set(keys)))}
    return tuple(ids[k] for k in keys)


def max_bisimulation(db: Database, kind: str = ALCQ) -> BisimPartition:
    if kind not in (ALCQ, ALC):
        raise ValueError(f"unknown bisimulation kind {kind!r}")
    inds = db.individuals
    concept_names = db.concept_names
    label_keys = [tuple(n for n in concept_names if a in db.concepts[n]) for a in inds]
    current = _canonical(label_keys)
    rounds = [current]
    succ_idx = {
        r: [tuple(db.index[b] for b in db.succ(r, a)) for a in inds] for r in db.role_names
    }
    roles = db.role_names
    while True:
        keys = []
        for k in range(len(inds)):
            profs = []
            for r in roles:
                classes = [current[j] for j in succ_idx[r][k]]
                if kind == ALCQ:
                    profs.append(tuple(sorted(Counter(classes).items())))
                else:
                    profs.append(tuple(sorted(set(classes))))
            keys.append((current[k], tuple(profs)))
        nxt = _canonical(keys)
        if len(set(nxt)) == len(set(current)):
            break
        rounds.append(nxt)
        current = nxt
    return BisimPartition(db, kind, rounds)


def bisimilar(db: Database, a: str, b: str, kind: str = ALCQ) -> bool:
    return max_bisimulation(db, kind).same(a, b)


class _Extractor:
    """Builds separating concepts by induction on the elimination round."""

    def __init__(self, partition: BisimPartition):
        self.p = partition
        self.db = partition.db
        self.pair_memo: dict = {}
        self.class_memo: dict = {}
        # one representative individual per final class
        self.reps = [m[0] for m in partition.members()]

    def counts(self, rnd: int, role: str, a: str) -> Counter:
        classes = self.p.rounds[rnd]
        return Counter(classes[self.db.index[b]] for b in self.db.succ(role, a))

    def separate(self, a: str, b: str) -> Concept:
        s = self.p.split_round(a, b)
        if s is None:
            raise NotSeparable(f"{a!r} and {b!r} are bisimilar")
        ia, ib = self.db.index[a], self.db.index[b]
        key = (s, self.p.rounds[s][ia], self.p.rounds[s][ib])
        hit = self.pair_memo.get(key)
        if hit is not None:
            return hit
        if s == 0:
            la, lb = self.db.labels(a), self.db.labels(b)
            name = min(la ^ lb)
            c = atom(name) if name in la else neg(atom(name))
        else:
            c = self._step(a, b, s - 1)
        self.pair_memo[key] = c
        return c

    def _step(self, a: str, b: str, rnd: int) -> Concept:
        for r in self.db.role_names:
            ca, cb = self.counts(rnd, r, a), self.counts(rnd, r, b)
            if self.p.kind == ALCQ:
                diff = sorted(x for x in set(ca) | set(cb) if ca[x] != cb[x])
            else:
                diff = sorted(set(ca) ^ set(cb))
            if not diff:
                continue
            x = diff[0]
            d_x = self.class_concept(rnd, x)
            if self.p.kind == ALCQ:
                if ca[x] < cb[x]:
                    return at_most(ca[x], r, d_x)
                return neg(at_most(cb[x], r, d_x))
            # ALC: exactly one side reaches x
            return at_least(1, r, d_x) if ca[x] else neg(at_least(1, r, d_x))
        raise AssertionError("split without witness")  # pragma: no cover

    def class_concept(self, rnd: int, x: int) -> Concept:
        """D_X: a concept whose extension is exactly class x of round rnd."""
        key = (rnd, x)
        hit = self.class_memo.get(key)
        if hit is not None:
            return hit
        classes = self.p.rounds[rnd]
        inside = [d for d in self.reps if classes[self.db.index[d]] == x]
        outside = [e for e in self.reps if classes[self.db.index[e]] != x]
        if not outside:
            c = top()
        else:
            c = disj_all(conj_all(self.separate(d, e) for e in outside) for d in inside)
        self.class_memo[key] = c
        return c


def separating_concept(db: Database, a: str, b: str, partition: BisimPartition | None = None) -> Concept:
    """A concept C with a in C^I and b not in C^I, as a shared DAG."""
    if partition is None:
        partition = max_bisimulation(db)
    return _Extractor(partition).separate(a, b)


def separator(partition: BisimPartition) -> _Extractor:
    """Reusable extractor; shares memo tables across many pairs."""
    return _Extractor(partition)


@dataclass
class QuotientDatabase:
    db: Database
    example_map: dict
    class_of: dict
    copies: dict

    def map_problem(self, problem):
        return problem.with_database(self.db, self.example_map)


def quotient(db: Database, partition: BisimPartition | None = None) -> QuotientDatabase:
    """The ~-quotient: one group of copies per ALCQ class.

    Class [a] gets as many copies as the largest number of r-successors any
    individual has inside [a] (at least one), and copy j of [b] is an
    r-successor of every copy of [a] whenever j <= |succ_r(a) & [b]|.
    """
    if db.features:
        raise ValueError("quotient expects a database without feature facts")
    if partition is None:
        partition = max_bisimulation(db, ALCQ)
    members = partition.members()
    cls = partition.classes
    reps = [m[0] for m in members]
    copies = [1] * len(members)
    for r in db.role_names:
        for a, succ in db.forward[r].items():
            for x, n in Counter(cls[b] for b in succ).items():
                copies[x] = max(copies[x], n)

    def ind(x, i):
        return f"{reps[x]}_q{i}"

    facts = []
    for x, rep in enumerate(reps):
        for name in sorted(db.labels(rep)):
            for i in range(1, copies[x] + 1):
                facts.append(ConceptFact(name, ind(x, i)))
        for r in db.role_names:
            for y, n in sorted(Counter(cls[b] for b in db.succ(r, rep)).items()):
                for i in range(1, copies[x] + 1):
                    for j in range(1, n + 1):
                        facts.append(RoleFact(r, ind(x, i), ind(y, j)))
    individuals = [ind(x, i) for x in range(len(reps)) for i in range(1, copies[x] + 1)]
    qdb = Database(facts, individuals)
    example_map = {a: ind(cls[a], 1) for a in db.individuals}
    return QuotientDatabase(
        qdb,
        example_map,
        {ind(x, i): x for x in range(len(reps)) for i in range(1, copies[x] + 1)},
        dict(enumerate(copies)),
    )


__all__ = [
    "ALC",
    "ALCQ",
    "BisimPartition",
    "QuotientDatabase",
    "bisimilar",
    "max_bisimulation",
    "quotient",
    "separating_concept",
    "separator",
]
