"""Closed-world fact databases and fitting problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, NamedTuple

from ..errors import DatabaseError, InputError
from .concept import as_role


class ConceptFact(NamedTuple):
    name: str
    individual: str


class RoleFact(NamedTuple):
    name: str
    source: str
    target: str


class FeatureFact(NamedTuple):
    name: str
    individual: str
    value: Decimal


@dataclass(frozen=True)
class Signature:
    concept_names: frozenset
    role_names: frozenset
    feature_names: frozenset
    # feature -> sorted distinct observed values
    feature_domains: dict = field(default_factory=dict, compare=False)


class Database:
    """An immutable set of unary, binary and feature facts.

    ``individuals`` declares extra members of the active domain that occur in
    no fact; reductions use it so that dropping facts never shrinks the domain.
    """

    def __init__(self, facts: Iterable = (), individuals: Iterable[str] = ()):
        concepts: dict[str, set] = {}
        forward: dict[str, dict[str, set]] = {}
        features: dict[str, dict[str, Decimal]] = {}
        adom: set[str] = set(individuals)
        n_facts = 0
        for fact in facts:
            if isinstance(fact, ConceptFact):
                s = concepts.setdefault(fact.name, set())
                if fact.individual not in s:
                    s.add(fact.individual)
                    n_facts += 1
                adom.add(fact.individual)
            elif isinstance(fact, RoleFact):
                s = forward.setdefault(fact.name, {}).setdefault(fact.source, set())
                if fact.target not in s:
                    s.add(fact.target)
                    n_facts += 1
                adom.add(fact.source)
                adom.add(fact.target)
            elif isinstance(fact, FeatureFact):
                value = fact.value if isinstance(fact.value, Decimal) else Decimal(str(fact.value))
                per = features.setdefault(fact.name, {})
                old = per.get(fact.individual)
                if old is not None and old != value:
                    raise DatabaseError(
                        f"individual {fact.individual!r} has two values for feature {fact.name!r}"
                    )
                if old is None:
                    n_facts += 1
                per[fact.individual] = value
                adom.add(fact.individual)
            else:
                raise TypeError(f"not a fact: {fact!r}")

        clash = (set(concepts) & set(forward)) | (set(concepts) & set(features)) | (
            set(forward) & set(features)
        )
        if clash:
            raise DatabaseError(f"names used with two different kinds: {sorted(clash)}")

        self.concepts = {k: frozenset(v) for k, v in concepts.items()}
        self.forward = {
            r: {a: tuple(sorted(bs)) for a, bs in succ.items()} for r, succ in forward.items()
        }
        backward: dict[str, dict[str, list]] = {}
        for r, succ in self.forward.items():
            back = backward.setdefault(r, {})
            for a, bs in succ.items():
                for b in bs:
                    back.setdefault(b, []).append(a)
        self.backward = {
            r: {b: tuple(sorted(as_)) for b, as_ in pred.items()} for r, pred in backward.items()
        }
        self.features = features
        self.individuals = tuple(sorted(adom))
        self.adom = frozenset(adom)
        self.index = {a: i for i, a in enumerate(self.individuals)}
        self.n_facts = n_facts
        self._cache: dict = {}

    def __len__(self):
        return self.n_facts

    def __repr__(self):
        return f"Database({len(self.individuals)} individuals, {self.n_facts} facts)"

    def __eq__(self, other):
        if not isinstance(other, Database):
            return NotImplemented
        return self.adom == other.adom and set(self.facts()) == set(other.facts())

    def __hash__(self):
        return hash((self.adom, frozenset(self.facts())))

    @property
    def role_names(self) -> list[str]:
        return sorted(self.forward)

    @property
    def concept_names(self) -> list[str]:
        return sorted(self.concepts)

    @property
    def feature_names(self) -> list[str]:
        return sorted(self.features)

    @property
    def signature(self) -> Signature:
        return Signature(
            frozenset(self.concepts),
            frozenset(self.forward),
            frozenset(self.features),
            {f: sorted(set(v.values())) for f, v in self.features.items()},
        )

    def facts(self):
        for name in sorted(self.concepts):
            for a in sorted(self.concepts[name]):
                yield ConceptFact(name, a)
        for r in sorted(self.forward):
            for a in sorted(self.forward[r]):
                for b in self.forward[r][a]:
                    yield RoleFact(r, a, b)
        for f in sorted(self.features):
            for a in sorted(self.features[f]):
                yield FeatureFact(f, a, self.features[f][a])

    def labels(self, a: str) -> frozenset:
        return frozenset(n for n, ext in self.concepts.items() if a in ext)

    def succ(self, role, a: str) -> tuple:
        role = as_role(role)
        table = self.backward if role.inverse else self.forward
        return table.get(role.name, {}).get(a, ())

    def feature_value(self, f: str, a: str):
        return self.features.get(f, {}).get(a)

    def observed_values(self, f: str) -> list[Decimal]:
        return sorted(set(self.features.get(f, {}).values()))

    def mask(self, individuals: Iterable[str]) -> int:
        m = 0
        for a in individuals:
            i = self.index.get(a)
            if i is not None:
                m |= 1 << i
        return m

    def unmask(self, m: int) -> frozenset:
        out = []
        i = 0
        while m:
            if m & 1:
                out.append(self.individuals[i])
            m >>= 1
            i += 1
        return frozenset(out)

    def full_mask(self) -> int:
        return (1 << len(self.individuals)) - 1

    def succ_masks(self, role) -> list[int]:
        """Per individual (in index order) the bitmask of its R-successors."""
        role = as_role(role)
        key = ("succ", role)
        cached = self._cache.get(key)
        if cached is None:
            cached = [self.mask(self.succ(role, a)) for a in self.individuals]
            self._cache[key] = cached
        return cached

    def restrict(self, keep_facts) -> "Database":
        """New database with the facts satisfying ``keep_facts``; domain kept."""
        return Database((f for f in self.facts() if keep_facts(f)), self.individuals)

    def union(self, facts: Iterable, individuals: Iterable[str] = ()) -> "Database":
        return Database(list(self.facts()) + list(facts), list(self.individuals) + list(individuals))


@dataclass(frozen=True)
class FittingProblem:
    database: Database
    positives: tuple
    negatives: tuple

    def __post_init__(self):
        object.__setattr__(self, "positives", tuple(dict.fromkeys(self.positives)))
        object.__setattr__(self, "negatives", tuple(dict.fromkeys(self.negatives)))
        missing = [a for a in self.positives + self.negatives if a not in self.database.adom]
        if missing:
            raise InputError(f"examples not in the database: {missing}")
        both = set(self.positives) & set(self.negatives)
        if both:
            raise InputError(f"individuals are both positive and negative: {sorted(both)}")

    @property
    def examples(self) -> tuple:
        return self.positives + self.negatives

    def with_examples(self, positives, negatives) -> "FittingProblem":
        return FittingProblem(self.database, tuple(positives), tuple(negatives))

    def with_database(self, db: Database, mapping=None) -> "FittingProblem":
        if mapping is None:
            return FittingProblem(db, self.positives, self.negatives)
        return FittingProblem(
            db,
            tuple(mapping[a] for a in self.positives),
            tuple(mapping[b] for b in self.negatives),
        )
