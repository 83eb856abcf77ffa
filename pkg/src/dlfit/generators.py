"""Benchmark generators: hitting-set hard instances, ALCQ-vs-ALC separation
problems, and small synthetic datasets labelled by a known concept."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .bisim import ALC, ALCQ, max_bisimulation
from .core.concept import Concept
from .core.database import ConceptFact, Database, FittingProblem, RoleFact
from .core.semantics import eval_concept
from .errors import InputError


def min_hitting_set(sets) -> tuple | None:
    """Smallest H meeting every set (brute force), or None if some set is empty."""
    sets = [frozenset(s) for s in sets]
    if any(not s for s in sets):
        return None
    universe = sorted(set().union(*sets)) if sets else []
    for size in range(len(universe) + 1):
        for h in itertools.combinations(universe, size):
            hs = set(h)
            if all(hs & s for s in sets):
                return tuple(h)
    return None  # pragma: no cover


@dataclass
class HittingSetInstance:
    problem: FittingProblem
    sets: list
    k: int
    k_prime: int
    group_size: int
    min_hitting_set: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def has_hitting_set(self) -> bool:
        return len(self.min_hitting_set) <= self.k


def gen_hitting_set(sets, k: int, group_size: int | None = None) -> HittingSetInstance:
    """Database whose smallest fitting concept has k + n + 2 nodes iff ``sets``
    has a hitting set of size at most k.

    Every node of the construction is a group of ``group_size`` individuals
    (default k' + 1) joined all-to-all along each edge.  Smaller groups make
    instances cheaper but the equivalence is only guaranteed with k' + 1.
    """
    sets = [sorted(set(s)) for s in sets]
    if not sets:
        raise InputError("the set collection is empty")
    if k < 0:
        raise InputError("k must be non-negative")
    if any(not s for s in sets):
        raise InputError("every set must be non-empty")
    n = max(max(s) for s in sets)
    if set().union(*map(set, sets)) != set(range(1, n + 1)):
        raise InputError(f"the sets must cover 1..{n} exactly")
    k_prime = k + n + 2
    size = k_prime + 1 if group_size is None else group_size
    if size < 1:
        raise InputError("group size must be positive")

    groups: dict[str, list] = {}

    def group(name):
        if name not in groups:
            groups[name] = [f"{name}_m{i}" for i in range(size)]
        return groups[name]

    facts = []

    def edge(role, g1, g2):
        for x in group(g1):
            for y in group(g2):
                facts.append(RoleFact(role, x, y))

    def path(prefix, skip):
        """r-path prefix_0..prefix_n with s-detours at indices outside ``skip``."""
        for i in range(1, n + 1):
            edge("r", f"{prefix}_{i - 1}", f"{prefix}_{i}")
            if i not in skip:
                edge("s", f"{prefix}_{i - 1}", f"{prefix}d_{i}")
                edge("s", f"{prefix}d_{i}", f"{prefix}_{i}")
        for x in group(f"{prefix}_{n}"):
            facts.append(ConceptFact("A", x))

    group("a")
    group("b")
    path("a", set())
    edge("r", "a", "a_0")
    for j, s in enumerate(sets, 1):
        path(f"b{j}", set(s))
        edge("r", "a", f"b{j}_0")
        edge("r", "b", f"b{j}_0")
    individuals = [x for members in groups.values() for x in members]
    db = Database(facts, individuals)
    problem = FittingProblem(db, [groups["a"][0]], [groups["b"][0]])
    best = min_hitting_set(sets)
    meta = {
        "sets": sets,
        "n": n,
        "k": k,
        "k_prime": k_prime,
        "group_size": size,
        "faithful": size >= k_prime + 1,
        "min_hitting_set": list(best),
        "has_hitting_set": len(best) <= k,
    }
    return HittingSetInstance(problem, sets, k, k_prime, size, best, meta)


def hitting_set_witness(instance: HittingSetInstance, h=None) -> str:
    """The path concept built from a hitting set, in concept syntax."""
    h = set(instance.min_hitting_set if h is None else h)
    n = instance.metadata["n"]
    text = "A"
    for i in range(1, n + 1):
        # C_i wraps C_{i-1}; element n - i + 1 is read at depth i from the end
        if n - i + 1 in h:
            text = f"(exists s . (exists s . {text}))"
        else:
            text = f"(exists r . {text})"
    return f"(exists r . {text})"


@dataclass
class SeparationProblem:
    problem: FittingProblem
    metadata: dict = field(default_factory=dict)


def gen_alcq_separation(db: Database, seed: int = 0, merge: bool = True) -> list[SeparationProblem]:
    """Problems that ALCQ can fit but ALC cannot.

    For every ALC bisimulation class that splits into several ALCQ classes,
    one representative per ALCQ class is taken and the classes are split
    half positive, half negative (an odd class goes to the side chosen by a
    seeded coin flip).  With ``merge``, consecutive pairs of such problems
    are also combined into larger ones.
    """
    rng = random.Random(seed)
    alc = max_bisimulation(db, ALC)
    alcq = max_bisimulation(db, ALCQ)
    out = []
    for members in alc.members():
        sub = sorted({alcq.class_of(a) for a in members})
        if len(sub) < 2:
            continue
        reps = {x: min(a for a in members if alcq.class_of(a) == x) for x in sub}
        order = list(sub)
        rng.shuffle(order)
        half, odd = divmod(len(order), 2)
        extra_to_pos = bool(odd) and rng.random() < 0.5
        n_pos = half + (1 if extra_to_pos else 0)
        pos = sorted(reps[x] for x in order[:n_pos])
        neg = sorted(reps[x] for x in order[n_pos:])
        meta = {
            "alc_class": alc.class_of(members[0]),
            "alcq_classes": len(sub),
            "odd_extra": None if not odd else ("positive" if extra_to_pos else "negative"),
            "seed": seed,
        }
        out.append(SeparationProblem(FittingProblem(db, pos, neg), meta))
    if merge:
        singles = list(out)
        for p1, p2 in zip(singles[::2], singles[1::2]):
            merged = FittingProblem(
                db,
                p1.problem.positives + p2.problem.positives,
                p1.problem.negatives + p2.problem.negatives,
            )
            out.append(SeparationProblem(merged, {"merged_from": [p1.metadata["alc_class"], p2.metadata["alc_class"]], "seed": seed}))
    return out


def random_database(
    n_individuals: int,
    concept_names=("A", "B"),
    role_names=("r",),
    p_label: float = 0.4,
    p_edge: float = 0.25,
    seed: int = 0,
) -> Database:
    rng = random.Random(seed)
    inds = [f"e{i}" for i in range(n_individuals)]
    facts = []
    for a in inds:
        for name in concept_names:
            if rng.random() < p_label:
                facts.append(ConceptFact(name, a))
        for r in role_names:
            for b in inds:
                if rng.random() < p_edge:
                    facts.append(RoleFact(r, a, b))
    return Database(facts, inds)


def star_database(n_centers: int, max_successors: int = 4, seed: int = 0, role: str = "r") -> Database:
    """Centers with a few private successors, each labelled A at random."""
    rng = random.Random(seed)
    facts = []
    inds = []
    for c in range(n_centers):
        center = f"c{c}"
        inds.append(center)
        for j in range(rng.randint(0, max_successors)):
            leaf = f"c{c}_s{j}"
            inds.append(leaf)
            facts.append(RoleFact(role, center, leaf))
            if rng.random() < 0.5:
                facts.append(ConceptFact("A", leaf))
    return Database(facts, inds)


def labelled_by(concept: Concept, db: Database, individuals=None) -> FittingProblem:
    """Examples labelled by ``concept``: members positive, the rest negative."""
    inds = list(db.individuals if individuals is None else individuals)
    ext = eval_concept(concept, db)
    return FittingProblem(db, [a for a in inds if a in ext], [a for a in inds if a not in ext])
