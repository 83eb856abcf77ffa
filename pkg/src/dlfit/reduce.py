"""Reductions that remove inverse roles and feature comparisons.

Inverse roles become fresh forward roles ``__inv_<r>`` holding the reversed
edges.  Features become fresh concept names ``__fge_<f>_<v>`` marking the
individuals whose value is at least ``v``.  Both are undone on learned
concepts by :func:`restore_inverse_roles` and :func:`restore_features`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal

from .core.concept import (
    ATLEAST,
    ATMOST,
    FGEQ,
    FLEQ,
    NAME,
    NOT,
    Concept,
    Role,
    atom,
    bot,
    conj,
    feature_geq,
    feature_leq,
    neg,
    rebuild,
    transform,
)
from .core.database import ConceptFact, Database, FeatureFact, RoleFact
from .core.syntax import RESERVED_PREFIXES
from .errors import InputError

INV_PREFIX = "__inv_"
FGE_PREFIX = "__fge_"
SNAP_UP = "up"
SNAP_RAW = "raw"


@dataclass
class ReductionContext:
    # original role -> fresh reversed role
    role_map: dict = field(default_factory=dict)
    # feature -> ordered list of (threshold, fresh concept name)
    threshold_map: dict = field(default_factory=dict)
    # features carried by every individual of the original database
    total_features: frozenset = frozenset()
    # feature -> sorted observed values in the original database
    observed: dict = field(default_factory=dict)

    @property
    def fresh_names(self) -> dict:
        return {name: (f, v) for f, pairs in self.threshold_map.items() for v, name in pairs}

    @property
    def inverse_of(self) -> dict:
        return {fresh: r for r, fresh in self.role_map.items()}

    def merged(self, other: "ReductionContext") -> "ReductionContext":
        return ReductionContext(
            {**self.role_map, **other.role_map},
            {**self.threshold_map, **other.threshold_map},
            self.total_features | other.total_features,
            {**self.observed, **other.observed},
        )

    def to_json(self) -> dict:
        return {
            "role_map": self.role_map,
            "thresholds": {
                f: [[format(v, "f"), name] for v, name in pairs]
                for f, pairs in self.threshold_map.items()
            },
        }


def _reject_reserved(db: Database, names=None):
    names = db.concept_names + db.role_names + db.feature_names if names is None else names
    for name in names:
        if name.startswith(RESERVED_PREFIXES):
            raise InputError(f"name {name!r} collides with a reserved fresh-name prefix")


def add_inverse_roles(db: Database) -> tuple[Database, ReductionContext]:
    _reject_reserved(db)
    role_map = {r: INV_PREFIX + r for r in db.role_names}
    extra = [
        RoleFact(role_map[r], b, a) for r in db.role_names for a, bs in db.forward[r].items() for b in bs
    ]
    return db.union(extra), ReductionContext(role_map=role_map)


def inverse_to_fresh(concept: Concept, ctx: ReductionContext) -> Concept:
    """Forward translation: r^- becomes the fresh role for r."""

    def fn(node, kids):
        if node.kind in (ATLEAST, ATMOST) and node.role.inverse:
            fresh = ctx.role_map.get(node.role.name, INV_PREFIX + node.role.name)
            return _with_role(node, Role(fresh), kids)
        return rebuild(node, kids)

    return transform(concept, fn)


def restore_inverse_roles(concept: Concept, ctx: ReductionContext) -> Concept:
    back = ctx.inverse_of

    def fn(node, kids):
        if node.kind in (ATLEAST, ATMOST) and node.role.name in back:
            return _with_role(node, Role(back[node.role.name], not node.role.inverse), kids)
        return rebuild(node, kids)

    return transform(concept, fn)


def _with_role(node: Concept, role: Role, kids: tuple) -> Concept:
    from .core.concept import at_least, at_most

    make = at_least if node.kind == ATLEAST else at_most
    return make(node.n, role, kids[0])


def select_thresholds(db: Database, f: str, n_f: int, snap: str = SNAP_UP) -> list[Decimal]:
    """Split [min, max] of the observed values into n_f equal intervals.

    Returns the minimum plus the n_f - 1 interior cut points, each snapped up
    to the smallest observed value at or above it (``snap="up"``) or kept as
    is (``snap="raw"``).
    """
    if n_f < 1:
        raise ValueError("n_f must be at least 1")
    values = db.observed_values(f)
    if not values:
        return []
    if n_f >= len(values):
        return list(values)
    lo, hi = values[0], values[-1]
    width = (hi - lo) / n_f
    out = {lo}
    for i in range(1, n_f):
        cut = lo + width * i
        if snap == SNAP_UP:
            out.add(next(v for v in values if v >= cut))
        elif snap == SNAP_RAW:
            out.add(cut)
        else:
            raise ValueError(f"unknown snap mode {snap!r}")
    return sorted(out)


def _value_tag(v: Decimal) -> str:
    text = format(v, "f")
    return text.replace("-", "m").replace(".", "p")


def threshold_name(f: str, v: Decimal) -> str:
    return f"{FGE_PREFIX}{f}_{_value_tag(v)}"


def booleanize_features(db: Database, thresholds: dict) -> tuple[Database, ReductionContext]:
    """Replace feature facts by fresh names A_{f>=v} for the given thresholds."""
    # fresh role names from an earlier inverse reduction are fine here
    _reject_reserved(db, db.concept_names + db.feature_names)
    threshold_map = {}
    extra = []
    for f, vs in thresholds.items():
        vs = [v if isinstance(v, Decimal) else Decimal(str(v)) for v in vs]
        if any(x >= y for x, y in zip(vs, vs[1:])):
            raise ValueError(f"thresholds for {f!r} must be strictly increasing")
        pairs = [(v, threshold_name(f, v)) for v in vs]
        threshold_map[f] = pairs
        for a, value in db.features.get(f, {}).items():
            for v, name in pairs:
                if value >= v:
                    extra.append(ConceptFact(name, a))
    kept = [fact for fact in db.facts() if not isinstance(fact, FeatureFact)]
    out = Database(kept + extra, db.individuals)
    total = frozenset(f for f, vals in db.features.items() if len(vals) == len(db.individuals))
    observed = {f: db.observed_values(f) for f in db.features}
    return out, ReductionContext(threshold_map=threshold_map, total_features=total, observed=observed)


def restore_features(concept: Concept, ctx: ReductionContext, simplify: bool = True) -> Concept:
    """A_{f>=v} becomes (f >= v).

    With ``simplify``, not A_{f>=v} becomes (f <= w) for the largest observed
    w below v, but only for features every individual carries (otherwise
    individuals without a value would change sides).
    """
    fresh = ctx.fresh_names

    def fn(node, kids):
        if node.kind == NAME and node.name in fresh:
            f, v = fresh[node.name]
            return feature_geq(f, v)
        if simplify and node.kind == NOT and node.child.kind == NAME and node.child.name in fresh:
            f, v = fresh[node.child.name]
            if f in ctx.total_features:
                below = [w for w in ctx.observed.get(f, ()) if w < v]
                if below:
                    return feature_leq(f, below[-1])
        return rebuild(node, kids)

    return transform(concept, fn)


def features_to_names(concept: Concept, ctx: ReductionContext) -> Concept:
    """Forward translation of feature comparisons into threshold names.

    Exact when each feature's thresholds are all of its observed values.
    """

    def fn(node, kids):
        if node.kind not in (FGEQ, FLEQ):
            return rebuild(node, kids)
        pairs = ctx.threshold_map.get(node.name, [])
        if not pairs:
            return bot()
        if node.kind == FGEQ:
            above = [name for v, name in pairs if v >= node.value]
            return atom(above[0]) if above else bot()
        has_value = atom(pairs[0][1])
        above = [name for v, name in pairs if v > node.value]
        if node.value < pairs[0][0]:
            return bot()
        return conj(has_value, neg(atom(above[0]))) if above else has_value

    return transform(concept, fn)


def is_fresh(name: str) -> bool:
    return bool(re.match(f"^({INV_PREFIX}|{FGE_PREFIX})", name))
