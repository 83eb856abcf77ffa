"""ALCQI(f) concepts as hash-consed DAGs.

Every constructor goes through :func:`_make`, which returns the canonical
object for a given (kind, payload, children) key.  Structurally equal
concepts are therefore identical objects, so equality and hashing are by
identity and shared subconcepts are shared in memory.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Iterable, Iterator

from ..errors import ConceptTooLarge

TOP = "top"
BOT = "bot"
NAME = "name"
NOT = "not"
AND = "and"
OR = "or"
ATLEAST = "atleast"
ATMOST = "atmost"
FGEQ = "fgeq"
FLEQ = "fleq"

LEAF_KINDS = frozenset({TOP, BOT, NAME, FGEQ, FLEQ})
RESTRICTION_KINDS = frozenset({ATLEAST, ATMOST})

DEFAULT_TREE_LIMIT = 10**6


@dataclass(frozen=True, order=True)
class Role:
    name: str
    inverse: bool = False

    def __str__(self):
        return f"inv({self.name})" if self.inverse else self.name

    def inv(self) -> "Role":
        return Role(self.name, not self.inverse)


def as_role(r) -> Role:
    if isinstance(r, Role):
        return r
    return Role(str(r))


_INTERN: "weakref.WeakValueDictionary[tuple, Concept]" = weakref.WeakValueDictionary()
_LOCK = threading.Lock()


class Concept:
    __slots__ = ("kind", "name", "role", "n", "value", "children", "__weakref__")

    kind: str
    name: str | None
    role: Role | None
    n: int | None
    value: Decimal | None
    children: tuple

    def __setattr__(self, key, value):
        raise AttributeError("Concept is immutable")

    def __reduce__(self):
        return (_make, (self.kind, self.name, self.role, self.n, self.value, self.children))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    @property
    def child(self) -> "Concept":
        return self.children[0]

    @property
    def left(self) -> "Concept":
        return self.children[0]

    @property
    def right(self) -> "Concept":
        return self.children[1]

    def is_forall(self) -> bool:
        """True for the pattern (<= 0 R . not C), printed as (forall R . C)."""
        return self.kind == ATMOST and self.n == 0 and self.children[0].kind == NOT

    def is_exists(self) -> bool:
        return self.kind == ATLEAST and self.n == 1

    def __repr__(self):
        from .syntax import render_concept

        try:
            return f"Concept({render_concept(self, limit=2000)!r})"
        except ConceptTooLarge:
            return f"Concept(<{self.kind} DAG, {len(dag_nodes(self))} distinct nodes>)"

    # Operators as light sugar for tests and notebooks.
    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)


def _make(kind, name=None, role=None, n=None, value=None, children=()) -> Concept:
    key = (kind, name, role, n, value, children)
    with _LOCK:
        c = _INTERN.get(key)
        if c is None:
            c = object.__new__(Concept)
            for slot, v in (
                ("kind", kind),
                ("name", name),
                ("role", role),
                ("n", n),
                ("value", value),
                ("children", children),
            ):
                object.__setattr__(c, slot, v)
            _INTERN[key] = c
    return c


def _dec(v) -> Decimal:
    if isinstance(v, Decimal):
        return v
    if isinstance(v, float):
        return Decimal(repr(v))
    return Decimal(v)


def top() -> Concept:
    return _make(TOP)


def bot() -> Concept:
    return _make(BOT)


def atom(name: str) -> Concept:
    return _make(NAME, name=name)


def neg(c: Concept) -> Concept:
    return _make(NOT, children=(c,))


def conj(c: Concept, d: Concept) -> Concept:
    return _make(AND, children=(c, d))


def disj(c: Concept, d: Concept) -> Concept:
    return _make(OR, children=(c, d))


def at_least(n: int, role, c: Concept) -> Concept:
    if n < 1:
        raise ValueError(f"atleast needs n >= 1, got {n}")
    return _make(ATLEAST, role=as_role(role), n=int(n), children=(c,))


def at_most(n: int, role, c: Concept) -> Concept:
    if n < 0:
        raise ValueError(f"atmost needs n >= 0, got {n}")
    return _make(ATMOST, role=as_role(role), n=int(n), children=(c,))


def exists(role, c: Concept) -> Concept:
    return at_least(1, role, c)


def forall(role, c: Concept) -> Concept:
    return at_most(0, role, neg(c))


def feature_geq(f: str, v) -> Concept:
    return _make(FGEQ, name=f, value=_dec(v))


def feature_leq(f: str, v) -> Concept:
    return _make(FLEQ, name=f, value=_dec(v))


def conj_all(cs: Iterable[Concept]) -> Concept:
    """Right-nested conjunction; the empty conjunction is top."""
    items = list(dict.fromkeys(cs))
    if not items:
        return top()
    out = items[-1]
    for c in reversed(items[:-1]):
        out = conj(c, out)
    return out


def disj_all(cs: Iterable[Concept]) -> Concept:
    """Right-nested disjunction; the empty disjunction is bot."""
    items = list(dict.fromkeys(cs))
    if not items:
        return bot()
    out = items[-1]
    for c in reversed(items[:-1]):
        out = disj(c, out)
    return out


def rebuild(c: Concept, children: tuple) -> Concept:
    """Same node as ``c`` with new children."""
    if children == c.children:
        return c
    return _make(c.kind, c.name, c.role, c.n, c.value, tuple(children))


def dag_nodes(c: Concept) -> list[Concept]:
    """Distinct subconcepts of ``c`` in post-order (children first)."""
    seen: set[int] = set()
    order: list[Concept] = []
    stack = [(c, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for ch in reversed(node.children):
            if id(ch) not in seen:
                stack.append((ch, False))
    return order


def transform(c: Concept, fn: Callable[[Concept, tuple], Concept]) -> Concept:
    """Bottom-up rewrite. ``fn(node, new_children)`` returns the replacement."""
    memo: dict[int, Concept] = {}
    for node in dag_nodes(c):
        kids = tuple(memo[id(ch)] for ch in node.children)
        memo[id(node)] = fn(node, kids)
    return memo[id(c)]


def node_count(c: Concept) -> int:
    """Nodes of the syntax tree (DAG sharing expanded).

    Numbers inside restrictions add nothing; the forall pattern
    (<= 0 R . not C) is a single node, as it is printed.
    """
    memo: dict[int, int] = {}
    for node in dag_nodes(c):
        if node.is_forall():
            memo[id(node)] = 1 + memo[id(node.child.child)]
        else:
            memo[id(node)] = 1 + sum(memo[id(ch)] for ch in node.children)
    return memo[id(c)]


def string_size(c: Concept, strict: bool = False) -> int:
    """node_count plus the unary cost of restriction numbers.

    Non-strict: exists/forall sugar pays no number.  Strict: every
    restriction pays its number (exists pays 1, forall pays 0).
    """
    memo: dict[int, int] = {}
    for node in dag_nodes(c):
        if node.is_forall():
            memo[id(node)] = 1 + memo[id(node.child.child)]
            continue
        size = 1 + sum(memo[id(ch)] for ch in node.children)
        if node.kind in RESTRICTION_KINDS and (strict or not node.is_exists()):
            size += node.n
        memo[id(node)] = size
    return memo[id(c)]


def check_tree_size(c: Concept, limit: int = DEFAULT_TREE_LIMIT) -> int:
    size = node_count(c)
    if size > limit:
        raise ConceptTooLarge(f"tree expansion has {size} nodes, limit is {limit}")
    return size


def signature_of(c: Concept) -> tuple[set[str], set[str], set[str]]:
    """(concept names, role names, feature names) used in ``c``."""
    names, roles, feats = set(), set(), set()
    for node in dag_nodes(c):
        if node.kind == NAME:
            names.add(node.name)
        elif node.kind in RESTRICTION_KINDS:
            roles.add(node.role.name)
        elif node.kind in (FGEQ, FLEQ):
            feats.add(node.name)
    return names, roles, feats


def iter_tree(c: Concept) -> Iterator[Concept]:
    """Pre-order walk of the expanded tree (may be exponential on DAGs)."""
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))
