"""Text formats: the concept grammar, fact files and problem files.

Concept grammar::

    C ::= top | bot | NAME | not C | (C and C) | (C or C)
        | (exists R . C) | (forall R . C)
        | (atleast N R . C) | (atmost N R . C)
        | (FEATURE >= V) | (FEATURE <= V)
    R ::= NAME | inv(NAME)

Fact files hold one fact per line: ``Name(ind)``, ``role(ind1,ind2)`` or
``feature(ind, value)``; ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
import warnings
from decimal import Decimal, InvalidOperation
from pathlib import Path

from ..errors import InputError, ParseError
from .concept import (
    AND,
    ATLEAST,
    ATMOST,
    BOT,
    DEFAULT_TREE_LIMIT,
    FGEQ,
    FLEQ,
    NAME,
    NOT,
    OR,
    TOP,
    Concept,
    Role,
    at_least,
    at_most,
    atom,
    bot,
    check_tree_size,
    conj,
    disj,
    feature_geq,
    feature_leq,
    neg,
    top,
)
from .database import ConceptFact, Database, FeatureFact, FittingProblem, RoleFact

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
DECIMAL = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)"
RESERVED_PREFIXES = ("__inv_", "__fge_")
KEYWORDS = frozenset(
    {"top", "bot", "not", "and", "or", "exists", "forall", "atleast", "atmost", "inv"}
)

_TOKEN = re.compile(
    rf"\s*(?:(?P<num>{DECIMAL})(?![A-Za-z_])|(?P<op>>=|<=|[().])|(?P<id>{IDENT}))"
)


class UnknownNameWarning(UserWarning):
    pass


def _tokenize(text: str):
    pos = 0
    tokens = []
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(offset):
        line = 0
        while line + 1 < len(line_starts) and line_starts[line + 1] <= offset:
            line += 1
        return line + 1, offset - line_starts[line] + 1

    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            offset = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[offset]!r}", *where(offset))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), where(start)))
        pos = m.end()
    tokens.append(("eof", "", where(len(text))))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, *tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def name(self):
        tok = self.take()
        if tok[0] != "id" or tok[1] in KEYWORDS:
            self.fail(f"expected a name, found {tok[1] or 'end of input'!r}", tok)
        return tok[1]

    def number(self):
        tok = self.take()
        if tok[0] != "num" or not re.fullmatch(r"\d+", tok[1]):
            self.fail(f"expected a natural number, found {tok[1]!r}", tok)
        return int(tok[1])

    def role(self):
        if self.peek()[1] == "inv":
            self.take()
            self.expect("(")
            r = self.name()
            self.expect(")")
            return Role(r, True)
        return Role(self.name())

    def concept(self) -> Concept:
        tok = self.peek()
        if tok[1] == "top":
            self.take()
            return top()
        if tok[1] == "bot":
            self.take()
            return bot()
        if tok[1] == "not":
            self.take()
            return neg(self.concept())
        if tok[0] == "id" and tok[1] not in KEYWORDS:
            self.take()
            return atom(tok[1])
        if tok[1] != "(":
            self.fail(f"expected a concept, found {tok[1] or 'end of input'!r}")
        self.take()
        head = self.peek()
        if head[1] in ("exists", "forall", "atleast", "atmost"):
            self.take()
            n = self.number() if head[1] in ("atleast", "atmost") else None
            r = self.role()
            self.expect(".")
            c = self.concept()
            self.expect(")")
            if head[1] == "exists":
                return at_least(1, r, c)
            if head[1] == "forall":
                return at_most(0, r, neg(c))
            if head[1] == "atleast":
                if n < 1:
                    self.fail("atleast needs a number >= 1", head)
                return at_least(n, r, c)
            return at_most(n, r, c)
        if head[0] == "id" and self.peek(1)[1] in (">=", "<="):
            f = self.name()
            op = self.take()[1]
            vtok = self.take()
            if vtok[0] != "num":
                self.fail(f"expected a value, found {vtok[1]!r}", vtok)
            self.expect(")")
            v = Decimal(vtok[1])
            return feature_geq(f, v) if op == ">=" else feature_leq(f, v)
        left = self.concept()
        op = self.peek()
        if op[1] == ")":
            self.take()
            return left
        if op[1] not in ("and", "or"):
            self.fail(f"expected 'and' or 'or', found {op[1] or 'end of input'!r}")
        self.take()
        right = self.concept()
        self.expect(")")
        return conj(left, right) if op[1] == "and" else disj(left, right)


def parse_concept(text: str, signature=None) -> Concept:
    """Parse the concept grammar.  With ``signature``, warn on unknown names."""
    p = _Parser(text)
    c = p.concept()
    if p.peek()[0] != "eof":
        p.fail(f"trailing input {p.peek()[1]!r}")
    if signature is not None:
        from .concept import signature_of

        names, roles, feats = signature_of(c)
        unknown = sorted(
            (names - set(signature.concept_names))
            | (roles - set(signature.role_names))
            | (feats - set(signature.feature_names))
        )
        if unknown:
            warnings.warn(f"names not in the database: {unknown}", UnknownNameWarning, stacklevel=2)
    return c


def format_value(v: Decimal) -> str:
    return format(v, "f")


def render_concept(c: Concept, limit: int = DEFAULT_TREE_LIMIT) -> str:
    check_tree_size(c, limit)
    out: list[str] = []
    stack: list = [c]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        kind = item.kind
        if kind == TOP:
            out.append("top")
        elif kind == BOT:
            out.append("bot")
        elif kind == NAME:
            out.append(item.name)
        elif kind == NOT:
            out.append("not ")
            stack.append(item.child)
        elif kind in (AND, OR):
            out.append("(")
            stack.extend([")", item.right, f" {kind} ", item.left])
        elif item.is_forall():
            out.append(f"(forall {item.role} . ")
            stack.extend([")", item.child.child])
        elif item.is_exists():
            out.append(f"(exists {item.role} . ")
            stack.extend([")", item.child])
        elif kind in (ATLEAST, ATMOST):
            out.append(f"({kind} {item.n} {item.role} . ")
            stack.extend([")", item.child])
        elif kind == FGEQ:
            out.append(f"({item.name} >= {format_value(item.value)})")
        elif kind == FLEQ:
            out.append(f"({item.name} <= {format_value(item.value)})")
    return "".join(out)


_FACT = re.compile(rf"^\s*({IDENT})\s*\(\s*([^()]*?)\s*\)\s*$")


def _check_reserved(name, lineno, col):
    if name.startswith(RESERVED_PREFIXES):
        raise ParseError(f"name {name!r} uses a reserved prefix", lineno, col)


def parse_facts(text: str, allow_reserved: bool = False) -> Database:
    facts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _FACT.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError(f"malformed fact {line.strip()!r}", lineno, col)
        name = m.group(1)
        if not allow_reserved:
            _check_reserved(name, lineno, m.start(1) + 1)
        args = [a.strip() for a in m.group(2).split(",")]
        col = m.start(2) + 1
        if len(args) == 1 and re.fullmatch(IDENT, args[0]):
            facts.append(ConceptFact(name, args[0]))
        elif len(args) == 2 and re.fullmatch(IDENT, args[0]):
            if re.fullmatch(IDENT, args[1]):
                facts.append(RoleFact(name, args[0], args[1]))
            elif re.fullmatch(DECIMAL, args[1]):
                try:
                    facts.append(FeatureFact(name, args[0], Decimal(args[1])))
                except InvalidOperation:  # pragma: no cover - regex guards this
                    raise ParseError(f"bad value {args[1]!r}", lineno, col)
            else:
                raise ParseError(f"bad second argument {args[1]!r}", lineno, col)
        else:
            raise ParseError(f"bad arguments {m.group(2)!r}", lineno, col)
    return Database(facts)


def load_facts(path, allow_reserved: bool = False) -> Database:
    return parse_facts(Path(path).read_text(encoding="utf-8"), allow_reserved)


def dump_facts(db: Database) -> str:
    lines = []
    for fact in db.facts():
        if isinstance(fact, ConceptFact):
            lines.append(f"{fact.name}({fact.individual})")
        elif isinstance(fact, RoleFact):
            lines.append(f"{fact.name}({fact.source},{fact.target})")
        else:
            lines.append(f"{fact.name}({fact.individual}, {format_value(fact.value)})")
    return "\n".join(lines) + ("\n" if lines else "")


def problem_from_dict(data: dict, db: Database) -> FittingProblem:
    try:
        pos = [str(a) for a in data.get("positive", [])]
        neg_ = [str(b) for b in data.get("negative", [])]
    except (AttributeError, TypeError):
        raise InputError("problem must be an object with 'positive' and 'negative' lists")
    return FittingProblem(db, tuple(pos), tuple(neg_))


def load_problem(path, db: Database) -> FittingProblem:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno)
    return problem_from_dict(data, db)


def dump_problem(problem: FittingProblem, **extra) -> str:
    data = {"positive": list(problem.positives), "negative": list(problem.negatives)}
    data.update(extra)
    return json.dumps(data, indent=2, default=str)
