"""CNF container with a named-variable map and DIMACS I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError


@dataclass
class CnfInstance:
    n_vars: int = 0
    clauses: list = field(default_factory=list)
    # variable index -> (family, *indices); index 0 unused
    meaning: list = field(default_factory=lambda: [None])
    var_map: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    # decode context that is not part of the JSON metadata (database, units)
    payload: dict = field(default_factory=dict)

    def var(self, *key) -> int:
        """Variable for ``key``, allocated on first use."""
        v = self.var_map.get(key)
        if v is None:
            self.n_vars += 1
            v = self.n_vars
            self.var_map[key] = v
            self.meaning.append(key)
        return v

    def fresh(self, family: str = "aux") -> int:
        self.n_vars += 1
        self.meaning.append((family, self.n_vars))
        return self.n_vars

    def lookup(self, *key):
        return self.var_map.get(key)

    def add(self, clause) -> None:
        self.clauses.append(tuple(clause))

    def extend(self, clauses) -> None:
        self.clauses.extend(tuple(c) for c in clauses)

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def copy(self) -> "CnfInstance":
        return CnfInstance(
            self.n_vars,
            list(self.clauses),
            list(self.meaning),
            dict(self.var_map),
            dict(self.metadata),
            self.payload,
        )

    def with_clauses(self, extra) -> "CnfInstance":
        out = self.copy()
        out.extend(extra)
        return out

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"

    def var_map_json(self) -> str:
        return json.dumps(
            {str(i): [str(p) for p in key] for i, key in enumerate(self.meaning) if key is not None},
            indent=1,
        )

    def check(self) -> None:
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise InputError(f"clause {c} references an unallocated variable")


def parse_dimacs(text: str) -> CnfInstance:
    n_vars = n_clauses = None
    clauses: list = []
    current: list = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad DIMACS header on line {lineno}: {line!r}")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        if n_vars is None:
            raise InputError("DIMACS clause before the 'p cnf' header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > n_vars:
                    raise InputError(f"literal {lit} exceeds declared variable count {n_vars}")
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if n_vars is None:
        raise InputError("missing 'p cnf' header")
    if n_clauses is not None and n_clauses != len(clauses):
        raise InputError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    cnf = CnfInstance(n_vars=n_vars, clauses=clauses)
    cnf.meaning = [None] + [("v", i) for i in range(1, n_vars + 1)]
    return cnf
