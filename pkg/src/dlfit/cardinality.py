"""Sequential-counter encodings of cardinality constraints.

``counter_outputs`` builds partial-sum variables s(p, t) meaning "at least t
of the first p (weighted) literals are true", defined in both directions so
that the outputs can be used under either polarity.  Constants are folded:
outputs may be ``True``/``False`` instead of variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import CnfInstance

ATLEAST = "atleast"
ATMOST = "atmost"


def _clause(*lits):
    """Clause over literals/constants; None if trivially satisfied."""
    out = []
    for lit in lits:
        if lit is True:
            return None
        if lit is False:
            continue
        out.append(lit)
    return out


def neg_lit(lit):
    if lit is True:
        return False
    if lit is False:
        return True
    return -lit


def counter_outputs(cnf: CnfInstance, literals, top: int, weights=None, family="cnt") -> list:
    """outputs[t] (1 <= t <= top) is equivalent to sum(weights of true literals) >= t.

    outputs[0] is True.  Weights default to 1 and are capped at ``top``.
    """
    literals = list(literals)
    weights = [1] * len(literals) if weights is None else [min(w, top) for w in weights]
    # prev[t]: at least t among the literals processed so far
    prev = [True] + [False] * top
    reach = 0
    for lit, w in zip(literals, weights):
        if w <= 0:
            continue
        reach = min(top, reach + w)
        cur = [True] + [False] * top
        for t in range(1, reach + 1):
            a = prev[t]
            b = prev[t - w] if t - w >= 0 else True
            # cur[t] <-> a or (lit and b)
            if a is True:
                cur[t] = True
                continue
            if a is False and b is False:
                cur[t] = False
                continue
            if a is False and b is True:
                cur[t] = lit
                continue
            s = cnf.fresh(family)
            cur[t] = s
            for c in (
                _clause(neg_lit(a), s),
                _clause(-lit, neg_lit(b), s),
                _clause(-s, a, lit),
                _clause(-s, a, b),
            ):
                if c is not None:
                    cnf.add(c)
        prev = cur
    return prev


@dataclass
class CounterEncoding:
    clauses: list
    aux: list = field(default_factory=list)
    n_vars: int = 0


def sequential_counter(literals, bound: int, polarity: str, activation=None, cnf: CnfInstance | None = None) -> CounterEncoding:
    """Clauses for (#true literals >= bound) or (<= bound), guarded by ``activation``.

    New auxiliaries are allocated in ``cnf`` (or in a scratch instance whose
    numbering starts after the largest literal).
    """
    literals = list(literals)
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if cnf is None:
        cnf = CnfInstance()
        cnf.n_vars = max((abs(l) for l in literals), default=0)
        cnf.n_vars = max(cnf.n_vars, abs(activation) if activation else 0)
        cnf.meaning = [None] * (cnf.n_vars + 1)
    start_vars, start_clauses = cnf.n_vars, len(cnf.clauses)
    guard = [] if activation is None else [-activation]
    if polarity == ATLEAST:
        if bound > 0:
            if bound > len(literals):
                cnf.add(guard or [])
            else:
                out = counter_outputs(cnf, literals, bound)
                c = _clause(*guard, out[bound])
                if c is not None:
                    cnf.add(c)
    elif polarity == ATMOST:
        if bound < len(literals):
            out = counter_outputs(cnf, literals, bound + 1)
            c = _clause(*guard, neg_lit(out[bound + 1]))
            if c is not None:
                cnf.add(c)
    else:
        raise ValueError(f"unknown polarity {polarity!r}")
    return CounterEncoding(
        list(cnf.clauses[start_clauses:]),
        list(range(start_vars + 1, cnf.n_vars + 1)),
        cnf.n_vars,
    )
