"""A small CDCL SAT solver.

Two watched literals, first-UIP learning with VSIDS-style activities,
phase saving, Luby restarts and a simple learned-clause reduction.  Meant
for desk-scale instances and as an always-available fallback.
"""

from __future__ import annotations

import heapq
import time

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"


def luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class CDCLSolver:
    def __init__(self, n_vars: int, clauses):
        self.n = n_vars
        self.assign = [0] * (n_vars + 1)  # +1 true, -1 false, 0 free
        self.level = [0] * (n_vars + 1)
        self.reason = [None] * (n_vars + 1)
        self.phase = [False] * (n_vars + 1)
        self.activity = [0.0] * (n_vars + 1)
        self.var_inc = 1.0
        self.watches = {}
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.learnts = []
        self.heap = [(0.0, v) for v in range(1, n_vars + 1)]
        heapq.heapify(self.heap)
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.ok = True
        self.units = []
        for clause in clauses:
            self._add_input(clause)

    # -- setup -----------------------------------------------------------

    def _add_input(self, clause):
        lits = sorted(set(clause), key=abs)
        for a, b in zip(lits, lits[1:]):
            if a == -b:
                return  # tautology
        if not lits:
            self.ok = False
            return
        if len(lits) == 1:
            self.units.append(lits[0])
            return
        self._watch(lits)

    def _watch(self, lits):
        self.watches.setdefault(lits[0], []).append(lits)
        self.watches.setdefault(lits[1], []).append(lits)

    # -- assignment ------------------------------------------------------

    def _enqueue(self, lit, reason):
        v = lit if lit > 0 else -lit
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _value(self, lit):
        a = self.assign[lit if lit > 0 else -lit]
        return a if lit > 0 else -a

    def _propagate(self):
        assign = self.assign
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = watches.get(false_lit)
            if not ws:
                continue
            keep = []
            n_ws = len(ws)
            idx = 0
            while idx < n_ws:
                cl = ws[idx]
                idx += 1
                if cl[0] == false_lit:
                    cl[0], cl[1] = cl[1], false_lit
                first = cl[0]
                fv = assign[first] if first > 0 else -assign[-first]
                if fv == 1:
                    keep.append(cl)
                    continue
                found = False
                for j in range(2, len(cl)):
                    lit = cl[j]
                    lv = assign[lit] if lit > 0 else -assign[-lit]
                    if lv != -1:
                        cl[1], cl[j] = lit, false_lit
                        watches.setdefault(lit, []).append(cl)
                        found = True
                        break
                if found:
                    continue
                keep.append(cl)
                if fv == -1:
                    keep.extend(ws[idx:])
                    watches[false_lit] = keep
                    self.qhead = len(trail)
                    return cl
                self.propagations += 1
                self._enqueue(first, cl)
            watches[false_lit] = keep
        return None

    def _bump(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if self.assign[u] == 0]
            heapq.heapify(self.heap)
            return
        if self.assign[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, conflict):
        seen = set()
        learnt = [0]
        path = 0
        p = None
        cl = conflict
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        while True:
            for q in cl:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if v not in seen and self.level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if self.level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(abs(p))
            path -= 1
            if path == 0:
                break
            cl = self.reason[abs(p)]
        learnt[0] = -p
        # drop literals implied by the rest of the clause (local minimization)
        marks = {abs(q) for q in learnt}
        out = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[abs(q)]
            if r is None or any(abs(x) not in marks and self.level[abs(x)] > 0 for x in r if x != -q):
                out.append(q)
        learnt = out
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        for lit in self.trail[stop:]:
            v = abs(lit)
            self.phase[v] = lit > 0
            self.assign[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self):
        heap = self.heap
        while heap:
            _, v = heapq.heappop(heap)
            if self.assign[v] == 0:
                return v if self.phase[v] else -v
        return None

    def _reduce(self):
        """Forget the older half of long learned clauses that are not reasons."""
        locked = {id(self.reason[abs(lit)]) for lit in self.trail if self.reason[abs(lit)] is not None}
        half = len(self.learnts) // 2
        drop = set()
        for cl in self.learnts[:half]:
            if len(cl) > 3 and id(cl) not in locked:
                drop.add(id(cl))
        if not drop:
            return
        self.learnts = [cl for cl in self.learnts if id(cl) not in drop]
        for lit, ws in self.watches.items():
            self.watches[lit] = [cl for cl in ws if id(cl) not in drop]

    # -- main loop -------------------------------------------------------

    def solve(self, deadline=None, should_stop=None, conflict_limit=None):
        if not self.ok:
            return UNSAT
        for lit in self.units:
            val = self._value(lit)
            if val == -1:
                return UNSAT
            if val == 0:
                self._enqueue(lit, None)
        if self._propagate() is not None:
            return UNSAT
        restart = 1
        budget = 100 * luby(restart)
        since_restart = 0
        max_learnts = max(2000, self.n // 2)
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return UNSAT
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._watch(learnt)
                    self.learnts.append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= 0.95
                if self.conflicts % 256 == 0:
                    if deadline is not None and time.monotonic() > deadline:
                        return TIMEOUT
                    if should_stop is not None and should_stop():
                        return TIMEOUT
                if conflict_limit is not None and self.conflicts >= conflict_limit:
                    return TIMEOUT
                continue
            if since_restart >= budget:
                self._backtrack(0)
                restart += 1
                budget = 100 * luby(restart)
                since_restart = 0
                if should_stop is not None and should_stop():
                    return TIMEOUT
                if len(self.learnts) > max_learnts:
                    self._reduce()
                    max_learnts = int(max_learnts * 1.1)
            lit = self._pick()
            if lit is None:
                return SAT
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def model(self) -> list:
        return [False] + [a > 0 for a in self.assign[1:]]
