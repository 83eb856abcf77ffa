"""CNF encoding of size-restricted ALCQ fitting.

A concept with at most k nodes is a syntax tree whose nodes are numbered
1..k in breadth-first order.  Variables:

* ``x(i, label)``: node i carries ``label`` (``unused`` marks padding nodes,
  which form a suffix of the numbering);
* ``y1(i, j)``: node i is unary with child j; ``y2(i, j)``: node i is binary
  with children j and j+1;
* ``z(i, u)``: unit u belongs to the extension of the subconcept at node i.

Units are individuals, or whole bisimulation classes when
``merge_bisimilar`` is on (members of a class agree on every concept, so one
z variable per class suffices; successor multiplicities become weights).

Number restrictions use one weighted sequential counter per (node, role,
unit) over "child value" variables ``c(i, w)``, which equal the z values of
whichever node is the child of node i.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .bisim import ALC, ALCQ, max_bisimulation
from .cardinality import counter_outputs
from .cnf import CnfInstance
from .core.concept import (
    Concept,
    at_least,
    at_most,
    atom,
    bot,
    conj,
    disj,
    exists,
    forall,
    neg,
    node_count,
    top,
)
from .core.database import Database
from .core.semantics import eval_mask
from .errors import EncodingError, InternalConsistencyError

MAX_K = 64

UNUSED = ("unused",)
TOP_L = ("top",)
BOT_L = ("bot",)
NOT_L = ("not",)
AND_L = ("and",)
OR_L = ("or",)


def label_arity(label: tuple) -> int:
    head = label[0]
    if head in ("top", "bot", "name", "unused"):
        return 0
    if head in ("and", "or"):
        return 2
    return 1


def label_text(label: tuple) -> str:
    head = label[0]
    if head == "name":
        return label[1]
    if head in ("exists", "forall"):
        return f"{head} {label[1]}"
    if head in ("atleast", "atmost"):
        return f"{head} {label[1]} {label[2]}"
    return head


def uses_counting(fragment: str) -> bool:
    return "Q" in fragment.upper()


@dataclass(frozen=True)
class LabelSet:
    labels: tuple
    counting: bool
    g_bound: int

    @classmethod
    def build(cls, concept_names, role_names, g_bound: int, counting: bool) -> "LabelSet":
        labels = [TOP_L, BOT_L]
        labels += [("name", a) for a in sorted(concept_names)]
        labels += [NOT_L, AND_L, OR_L]
        for r in sorted(role_names):
            labels += [("exists", r), ("forall", r)]
            if counting:
                # (>= 1 r) is the exists label itself
                labels += [("atleast", n, r) for n in range(2, g_bound + 1)]
                labels += [("atmost", n, r) for n in range(0, g_bound + 1)]
        return cls(tuple(labels), counting, g_bound)

    def at_node(self, i: int, k: int) -> list:
        """Labels admissible at node i: children need free indices after i."""
        room = k - i
        out = [v for v in self.labels if label_arity(v) <= room]
        if i > 1:
            out.append(UNUSED)
        return out

    def __len__(self):
        return len(self.labels)


def _exactly_one(cnf: CnfInstance, lits: list) -> None:
    cnf.add(lits)
    _at_most_one(cnf, lits)


def _at_most_one(cnf: CnfInstance, lits: list) -> None:
    if len(lits) <= 6:
        for p in range(len(lits)):
            for q in range(p + 1, len(lits)):
                cnf.add((-lits[p], -lits[q]))
        return
    # ladder encoding: s_p is true once some literal at position <= p is true
    prev = None
    for p, lit in enumerate(lits):
        last = p == len(lits) - 1
        if prev is not None:
            cnf.add((-prev, -lit))
        if not last:
            s = cnf.fresh("amo")
            cnf.add((-lit, s))
            if prev is not None:
                cnf.add((-prev, s))
            prev = s


def _iff(cnf, guard, z, lit):
    """guard -> (z <-> lit); ``lit`` may be a constant."""
    g = [-v for v in guard]
    if lit is True:
        cnf.add(g + [z])
    elif lit is False:
        cnf.add(g + [-z])
    else:
        cnf.add(g + [-z, lit])
        cnf.add(g + [z, -lit])


def _iff_or(cnf, guard, z, lits):
    g = [-v for v in guard]
    cnf.add(g + [-z] + list(lits))
    for lit in lits:
        cnf.add(g + [z, -lit])


def _iff_and(cnf, guard, z, lits):
    g = [-v for v in guard]
    cnf.add(g + [z] + [-lit for lit in lits])
    for lit in lits:
        cnf.add(g + [-z, lit])


@dataclass
class Units:
    """Individuals grouped into the units that carry z variables."""

    of: dict  # individual -> unit index
    reps: list  # unit -> representative individual
    labels: list  # unit -> frozenset of concept names
    succ: dict  # role -> unit -> list of (unit, multiplicity)


def build_units(db: Database, merge: bool, counting: bool) -> Units:
    if merge:
        part = max_bisimulation(db, ALCQ if counting else ALC)
        reps = [m[0] for m in part.members()]
        of = {a: part.class_of(a) for a in db.individuals}
    else:
        reps = list(db.individuals)
        of = {a: i for i, a in enumerate(reps)}
    succ = {}
    for r in db.role_names:
        rows = []
        for rep in reps:
            cnt = Counter(of[b] for b in db.succ(r, rep))
            rows.append(sorted(cnt.items()))
        succ[r] = rows
    return Units(of, reps, [db.labels(a) for a in reps], succ)


def encode(
    db: Database,
    positives,
    negatives,
    k: int,
    g_bound: int,
    fragment: str = ALCQ,
    *,
    merge_bisimilar: bool = True,
    maxfit: bool = False,
    max_k: int = MAX_K,
) -> CnfInstance:
    """CNF satisfiable iff some concept with at most k nodes fits.

    With ``maxfit`` the fitting units are replaced by one indicator per
    example ("classified correctly") and the metadata holds counter outputs
    ``fit_outputs[t]`` meaning "at least t indicators are true".
    """
    if k < 1:
        raise EncodingError("k must be at least 1")
    if k > max_k:
        raise EncodingError(f"k={k} exceeds the configured ceiling {max_k}")
    if g_bound < 0:
        raise EncodingError("g_bound must be non-negative")
    if db.features:
        raise EncodingError("booleanize feature facts before encoding")
    positives, negatives = list(positives), list(negatives)
    for a in positives + negatives:
        if a not in db.index:
            raise EncodingError(f"example {a!r} is not an individual of the database")

    counting = uses_counting(fragment)
    units = build_units(db, merge_bisimilar, counting)
    n_units = len(units.reps)
    labels = LabelSet.build(db.concept_names, db.role_names, g_bound, counting)
    cnf = CnfInstance()
    X = {}
    for i in range(1, k + 1):
        for v in labels.at_node(i, k):
            X[i, v] = cnf.var("x", i, v)
    Y1 = {(i, j): cnf.var("y1", i, j) for i in range(1, k) for j in range(i + 1, k + 1)}
    Y2 = {(i, j): cnf.var("y2", i, j) for i in range(1, k - 1) for j in range(i + 1, k)}
    Z = {(i, u): cnf.var("z", i, u) for i in range(1, k + 1) for u in range(n_units)}

    # (a) structure
    arity_var = {}
    for i in range(1, k + 1):
        here = labels.at_node(i, k)
        _exactly_one(cnf, [X[i, v] for v in here])
        for a in (1, 2):
            group = [X[i, v] for v in here if label_arity(v) == a and v != UNUSED]
            if group:
                arity_var[i, a] = av = cnf.var("arity", i, a)
                _iff_or(cnf, [], av, group)
        out1 = [Y1[i, j] for j in range(i + 1, k + 1) if (i, j) in Y1]
        out2 = [Y2[i, j] for j in range(i + 1, k) if (i, j) in Y2]
        _at_most_one(cnf, out1 + out2)
        for a, out in ((1, out1), (2, out2)):
            if (i, a) in arity_var:
                cnf.add([-arity_var[i, a]] + out)
                for e in out:
                    cnf.add((-e, arity_var[i, a]))
            else:
                for e in out:
                    cnf.add((-e,))

    def incoming(j):
        """(source, edge variable) pairs that make j a child."""
        edges = [(i, Y1[i, j]) for i in range(1, j) if (i, j) in Y1]
        edges += [(i, Y2[i, j]) for i in range(1, j) if (i, j) in Y2]
        edges += [(i, Y2[i, j - 1]) for i in range(1, j - 1) if (i, j - 1) in Y2]
        return edges

    for j in range(2, k + 1):
        free = X[j, UNUSED]
        inc = incoming(j)
        cnf.add([free] + [e for _, e in inc])
        _at_most_one(cnf, [e for _, e in inc])
        for _, e in inc:
            cnf.add((-e, -free))
        if j < k:
            cnf.add((-free, X[j + 1, UNUSED]))
            # breadth-first numbering: parents are nondecreasing
            for i, e in inc:
                for i2, e2 in incoming(j + 1):
                    if i2 < i:
                        cnf.add((-e, -e2))

    # child-value variables
    C = {}
    for i in range(1, k):
        if (i, 1) not in arity_var:
            continue
        for u in range(n_units):
            C[i, u] = c = cnf.var("c", i, u)
            for j in range(i + 1, k + 1):
                _iff(cnf, [Y1[i, j]], c, Z[j, u])
    D = {}
    for i in range(1, k - 1):
        if (i, 2) not in arity_var:
            continue
        for u in range(n_units):
            D[i, u, 0] = d1 = cnf.var("left", i, u)
            D[i, u, 1] = d2 = cnf.var("right", i, u)
            for j in range(i + 1, k):
                _iff(cnf, [Y2[i, j]], d1, Z[j, u])
                _iff(cnf, [Y2[i, j]], d2, Z[j + 1, u])

    # (b) + (c) semantics
    for i in range(1, k + 1):
        here = labels.at_node(i, k)
        counters = {}
        for v in here:
            x = X[i, v]
            head = v[0]
            if head == "unused":
                continue
            for u in range(n_units):
                z = Z[i, u]
                if head == "top":
                    cnf.add((-x, z))
                elif head == "bot":
                    cnf.add((-x, -z))
                elif head == "name":
                    cnf.add((-x, z) if v[1] in units.labels[u] else (-x, -z))
                elif head == "not":
                    _iff(cnf, [x], z, -C[i, u])
                elif head == "and":
                    _iff_and(cnf, [x], z, [D[i, u, 0], D[i, u, 1]])
                elif head == "or":
                    _iff_or(cnf, [x], z, [D[i, u, 0], D[i, u, 1]])
                elif head == "exists":
                    _iff_or(cnf, [x], z, [C[i, w] for w, _ in units.succ[v[1]][u]])
                elif head == "forall":
                    _iff_and(cnf, [x], z, [C[i, w] for w, _ in units.succ[v[1]][u]])
                else:
                    n, r = v[1], v[2]
                    key = (r, u)
                    if key not in counters:
                        row = units.succ[r][u]
                        counters[key] = counter_outputs(
                            cnf,
                            [C[i, w] for w, _ in row],
                            g_bound + 1,
                            weights=[m for _, m in row],
                        )
                    out = counters[key]
                    if head == "atleast":
                        _iff(cnf, [x], z, out[n])
                    else:
                        _iff(cnf, [x], z, _negate(out[n + 1]))

    # (d) fitting
    fit_outputs = None
    if maxfit:
        inds = []
        # keyed by position: mapped examples may coincide
        for idx, a in enumerate(positives):
            ind = cnf.var("correct", "+", idx, a)
            _iff(cnf, [], ind, Z[1, units.of[a]])
            inds.append(ind)
        for idx, b in enumerate(negatives):
            ind = cnf.var("correct", "-", idx, b)
            _iff(cnf, [], ind, -Z[1, units.of[b]])
            inds.append(ind)
        fit_outputs = counter_outputs(cnf, inds, len(inds), family="fitcount") if inds else [True]
    else:
        for u in sorted({units.of[a] for a in positives}):
            cnf.add((Z[1, u],))
        for u in sorted({units.of[b] for b in negatives}):
            cnf.add((-Z[1, u],))

    cnf.metadata = {
        "k": k,
        "g_bound": g_bound,
        "fragment": fragment,
        "merge_bisimilar": merge_bisimilar,
        "units": n_units,
        "individuals": len(db.individuals),
        "labels": [label_text(v) for v in labels.labels],
        "roles": db.role_names,
        "concept_names": db.concept_names,
        "positives": positives,
        "negatives": negatives,
        "maxfit": maxfit,
    }
    cnf.payload = {
        "db": db,
        "units": units,
        "labels": labels,
        "arity": arity_var,
        "fit_outputs": fit_outputs,
    }
    return cnf


def _negate(lit):
    if lit is True:
        return False
    if lit is False:
        return True
    return -lit


def require_correct(cnf: CnfInstance, t: int) -> list:
    """Extra clauses demanding at least t correctly classified examples."""
    outs = cnf.payload["fit_outputs"]
    if t <= 0:
        return []
    if outs is None or t >= len(outs):
        return [()]
    lit = outs[t]
    if lit is True:
        return []
    if lit is False:
        return [()]
    return [(lit,)]


def shape_edges(arities) -> list:
    """Breadth-first child wiring for an arity sequence: (family, parent, child)."""
    edges = []
    nxt = 2
    for i, a in enumerate(arities, 1):
        if a == 1:
            edges.append(("y1", i, nxt))
            nxt += 1
        elif a == 2:
            edges.append(("y2", i, nxt))
            nxt += 2
    if nxt != len(arities) + 1:
        raise ValueError(f"arity sequence {arities} is not a complete tree")
    return edges


def shape_clauses(cnf: CnfInstance, arities, selector: int) -> list:
    """Clauses forcing the tree shape ``arities`` whenever ``selector`` holds."""
    k = cnf.metadata["k"]
    m = len(arities)
    if m > k:
        raise ValueError("shape larger than the encoded bound")
    out = []
    arity_var = cnf.payload["arity"]
    for i, a in enumerate(arities, 1):
        for b in (1, 2):
            v = arity_var.get((i, b))
            if v is not None:
                out.append((-selector, v) if a == b else (-selector, -v))
            elif a == b:
                out.append((-selector,))
        if i > 1:
            out.append((-selector, -cnf.var_map[("x", i, UNUSED)]))
    if m < k:
        out.append((-selector, cnf.var_map[("x", m + 1, UNUSED)]))
    for fam, i, j in shape_edges(arities):
        out.append((-selector, cnf.var_map[(fam, i, j)]))
    return out


def _true(model, v) -> bool:
    return bool(model[v])


def decode(model, cnf: CnfInstance) -> Concept:
    """Read the syntax tree from a model and check it against the z values.

    ``model`` is indexable by variable (``model[v]`` truthy iff v is true).
    """
    tree = decode_tree(model, cnf)
    concept = tree["concept"]
    db = cnf.payload["db"]
    units = cnf.payload["units"]
    ext = eval_mask(concept, db)
    meta = cnf.metadata
    for a in list(meta["positives"]) + list(meta["negatives"]):
        inside = bool(ext >> db.index[a] & 1)
        claimed = _true(model, cnf.var_map[("z", 1, units.of[a])])
        if inside != claimed:
            raise InternalConsistencyError(
                f"decoded concept disagrees with the model on {a!r}"
            )
    return concept


def decode_tree(model, cnf: CnfInstance) -> dict:
    """Concept plus the number of used nodes (the pruned size)."""
    k = cnf.metadata["k"]
    labels: LabelSet = cnf.payload["labels"]
    vm = cnf.var_map

    def label_of(i):
        found = [v for v in labels.at_node(i, k) if _true(model, vm[("x", i, v)])]
        if len(found) != 1:
            raise InternalConsistencyError(f"node {i} has {len(found)} labels")
        return found[0]

    def child(fam, i):
        for j in range(i + 1, k + 1):
            v = vm.get((fam, i, j))
            if v is not None and _true(model, v):
                return j
        raise InternalConsistencyError(f"node {i} misses its child")

    used = set()

    def build(i):
        if i in used:
            raise InternalConsistencyError(f"node {i} reached twice")
        used.add(i)
        v = label_of(i)
        head = v[0]
        if head == "unused":
            raise InternalConsistencyError(f"unused node {i} is referenced")
        if head == "top":
            return top()
        if head == "bot":
            return bot()
        if head == "name":
            return atom(v[1])
        if head in ("and", "or"):
            j = child("y2", i)
            left, right = build(j), build(j + 1)
            return conj(left, right) if head == "and" else disj(left, right)
        c = build(child("y1", i))
        if head == "not":
            return neg(c)
        if head == "exists":
            return exists(v[1], c)
        if head == "forall":
            return forall(v[1], c)
        if head == "atleast":
            return at_least(v[1], v[2], c)
        return at_most(v[1], v[2], c)

    concept = build(1)
    return {"concept": concept, "size": len(used), "node_count": node_count(concept)}


__all__ = [
    "LabelSet",
    "MAX_K",
    "UNUSED",
    "build_units",
    "decode",
    "decode_tree",
    "encode",
    "label_arity",
    "require_correct",
    "shape_clauses",
    "shape_edges",
]
