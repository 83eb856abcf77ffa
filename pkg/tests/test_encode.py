import random
from decimal import Decimal

import pytest

from dlfit.cnf import CnfInstance, parse_dimacs
from dlfit.core import ConceptFact, Database, FittingProblem, atom, fits, node_count, parse_facts, top
from dlfit.driver import enumerate_topologies
from dlfit.encode import LabelSet, decode, decode_tree, encode, require_correct
from dlfit.errors import EncodingError, InputError
from dlfit.generators import random_database
from dlfit.reduce import add_inverse_roles, booleanize_features, threshold_name
from dlfit.solve import SAT, UNSAT, solve

from oracles import Graph, max_correct, min_fit_size

EX1 = parse_facts(
    "child(a,a1)\nchild(a,a2)\nchild(b,b1)\nchild(b,b2)\n"
    "height(a1, 121)\nheight(a2, 145)\nheight(b1, 152)\nheight(b2, 163)\n"
)


def _run(db, pos, neg, k, g, fragment, merge=True, backend="pysat"):
    cnf = encode(db, pos, neg, k, g, fragment, merge_bisimilar=merge)
    res = solve(cnf, backend=backend)
    if res.status != SAT:
        return res.status, None
    return SAT, decode(res.model, cnf)


def test_single_positive_k1():
    db = Database([ConceptFact("A", "a")])
    status, c = _run(db, ["a"], [], 1, 1, "ALCQ")
    assert status == SAT and c in (top(), atom("A"))


def test_name_separates_k1():
    db = Database([ConceptFact("A", "a"), ConceptFact("B", "b")])
    status, c = _run(db, ["a"], ["b"], 1, 1, "ALCQ")
    assert status == SAT and c is atom("A")


def test_example1_booleanized():
    db, _ = booleanize_features(EX1, {"height": [Decimal(140)]})
    name = threshold_name("height", Decimal(140))
    for merge in (True, False):
        assert _run(db, ["a"], ["b"], 1, 1, "ALCQ", merge)[0] == UNSAT
        status, c = _run(db, ["a"], ["b"], 2, 2, "ALCQ", merge)
        assert status == SAT and node_count(c) == 2
        assert fits(c, FittingProblem(db, ["a"], ["b"])).ok
    from dlfit.core import at_most

    # the intended concept is the only 2-node fit up to the number bound
    assert fits(at_most(1, "child", atom(name)), FittingProblem(db, ["a"], ["b"])).ok


def test_label_set_families():
    alc = LabelSet.build(["A"], ["r"], 3, counting=False)
    assert ("atleast", 2, "r") not in alc.labels and ("exists", "r") in alc.labels
    q = LabelSet.build(["A"], ["r"], 3, counting=True)
    assert [l for l in q.labels if l[0] == "atmost"] == [("atmost", n, "r") for n in range(4)]
    assert ("atleast", 1, "r") not in q.labels  # exists plays that role
    assert ("unused",) not in q.at_node(1, 3) and ("unused",) in q.at_node(2, 3)
    assert all(l[0] not in ("and", "or") for l in q.at_node(3, 4))


def _random_instance(rng, seed):
    db = random_database(
        rng.randint(2, 6), ("A", "B")[: rng.randint(1, 2)], ("r",), p_label=0.4,
        p_edge=rng.choice([0.2, 0.35]), seed=seed,
    )
    inds = list(db.individuals)
    rng.shuffle(inds)
    n_pos = rng.randint(1, min(2, len(inds)))
    n_neg = rng.randint(0, min(2, len(inds) - n_pos))
    return db, inds[:n_pos], inds[n_pos:n_pos + n_neg]


@pytest.mark.parametrize("fragment", ["ALC", "ALCQ", "ALCQI"])
def test_verdict_matches_enumeration(fragment):
    rng = random.Random(fragment)
    for seed in range(40):
        db, pos, neg_ = _random_instance(rng, seed)
        k = rng.randint(1, 4)
        g_bound = rng.randint(1, 3)
        counting = "Q" in fragment
        if "I" in fragment:
            enc_db, _ = add_inverse_roles(db)
            graph = Graph(db, roles="with_inverse")
        else:
            enc_db, graph = db, Graph(db)
        want = min_fit_size(graph, pos, neg_, k, counting, g_bound)
        merge = bool(seed % 2)
        status, c = _run(enc_db, pos, neg_, k, g_bound, fragment, merge)
        assert (status == SAT) == (want is not None), (seed, k, g_bound)
        if c is not None:
            assert fits(c, FittingProblem(enc_db, pos, neg_)).ok
            assert node_count(c) >= want


def test_decode_tree_reports_pruned_size():
    db = Database([ConceptFact("A", "a"), ConceptFact("B", "b")])
    cnf = encode(db, ["a"], ["b"], 4, 2, "ALCQ")
    res = solve(cnf)
    tree = decode_tree(res.model, cnf)
    assert tree["size"] == node_count(tree["concept"]) <= 4


def test_decode_rejects_tampered_model():
    from dlfit.errors import InternalConsistencyError

    db = Database([ConceptFact("A", "a"), ConceptFact("B", "b")])
    cnf = encode(db, ["a"], ["b"], 1, 1, "ALC")
    res = solve(cnf)
    model = list(res.model)
    # relabel the root as top: still a "model" of the labels, but not of the examples
    for key, v in cnf.var_map.items():
        if key[0] == "x" and key[1] == 1:
            model[v] = key[2] == ("top",)
    with pytest.raises(InternalConsistencyError):
        decode(model, cnf)


def test_clause_count_ceiling():
    rng = random.Random(5)
    for seed in range(15):
        db, pos, neg_ = _random_instance(rng, seed)
        for k in (2, 3, 4):
            for g_bound in (1, 2, 3):
                cnf = encode(db, pos, neg_, k, g_bound, "ALCQ", merge_bisimilar=False)
                sigma = len(db.concept_names) + len(db.role_names)
                ceiling = 64 * k * k * len(db.individuals) * max(1, sigma) * g_bound * g_bound
                assert cnf.n_clauses <= ceiling


def test_encoding_is_deterministic():
    db = random_database(5, ("A", "B"), ("r", "s"), seed=3)
    inds = list(db.individuals)
    one = encode(db, inds[:2], inds[2:4], 4, 2, "ALCQ")
    two = encode(db, inds[:2], inds[2:4], 4, 2, "ALCQ")
    assert one.clauses == two.clauses and one.meaning == two.meaning


def test_oversize_k_rejected():
    db = Database([ConceptFact("A", "a")])
    with pytest.raises(EncodingError):
        encode(db, ["a"], [], 10, 1, "ALC", max_k=8)
    with pytest.raises((EncodingError, InputError, ValueError)):
        encode(db, ["a"], [], 0, 1, "ALC")


def test_dimacs_roundtrip():
    db = random_database(4, ("A",), ("r",), seed=8)
    inds = list(db.individuals)
    cnf = encode(db, inds[:1], inds[1:2], 3, 2, "ALCQ")
    text = cnf.to_dimacs()
    header = text.splitlines()[0].split()
    assert header == ["p", "cnf", str(cnf.n_vars), str(cnf.n_clauses)]
    back = parse_dimacs(text)
    assert back.n_vars == cnf.n_vars and back.clauses == cnf.clauses


def test_parse_dimacs_errors():
    with pytest.raises(InputError):
        parse_dimacs("p cnf 2 1\n1 3 0\n")
    with pytest.raises(InputError):
        parse_dimacs("p cnf 2 2\n1 0\n")
    with pytest.raises(InputError):
        parse_dimacs("1 2 0\n")


def test_maxfit_indicators_match_enumeration():
    rng = random.Random(17)
    for seed in range(25):
        db, pos, neg_ = _random_instance(rng, seed)
        k = rng.randint(1, 3)
        cnf = encode(db, pos, neg_, k, 2, "ALCQ", maxfit=True)
        want = max_correct(Graph(db), pos, neg_, k, True, 2)
        total = len(pos) + len(neg_)
        for t in range(0, total + 1):
            res = solve(cnf.with_clauses(require_correct(cnf, t)))
            assert (res.status == SAT) == (t <= want), (seed, t, want)
            if res.status == SAT:
                c = decode_tree(res.model, cnf)["concept"]
                assert fits(c, FittingProblem(db, pos, neg_)).n_correct >= t


def test_maxfit_with_overlapping_examples():
    db = Database([], individuals=["a", "b"])
    cnf = encode(db, ["a"], ["b"], 1, 1, "ALCQ", maxfit=True)
    assert solve(cnf.with_clauses(require_correct(cnf, 1))).status == SAT
    assert solve(cnf.with_clauses(require_correct(cnf, 2))).status == UNSAT


def _motzkin(n):
    m = [1, 1]
    for i in range(2, n + 1):
        m.append(((2 * i + 1) * m[i - 1] + (3 * i - 3) * m[i - 2]) // (i + 2))
    return m[n]


def test_topology_counts():
    assert len(enumerate_topologies(1)) == 1
    assert len(enumerate_topologies(2, maximal_only=True)) == 1
    assert len(enumerate_topologies(2)) == 2
    assert sorted(t.arities for t in enumerate_topologies(3, maximal_only=True)) == [(1, 1, 0), (2, 0, 0)]
    for k in range(1, 9):
        # ordered unary-binary trees with k nodes are counted by Motzkin numbers
        assert len(enumerate_topologies(k, maximal_only=True)) == _motzkin(k - 1)
        assert len(enumerate_topologies(k)) == sum(_motzkin(m - 1) for m in range(1, k + 1))


def test_shape_selectors_partition_the_search():
    from dlfit.encode import shape_clauses

    db = random_database(4, ("A",), ("r",), seed=2)
    inds = list(db.individuals)
    cnf = encode(db, inds[:1], inds[1:3], 4, 2, "ALCQ")
    base = solve(cnf).status
    results = []
    for shape in enumerate_topologies(4):
        sub = cnf.copy()
        s = sub.fresh("shape")
        sub.extend(shape_clauses(sub, shape.arities, s))
        sub.add([s])
        res = solve(sub)
        results.append(res.status)
        if res.status == SAT:
            assert decode_tree(res.model, sub)["size"] == shape.size
    assert (SAT in results) == (base == SAT)
