import itertools

import pytest

from dlfit.bisim import ALC, ALCQ, max_bisimulation
from dlfit.core import Database, FittingProblem, RoleFact, at_least, eval_concept, fits, node_count, parse_concept, top
from dlfit.driver import EXACT, SearchConfig, bounded_fit
from dlfit.errors import InputError
from dlfit.generators import (
    gen_alcq_separation,
    gen_hitting_set,
    hitting_set_witness,
    labelled_by,
    min_hitting_set,
    random_database,
    star_database,
)
from dlfit.polyfit import fitting_exists

from corpus import two_successors


def _brute_hitting(sets, k):
    universe = sorted(set().union(*sets))
    return any(
        all(set(h) & set(s) for s in sets)
        for size in range(k + 1)
        for h in itertools.combinations(universe, size)
    )


def test_min_hitting_set():
    assert min_hitting_set([{1, 3}, {2, 4}]) in {(1, 2), (1, 4), (2, 3), (3, 4)}
    assert min_hitting_set([{1}, {2}]) == (1, 2)
    assert min_hitting_set([{1, 2}, {2, 3}, {3, 1}]) == (1, 2)
    assert min_hitting_set([set()]) is None


def test_hitting_set_input_errors():
    with pytest.raises(InputError):
        gen_hitting_set([], 1)
    with pytest.raises(InputError):
        gen_hitting_set([{1, 3}], 1)  # 2 is missing
    with pytest.raises(InputError):
        gen_hitting_set([{1}, set()], 1)
    with pytest.raises(InputError):
        gen_hitting_set([{1}], -1)


def test_hitting_set_layout():
    inst = gen_hitting_set([{1, 3}, {2, 4}], 2)
    assert inst.k_prime == 8 and inst.group_size == 9 and inst.metadata["faithful"]
    db = inst.problem.database
    # groups: a, b, a-path (5 + 4 detours), two b-paths (5 + 2 detours each)
    assert len(db.individuals) == 9 * (2 + 9 + 7 + 7)
    assert inst.problem.positives == ("a_m0",) and inst.problem.negatives == ("b_m0",)
    # edges between groups are all-to-all
    assert len(db.succ("r", "a_m0")) == 9 * 3
    assert inst.has_hitting_set
    small = gen_hitting_set([{1, 3}, {2, 4}], 2, group_size=2)
    assert not small.metadata["faithful"] and len(small.problem.database.individuals) == 2 * 25


def test_single_set_witness():
    inst = gen_hitting_set([{1}], 1)
    assert inst.k_prime == 4
    witness = hitting_set_witness(inst)
    assert witness == "(exists r . (exists s . (exists s . A)))"
    assert fits(parse_concept(witness), inst.problem).ok


def test_two_pair_witness():
    inst = gen_hitting_set([{1, 3}, {2, 4}], 2)
    witness = parse_concept(hitting_set_witness(inst, h={1, 2}))
    want = parse_concept(
        "(exists r . (exists s . (exists s . (exists s . (exists s . (exists r . (exists r . A)))))))"
    )
    assert witness is want and node_count(witness) == inst.k_prime
    assert fits(witness, inst.problem).ok


def test_witness_fits_whenever_a_hitting_set_exists():
    families = [[{1}], [{1, 2}], [{1}, {2}], [{1, 2}, {2, 3}], [{1, 3}, {2}], [{1, 2}, {3}, {1, 3}]]
    for sets in families:
        for k in range(1, 4):
            inst = gen_hitting_set(sets, k, group_size=2)
            assert inst.has_hitting_set == _brute_hitting(sets, k)
            if inst.has_hitting_set:
                c = parse_concept(hitting_set_witness(inst))
                assert node_count(c) <= inst.k_prime
                assert fits(c, inst.problem).ok


def test_two_singletons_have_no_small_fit():
    # no hitting set of size 1, so nothing with k' = 5 nodes should fit
    inst = gen_hitting_set([{1}, {2}], 1)
    assert inst.k_prime == 5 and not inst.has_hitting_set
    res = bounded_fit(inst.problem, SearchConfig(fragment="ALCQI", max_stage=inst.k_prime))
    assert res.status != EXACT, f"found {res.concept_text()} with {res.node_count} nodes"


def test_two_pair_minimal_fit_has_eight_nodes():
    inst = gen_hitting_set([{1, 3}, {2, 4}], 2)
    res = bounded_fit(inst.problem, SearchConfig(fragment="ALCQI", max_stage=inst.k_prime))
    assert res.status == EXACT
    assert res.node_count == 8, f"found {res.concept_text()} with {res.node_count} nodes"


def test_alcq_separation_two_successors():
    problems = gen_alcq_separation(two_successors(), seed=0)
    assert len(problems) == 1
    p = problems[0].problem
    assert {p.positives, p.negatives} == {("a",), ("b",)}
    hidden = at_least(2, "r", top())
    if p.positives == ("a",):
        assert fits(hidden, p).ok
    assert fitting_exists(p, ALCQ) and not fitting_exists(p, ALC)


def test_alcq_separation_seed_swaps_sides():
    sides = {gen_alcq_separation(two_successors(), seed=s)[0].problem.positives for s in range(20)}
    assert sides == {("a",), ("b",)}


def test_alcq_separation_rigid_db_is_empty():
    db = Database([RoleFact("r", "a", "b"), RoleFact("r", "b", "c")])
    assert max_bisimulation(db, ALC).n_classes == 3
    assert gen_alcq_separation(db) == []


def test_alcq_separation_postconditions():
    seen = 0
    for seed in range(30):
        db = star_database(8, max_successors=4, seed=seed)
        problems = gen_alcq_separation(db, seed=seed)
        for sp in problems:
            p = sp.problem
            assert p.positives and p.negatives
            assert fitting_exists(p, ALCQ)
            alc = max_bisimulation(db, ALC)
            assert any(alc.same(a, b) for a in p.positives for b in p.negatives)
            if "odd_extra" in sp.metadata and sp.metadata["odd_extra"] is not None:
                diff = len(p.positives) - len(p.negatives)
                assert diff == (1 if sp.metadata["odd_extra"] == "positive" else -1)
            seen += 1
    assert seen > 20


def test_alcq_separation_merges_pairs():
    db = star_database(12, max_successors=4, seed=1)
    singles = gen_alcq_separation(db, seed=0, merge=False)
    merged = gen_alcq_separation(db, seed=0, merge=True)
    assert len(merged) == len(singles) + len(singles) // 2
    for sp in merged[len(singles):]:
        assert "merged_from" in sp.metadata and fitting_exists(sp.problem, ALCQ)


def test_random_database_is_seeded():
    assert random_database(6, seed=4) == random_database(6, seed=4)
    assert random_database(6, seed=4) != random_database(6, seed=5)


def test_labelled_by_partitions():
    db = star_database(6, seed=2)
    c = at_least(2, "r", top())
    p = labelled_by(c, db)
    assert set(p.positives) | set(p.negatives) == set(db.individuals)
    assert set(p.positives) == eval_concept(c, db)
    assert fits(c, p).ok
