import random
from decimal import Decimal

import pytest

from dlfit.core import (
    FeatureFact,
    Role,
    RoleFact,
    at_least,
    atom,
    eval_concept,
    feature_geq,
    feature_leq,
    neg,
    parse_facts,
    top,
)
from dlfit.core.database import Database
from dlfit.errors import InputError
from dlfit.generators import random_database
from dlfit.reduce import (
    add_inverse_roles,
    booleanize_features,
    features_to_names,
    inverse_to_fresh,
    restore_features,
    restore_inverse_roles,
    select_thresholds,
    threshold_name,
)

from oracles import enumerate_concepts

HEIGHTS = parse_facts(
    "child(a,a1)\nchild(a,a2)\nchild(b,b1)\nchild(b,b2)\n"
    "height(a1, 121)\nheight(a2, 145)\nheight(b1, 152)\nheight(b2, 163)\n"
)


def _with_features(seed, n=5):
    rng = random.Random(seed)
    db = random_database(n, ("A",), ("r",), p_edge=0.3, seed=seed)
    facts = list(db.facts())
    for a in db.individuals:
        if rng.random() < 0.8:
            facts.append(FeatureFact("f", a, Decimal(rng.randint(0, 4))))
    return Database(facts, db.individuals)


def test_inverse_example():
    db = parse_facts("r(a,b)\n")
    out, ctx = add_inverse_roles(db)
    fresh = ctx.role_map["r"]
    assert set(out.facts()) == {RoleFact("r", "a", "b"), RoleFact(fresh, "b", "a")}


def test_inverse_without_roles():
    db = parse_facts("A(a)\n")
    out, ctx = add_inverse_roles(db)
    assert out == db and ctx.role_map == {}


def test_inverse_name_collision():
    db = Database([RoleFact("__inv_r", "a", "b")])
    with pytest.raises(InputError):
        add_inverse_roles(db)


def test_restore_inverse_roles_example():
    db = parse_facts("r(a,b)\n")
    _, ctx = add_inverse_roles(db)
    c = at_least(2, ctx.role_map["r"], top())
    assert restore_inverse_roles(c, ctx) is at_least(2, Role("r", True), top())
    assert restore_inverse_roles(atom("A"), ctx) is atom("A")


def test_inverse_roundtrip_on_enumerated_concepts():
    for seed in range(12):
        db = random_database(5, ("A",), ("r",), p_edge=0.3, seed=seed)
        out, ctx = add_inverse_roles(db)
        roles = [Role("r"), Role("r", True)]
        for size in range(1, 5 if seed < 3 else 4):
            for c in enumerate_concepts(["A"], roles, size, True, 2):
                forward = inverse_to_fresh(c, ctx)
                assert eval_concept(c, db) == eval_concept(forward, out)
                assert restore_inverse_roles(forward, ctx) is c


def test_select_thresholds_examples():
    assert select_thresholds(HEIGHTS, "height", 2) == [Decimal(121), Decimal(145)]
    assert select_thresholds(HEIGHTS, "height", 1) == [Decimal(121)]
    assert select_thresholds(HEIGHTS, "height", 4) == [Decimal(v) for v in (121, 145, 152, 163)]
    assert select_thresholds(HEIGHTS, "height", 9) == [Decimal(v) for v in (121, 145, 152, 163)]
    assert select_thresholds(HEIGHTS, "height", 2, snap="raw") == [Decimal(121), Decimal(142)]
    assert select_thresholds(HEIGHTS, "weight", 3) == []


def test_thresholds_deterministic_and_increasing():
    for seed in range(20):
        db = _with_features(seed, n=8)
        for n_f in range(1, 6):
            th = select_thresholds(db, "f", n_f)
            assert th == select_thresholds(db, "f", n_f)
            assert all(x < y for x, y in zip(th, th[1:]))
            assert set(th) <= set(db.observed_values("f"))


def test_booleanize_example():
    out, ctx = booleanize_features(HEIGHTS, {"height": [Decimal(140)]})
    name = threshold_name("height", Decimal(140))
    assert eval_concept(atom(name), out) == {"a2", "b1", "b2"}
    assert not out.features
    empty, _ = booleanize_features(HEIGHTS, {"height": []})
    assert not empty.features and empty.concept_names == []


def test_restore_features_examples():
    _, ctx = booleanize_features(HEIGHTS, {"height": [Decimal(140)]})
    name = threshold_name("height", Decimal(140))
    assert restore_features(atom(name), ctx) is feature_geq("height", 140)
    assert restore_features(atom("A"), ctx) is atom("A")


def test_booleanize_preserves_eval_with_all_thresholds():
    for seed in range(12):
        db = _with_features(seed)
        th = {"f": db.observed_values("f")}
        out, ctx = booleanize_features(db, th)
        leaves = [feature_geq("f", v) for v in th["f"]] + [feature_leq("f", v) for v in th["f"]]
        for size in range(1, 4):
            for c in enumerate_concepts(["A"], ["r"], size, True, 2):
                cands = [c] + [c & leaf for leaf in leaves] if size < 3 else [c]
                for cand in cands:
                    names = features_to_names(cand, ctx)
                    assert eval_concept(cand, db) == eval_concept(names, out)
                    # and back again
                    back = restore_features(names, ctx)
                    assert eval_concept(back, db) == eval_concept(cand, db)


def test_restore_features_eval_on_random_concepts():
    for seed in range(12):
        db = _with_features(seed)
        th = {"f": select_thresholds(db, "f", 2)}
        out, ctx = booleanize_features(db, th)
        names = out.concept_names
        for size in range(1, 4):
            for c in enumerate_concepts(names, ["r"], size, True, 1):
                want = eval_concept(c, out)
                assert eval_concept(restore_features(c, ctx), db) == want
                assert eval_concept(restore_features(c, ctx, simplify=False), db) == want


def test_simplified_negation_only_for_total_features():
    db = parse_facts("f(a, 1)\nf(b, 3)\nA(c)\n")
    out, ctx = booleanize_features(db, {"f": [Decimal(1), Decimal(3)]})
    c = neg(atom(threshold_name("f", Decimal(3))))
    # c has no value, so the negation stays a negation
    assert restore_features(c, ctx).kind == "not"
    db2 = parse_facts("f(a, 1)\nf(b, 3)\n")
    _, ctx2 = booleanize_features(db2, {"f": [Decimal(1), Decimal(3)]})
    assert restore_features(c, ctx2) is feature_leq("f", 1)


def test_both_reductions_compose():
    for seed in range(8):
        db = _with_features(seed)
        inv_db, inv_ctx = add_inverse_roles(db)
        out, ctx = booleanize_features(inv_db, {"f": inv_db.observed_values("f")})
        for size in range(1, 4):
            for c in enumerate_concepts(out.concept_names, out.role_names, size, True, 1):
                back = restore_inverse_roles(restore_features(c, ctx), inv_ctx)
                assert eval_concept(back, db) == eval_concept(c, out)
