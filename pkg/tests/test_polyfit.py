import itertools
import random

import pytest

from dlfit.bisim import max_bisimulation
from dlfit.core import ConceptFact, Database, FittingProblem, atom, bot, fits, top
from dlfit.errors import NotSeparable
from dlfit.generators import random_database
from dlfit.polyfit import approx_select, construct_fitting, fitting_exists

from oracles import Graph, max_correct, min_fit_size


def _problem(seed, n_ex=4):
    rng = random.Random(seed)
    db = random_database(rng.randint(3, 7), ("A",), ("r", "s")[: rng.randint(1, 2)], p_edge=0.3, seed=seed)
    inds = list(db.individuals)
    rng.shuffle(inds)
    n_ex = min(n_ex, len(inds))
    n_pos = rng.randint(0, n_ex)
    return FittingProblem(db, inds[:n_pos], inds[n_pos:n_ex])


def test_fitting_exists_trivial():
    db = Database([ConceptFact("A", "a")], individuals=["a", "b"])
    assert fitting_exists(FittingProblem(db, ["a"], ["b"]))
    twins = Database([], individuals=["a", "b"])
    assert not fitting_exists(FittingProblem(twins, ["a"], ["b"]))


def test_fitting_exists_agrees_with_enumeration():
    for seed in range(100):
        problem = _problem(seed)
        g = Graph(problem.database)
        found = min_fit_size(g, problem.positives, problem.negatives, 6, True, 3)
        if found is not None:
            assert fitting_exists(problem)
        if not fitting_exists(problem):
            assert found is None


def test_approx_select_separable_unchanged():
    db = Database([ConceptFact("A", "a")], individuals=["a", "b"])
    sel = approx_select(FittingProblem(db, ["a"], ["b"]))
    assert sel.kept_positives == ("a",) and sel.kept_negatives == ("b",)


def test_approx_select_majority_and_ties():
    db = Database([], individuals=["p1", "p2", "n1", "q1", "m1"])
    sel = approx_select(FittingProblem(db, ["p1", "p2"], ["n1"]))
    assert sel.kept_positives == ("p1", "p2") and sel.kept_negatives == ()
    tie = approx_select(FittingProblem(db, ["q1"], ["m1"]))
    assert tie.kept_positives == ("q1",) and tie.kept_negatives == ()


def _brute_force_keep(problem):
    """Largest separable subset, trying keep/drop per class."""
    part = max_bisimulation(problem.database)
    classes = sorted({part.class_of(a) for a in problem.examples})
    best = 0
    for choice in itertools.product((True, False), repeat=len(classes)):
        keep_pos = dict(zip(classes, choice))
        n = sum(1 for a in problem.positives if keep_pos[part.class_of(a)])
        n += sum(1 for b in problem.negatives if not keep_pos[part.class_of(b)])
        best = max(best, n)
    return best


def test_approx_select_matches_per_class_optimum():
    for seed in range(100):
        problem = _problem(seed, n_ex=6)
        sel = approx_select(problem)
        assert sel.n_kept == _brute_force_keep(problem)
        assert fitting_exists(sel.as_problem())
        again = approx_select(sel.as_problem())
        assert again.n_kept == sel.n_kept


def test_construct_fitting_conventions():
    db = Database([ConceptFact("A", "a")], individuals=["a", "b"])
    assert construct_fitting(FittingProblem(db, ["a", "b"], [])) is top()
    assert construct_fitting(FittingProblem(db, [], ["a"])) is bot()
    assert construct_fitting(FittingProblem(db, ["a"], ["b"])) is atom("A")


def test_construct_fitting_random():
    done = 0
    for seed in range(300):
        problem = _problem(seed, n_ex=5)
        if not fitting_exists(problem):
            with pytest.raises(NotSeparable):
                construct_fitting(problem)
            continue
        assert fits(construct_fitting(problem), problem).ok
        done += 1
    assert done >= 100


def test_optimal_number_of_examples():
    for seed in range(60):
        problem = _problem(seed, n_ex=6)
        g = Graph(problem.database)
        concept = construct_fitting(approx_select(problem))
        got = fits(concept, problem).n_correct
        # no concept of any size can beat the per-class majority
        assert got == _brute_force_keep(problem)
        assert got >= max_correct(g, problem.positives, problem.negatives, 4, True, 2)
