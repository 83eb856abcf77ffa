"""Ten-fold cross-validation on data labelled by a hidden concept.

Every center has a A-successors and u other successors for all a < 4 and
u < 3; a center is positive when it has at least two non-A successors.

    python3 demos/crossval.py
"""

from dlfit import SearchConfig, bounded_fit, cross_validate
from dlfit.core import ConceptFact, Database, RoleFact, parse_concept
from dlfit.generators import labelled_by


def graded_stars(repeats=4):
    facts, centers, inds = [], [], []
    for rep in range(repeats):
        for a in range(4):
            for u in range(3):
                c = f"c{rep}_{a}_{u}"
                centers.append(c)
                inds.append(c)
                for j in range(a + u):
                    leaf = f"{c}_s{j}"
                    inds.append(leaf)
                    facts.append(RoleFact("r", c, leaf))
                    if j < a:
                        facts.append(ConceptFact("A", leaf))
    return Database(facts, inds), centers


def main():
    db, centers = graded_stars()
    hidden = parse_concept("(atleast 2 r . (not A))")
    problem = labelled_by(hidden, db, centers)
    config = SearchConfig(fragment="ALCQ", max_stage=5)
    report = cross_validate(problem, lambda train: bounded_fit(train, config).concept, folds=10, seed=0)
    for fold in report["folds"]:
        print(f"fold {fold['fold']}: accuracy {fold['accuracy']:.2f} f1 {fold['f1']:.2f} nodes {fold['node_count']}")
    for key in ("accuracy", "f1", "node_count"):
        print(f"{key}: {report[key]['mean']:.2f} +- {report[key]['std']:.2f}")


if __name__ == "__main__":
    main()
