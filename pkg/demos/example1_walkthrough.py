"""Learn a concept that separates two parents by their children's heights.

Both parents have two children, so no feature-free concept can tell them
apart.  With the height feature a two-node concept fits.

    python3 demos/example1_walkthrough.py
"""

from pathlib import Path

from dlfit import SearchConfig, bounded_fit, bisimilar, evaluate
from dlfit.core import Database, FeatureFact, load_facts, load_problem

DATA = Path(__file__).resolve().parent / "data"


def main():
    db = load_facts(DATA / "example1.facts")
    problem = load_problem(DATA / "example1.json", db)
    print("positives:", problem.positives, "negatives:", problem.negatives)

    without = bounded_fit(problem, SearchConfig(fragment="ALCQI", max_stage=6))
    print("ALCQI:", without.status, "-", without.reason)
    stripped = Database([f for f in db.facts() if not isinstance(f, FeatureFact)], db.individuals)
    print("a and b bisimilar once heights are dropped:", bisimilar(stripped, "a", "b"))

    with_f = bounded_fit(problem, SearchConfig(fragment="ALCQf", max_stage=6))
    print("ALCQf:", with_f.status, with_f.concept_text(), f"({with_f.node_count} nodes)")
    for rec in with_f.stages:
        print("  stage", rec["stage"], rec["status"], "thresholds", rec["thresholds"])
    print("metrics:", evaluate(with_f.concept, problem).to_json())


if __name__ == "__main__":
    main()
