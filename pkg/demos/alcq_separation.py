"""Problems that need counting: ALC sees the examples as equal, ALCQ does not.

    python3 demos/alcq_separation.py
"""

from dlfit import SearchConfig, bounded_fit
from dlfit.generators import gen_alcq_separation, star_database


def main():
    db = star_database(10, max_successors=4, seed=3)
    problems = gen_alcq_separation(db, seed=0)
    print(f"{len(problems)} problems from {len(db.individuals)} individuals")
    # merged problems combine the examples of two single ones
    for sp in problems:
        p = sp.problem
        alc = bounded_fit(p, SearchConfig(fragment="ALC", max_stage=10))
        alcq = bounded_fit(p, SearchConfig(fragment="ALCQ", max_stage=10))
        print(f"  P={list(p.positives)} N={list(p.negatives)}")
        print(f"    ALC:  {alc.status} ({alc.reason})")
        print(f"    ALCQ: {alcq.status} {alcq.concept_text()} ({alcq.node_count} nodes)")


if __name__ == "__main__":
    main()
