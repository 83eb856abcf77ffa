"""Build hitting-set instances and compare the learned size with k' = k + n + 2.

The path witness built from a hitting set always fits.  The search,
however, often finds much smaller counting concepts, so "no hitting set"
does not imply "no fit within k' nodes" for this construction.

    python3 demos/hitting_set.py
"""

from dlfit import SearchConfig, bounded_fit
from dlfit.core import fits, node_count, parse_concept
from dlfit.generators import gen_hitting_set, hitting_set_witness


def show(sets, k):
    inst = gen_hitting_set(sets, k)
    print(f"S={sets} k={k}: k'={inst.k_prime}, {len(inst.problem.database.individuals)} individuals, "
          f"smallest hitting set {inst.min_hitting_set}")
    if inst.has_hitting_set:
        witness = parse_concept(hitting_set_witness(inst))
        print(f"  witness ({node_count(witness)} nodes) fits: {fits(witness, inst.problem).ok}")
    res = bounded_fit(inst.problem, SearchConfig(fragment="ALCQI", max_stage=inst.k_prime))
    print(f"  search: {res.status} {res.concept_text()} ({res.node_count} nodes, {res.elapsed:.2f}s)")


def main():
    show([{1}], 1)
    show([{1, 3}, {2, 4}], 2)
    show([{1}, {2}], 1)


if __name__ == "__main__":
    main()
