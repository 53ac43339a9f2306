"""Which boundary conditions keep the heat flow positive and submarkovian?

For every graph in the bundled corpus this compares the structural verdict
(lattice hypotheses on the boundary data) with the exact verdict on the
discrete semigroup, plus the worst sampled kernel entries.
"""
from graphdiff import corpus
from graphdiff.lattice import theorem_check
from graphdiff.operator import build_operator, build_system
from graphdiff.semigroup import check_positive, check_submarkov


def main():
    head = f"{'graph':26s} {'hyp pos':>8s} {'hyp sub':>8s} {'positive':>9s} {'submarkov':>10s} {'min S':>10s} {'max S1-1':>10s}"
    print(head)
    print("-" * len(head))
    for name in corpus.names():
        g, bd = corpus.load(name)
        op = build_operator(build_system(g, bd, 0.05))
        tc = theorem_check(bd)
        pos, sub = check_positive(op), check_submarkov(op)
        print(f"{name:26s} {tc.pos_hypotheses!s:>8s} {tc.submarkov_hypotheses!s:>8s} "
              f"{pos.holds_for_all_t!s:>9s} {sub.holds_for_all_t!s:>10s} "
              f"{pos.sampled_min_entry:10.2e} {pos.sampled_max_one_excess:10.2e}")


if __name__ == "__main__":
    main()
