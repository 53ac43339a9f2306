"""How the boundary conditions of H are met on a mesh.

On a mixed graph (Lebesgue edge, gap edge with atoms, a massive vertex,
delta and Kirchhoff couplings) the interior, boundary and vertex
identities hold to rounding for every vector of the domain, once the
endpoint correction eps_h = -m (Hf) at edge ends is included.  That
correction shrinks like h.
"""
from graphdiff import corpus
from graphdiff.convergence import convergence_study
from graphdiff.operator import build_operator, build_system, verify_operator_description


def main():
    g, bd = corpus.load("mixed_wentzell")
    op = build_operator(build_system(g, bd, 0.02))
    rep = verify_operator_description(op, samples=25, seed=1)
    for k, v in rep.to_dict().items():
        print(f"{k:28s} {v}")

    tab = convergence_study(g, bd, 0.05, levels=4, eigen_index=1)
    print("\n       h    lambda_1      |eps_h|")
    for h, lam, eps in zip(tab.h, tab.eigenvalues, tab.eps_norms):
        print(f"{h:8.5f}  {lam:10.6f}  {eps:11.3e}")
    print(f"fitted rates: eigenvalue {tab.eigen_rate:.3f}, eps {tab.eps_rate:.3f}")


if __name__ == "__main__":
    main()
