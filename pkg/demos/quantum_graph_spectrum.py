"""Spectrum of a Kirchhoff path and a star, against closed forms.

Two unit edges glued with Kirchhoff conditions behave like one interval of
length 2 with free ends, so the eigenvalues approach (k pi / 2)^2.  The
lumped P1 discretization converges at second order.
"""
import numpy as np

from graphdiff import corpus
from graphdiff.operator import build_operator, build_system


def main():
    g, bd = corpus.load("path2_kirchhoff")
    exact = (np.arange(6) * np.pi / 2) ** 2
    print("Kirchhoff path, two unit edges")
    print(f"{'h':>8} " + " ".join(f"lambda_{k:<7d}" for k in range(1, 6)))
    for h in (0.1, 0.05, 0.025, 0.0125):
        lam = build_operator(build_system(g, bd, h)).eigenvalues[:6]
        print(f"{h:8.4f} " + " ".join(f"{x:10.5f}" for x in lam[1:]))
    print(f"{'exact':>8} " + " ".join(f"{x:10.5f}" for x in exact[1:]))

    g, bd = corpus.load("kirchhoff_star")
    lam = build_operator(build_system(g, bd, 0.01)).eigenvalues[:6]
    print("\nKirchhoff star (legs 1, 0.5, 0.75), lowest eigenvalues:")
    print("  " + ", ".join(f"{x:.5f}" for x in lam))


if __name__ == "__main__":
    main()
