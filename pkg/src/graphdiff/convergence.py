"""Mesh-refinement studies: eigenvalue errors and the endpoint correction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryData
from .graph import MetricGraph
from .operator import build_operator, build_system, endpoint_correction


def fit_rate(h, err) -> float:
    """Least-squares slope of log(err) against log(h)."""
    h, err = np.asarray(h, dtype=float), np.asarray(err, dtype=float)
    keep = err > 0
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(h[keep]), np.log(err[keep]), 1)[0])


@dataclass
class ConvergenceTable:
    h: np.ndarray
    eigenvalues: np.ndarray
    eigen_errors: np.ndarray
    eps_norms: np.ndarray
    eigen_rate: float
    eps_rate: float
    reference: float | None

    def to_dict(self) -> dict:
        return {
            "levels": [
                {"h": float(h), "eigenvalue": float(lam), "eigen_error": float(err), "eps_norm": float(eps)}
                for h, lam, err, eps in zip(self.h, self.eigenvalues, self.eigen_errors, self.eps_norms)
            ],
            "eigen_rate": self.eigen_rate,
            "eps_rate": self.eps_rate,
            "reference": self.reference,
        }


def convergence_study(graph: MetricGraph, boundary: BoundaryData, h0: float, levels: int = 4,
                      eigen_index: int = 1, reference: float | None = None) -> ConvergenceTable:
    """Refine h0 / 2^k for k = 0..levels and fit convergence rates.

    Eigenvalue errors use ``reference`` when given, otherwise differences of
    successive levels.  The endpoint correction is evaluated on the
    M-normalized eigenvector number ``eigen_index``.
    """
    hs = h0 / 2.0 ** np.arange(levels + 1)
    lams, eps = [], []
    for h in hs:
        op = build_operator(build_system(graph, boundary, float(h)))
        lams.append(op.eigenvalues[eigen_index])
        eps.append(np.linalg.norm(endpoint_correction(op, op.modes[:, eigen_index])))
    lams, eps = np.array(lams), np.array(eps)
    if reference is not None:
        errs, herr = np.abs(lams - reference), hs
    else:
        errs, herr = np.abs(np.diff(lams)), hs[:-1]
        errs = np.append(errs, np.nan)
    rate = fit_rate(herr, errs[:len(herr)])
    return ConvergenceTable(hs, lams, errs, eps, rate, fit_rate(hs, eps), reference)
