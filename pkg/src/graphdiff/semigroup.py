"""Heat semigroup e^{-tH} of the discrete operator and its order properties.

The semigroup lives on the constrained space D.  To speak about entries we
use the nodal kernel S(t) = e^{-tH} Pi, where Pi is the M-orthogonal
projection of R^N onto D; a nonnegative f in D is mapped to S(t) f.

Positivity and the submarkov property are decided exactly: D splits as
free nodes plus the embedded boundary subspace, so D is a sublattice iff Pi
is entrywise nonnegative, and then H written in the disjoint lattice basis
of D must be a Metzler-type generator (nonpositive off-diagonal entries,
plus nonnegative row sums for the submarkov case).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operator import ConstrainedOperator

SAMPLE_TIMES = tuple(10.0 ** k for k in range(-3, 2))
VERDICT_NOTE = ("certifies the semigroup of the discrete operator; with lumped masses the discrete "
                "and continuum criteria share the same structure")


@dataclass(eq=False)
class EvolutionResult:
    times: np.ndarray
    states: np.ndarray  # len(times) x N
    min_entry_kernel: np.ndarray
    max_one_excess: np.ndarray
    projection_residual: float = 0.0


def _require_full(op: ConstrainedOperator):
    if op.modes.shape[1] != op.dim:
        raise ValueError("semigroup needs the full spectrum; build the operator without eigen_count")


def kernel(op: ConstrainedOperator, t: float) -> np.ndarray:
    """Nodal matrix of e^{-tH} composed with the projection onto D."""
    _require_full(op)
    Phi = op.modes
    return (Phi * np.exp(-op.eigenvalues * t)) @ (Phi.T * op.system.mass)


def kernel_diagnostics(op: ConstrainedOperator, t: float) -> tuple[float, float]:
    S = kernel(op, t)
    return float(S.min()), float((S.sum(axis=1) - 1.0).max())


def evolve(op: ConstrainedOperator, f0, times, diagnostics: bool = True) -> EvolutionResult:
    """state(t) = sum_i exp(-lambda_i t) <f0, psi_i>_M psi_i.

    Initial data outside D is first projected M-orthogonally onto D; the
    size of what was removed is reported as ``projection_residual``.
    """
    _require_full(op)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("semigroup times must be nonnegative")
    f0 = np.asarray(f0, dtype=float)
    m = op.system.mass
    Phi = op.modes
    c = Phi.T @ (m * f0)
    proj = Phi @ c
    r = f0 - proj
    resid = float(np.sqrt(np.sum(m * r * r)))
    start = f0 if resid <= 1e-12 * max(np.sqrt(np.sum(m * f0 * f0)), 1e-300) else proj
    states = np.empty((len(times), len(f0)))
    mins = np.full(len(times), np.nan)
    excess = np.full(len(times), np.nan)
    for k, t in enumerate(times):
        states[k] = start if t == 0 else Phi @ (np.exp(-op.eigenvalues * t) * c)
        if diagnostics:
            mins[k], excess[k] = kernel_diagnostics(op, t)
    return EvolutionResult(times, states, mins, excess, resid)


@dataclass
class Verdict:
    holds_for_all_t: bool
    witness: dict = field(default_factory=dict)
    sampled_min_entry: float = np.nan
    sampled_max_one_excess: float = np.nan
    note: str = VERDICT_NOTE

    def __bool__(self):
        return self.holds_for_all_t

    def to_dict(self) -> dict:
        return {
            "holds_for_all_t": self.holds_for_all_t,
            "witness": self.witness,
            "sampled_min_entry": self.sampled_min_entry,
            "sampled_max_one_excess": self.sampled_max_one_excess,
            "note": self.note,
        }


@dataclass(eq=False)
class NodalLattice:
    """Lattice description of D: projection, atoms, and H in atom coordinates."""

    projection_min: float
    witness: tuple | None  # (i, j) most negative entry of the projection
    atoms: np.ndarray | None  # N x k, nonnegative, disjoint supports
    generator: np.ndarray | None  # k x k matrix of H in atom coordinates
    form: np.ndarray | None  # atoms^T A atoms
    stonean: bool = False


def nodal_lattice(op: ConstrainedOperator, tol: float = 1e-10) -> NodalLattice:
    sysm = op.system
    dm = sysm.dof_map
    td = dm.trace_dofs
    mT = sysm.mass[td]
    # M-orthogonal projection onto X, restricted to the trace DOFs
    U = op.X.basis
    if U.shape[1]:
        G = U.T @ (mT[:, None] * U)
        Pi = U @ np.linalg.solve(G, U.T * mT)
    else:
        Pi = np.zeros((len(td), len(td)))
    pmin = float(Pi.min(initial=0.0))
    scale = max(np.abs(Pi).max(initial=0.0), 1.0)
    if pmin < -tol * scale:
        i, j = np.unravel_index(np.argmin(Pi), Pi.shape)
        return NodalLattice(pmin, (int(td[i]), int(td[j])), None, None, None)
    Pi[np.abs(Pi) <= tol * scale] = 0.0
    atoms, seen = [], set()
    for j in range(len(td)):
        if Pi[j, j] <= 0:
            continue
        col = Pi[:, j]
        key = tuple(np.flatnonzero(col > 0))
        if key in seen:
            continue
        seen.add(key)
        a = np.zeros(sysm.n)
        a[td] = col / col.max()
        atoms.append(a)
    for i in dm.free_dofs():
        a = np.zeros(sysm.n)
        a[i] = 1.0
        atoms.append(a)
    Ua = np.array(atoms).T if atoms else np.zeros((sysm.n, 0))
    supp = (Ua > 0).astype(int)
    if np.any(supp.sum(axis=1) > 1):
        raise RuntimeError("atoms of the nonnegative projection overlap")
    F = Ua.T @ sysm.A @ Ua
    g = np.einsum("ik,i,ik->k", Ua, sysm.mass, Ua)
    Hc = F / g[:, None]
    stonean = all(np.allclose(a[a > 0], 1.0, atol=1e-9) for a in Ua.T)
    return NodalLattice(pmin, None, Ua, Hc, F, stonean)


def _sampled(op: ConstrainedOperator, times=SAMPLE_TIMES) -> tuple[float, float, float, float]:
    worst_min, t_min, worst_exc, t_exc = np.inf, np.nan, -np.inf, np.nan
    for t in times:
        mn, ex = kernel_diagnostics(op, t)
        if mn < worst_min:
            worst_min, t_min = mn, t
        if ex > worst_exc:
            worst_exc, t_exc = ex, t
    return worst_min, t_min, worst_exc, t_exc


def _metzler(Hc: np.ndarray) -> tuple[bool, tuple | None, float]:
    tol_neg = 1e-10 * max(np.abs(Hc).max(initial=0.0), 1e-300)
    off = Hc.copy()
    np.fill_diagonal(off, -np.inf)
    if off.size == 0:
        return True, None, tol_neg
    i, j = np.unravel_index(np.argmax(off), off.shape)
    return bool(off[i, j] <= tol_neg), (int(i), int(j), float(off[i, j])), tol_neg


def check_positive(op: ConstrainedOperator, times=SAMPLE_TIMES) -> Verdict:
    """Is e^{-tH} entrywise nonnegative for every t >= 0?"""
    nl = nodal_lattice(op)
    smin, tmin, sexc, _ = _sampled(op, times)
    if nl.atoms is None:
        w = {"reason": "projection onto the constrained space has a negative entry",
             "entry": list(nl.witness), "value": nl.projection_min, "t": 0.0,
             "sampled_time": tmin}
        return Verdict(False, w, smin, sexc)
    ok, worst, tol_neg = _metzler(nl.generator)
    w = {} if ok else {"reason": "positive off-diagonal entry of H in lattice coordinates",
                       "atoms": list(worst[:2]), "value": worst[2], "tol_neg": tol_neg, "sampled_time": tmin}
    return Verdict(ok, w, smin, sexc)


def check_submarkov(op: ConstrainedOperator, times=SAMPLE_TIMES) -> Verdict:
    """Is e^{-tH} positive with e^{-tH} 1 <= 1 for every t >= 0?"""
    pos = check_positive(op, times)
    if not pos:
        pos.witness = {"cause": "not positivity preserving", **pos.witness}
        return pos
    nl = nodal_lattice(op)
    if not nl.stonean:
        k = next(k for k, a in enumerate(nl.atoms.T) if not np.allclose(a[a > 0], 1.0, atol=1e-9))
        return Verdict(False, {"reason": "constrained space is not closed under f ^ 1",
                               "atom_support": np.flatnonzero(nl.atoms[:, k]).tolist(), "t": 0.0},
                       pos.sampled_min_entry, pos.sampled_max_one_excess)
    rows = nl.generator.sum(axis=1)
    tol = 1e-10 * max(np.abs(nl.generator).max(initial=0.0), 1e-300)
    i = int(np.argmin(rows)) if len(rows) else 0
    ok = bool(len(rows) == 0 or rows[i] >= -tol)
    w = {} if ok else {"reason": "negative row sum of H (H1 < 0)", "atom": i,
                       "nodes": np.flatnonzero(nl.atoms[:, i]).tolist(), "value": float(rows[i])}
    return Verdict(ok, w, pos.sampled_min_entry, pos.sampled_max_one_excess)
