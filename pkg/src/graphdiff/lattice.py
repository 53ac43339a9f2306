"""Sublattice detection for boundary subspaces and positivity checks for L.

A subspace X of R^n is a sublattice exactly when the cone X n R^n_+ is
generated by nonnegative vectors with pairwise disjoint supports that span
X; it is Stonean when those generators are constant on their supports.
The extreme rays are enumerated per connected component of X (coordinates
that cannot be split into independent blocks), then the verdict is
cross-checked against random samples of |x| and x ^ 1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .boundary import BoundaryData, CouplingOperator, Subspace

TOL = 1e-9
MAX_PATTERNS = 200_000
ORACLE_SAMPLES = 200
SAMPLE_TIMES = tuple(10.0 ** k for k in range(-3, 2))


class LatticeOracleError(RuntimeError):
    """Constructive and randomized lattice verdicts disagree."""


class HypothesisError(ValueError):
    pass


@dataclass(eq=False)
class LatticeClassification:
    is_sublattice: bool
    is_stonean: bool
    lattice_basis: np.ndarray  # n x k, nonnegative, disjoint supports; max entry 1 per column
    witness: np.ndarray | None = None
    witness_kind: str | None = None  # "modulus" or "min_one"
    rays: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    components: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "is_sublattice": self.is_sublattice,
            "is_stonean": self.is_stonean,
            "basis": self.lattice_basis.T.tolist(),
            "witness": None if self.witness is None else self.witness.tolist(),
            "witness_kind": self.witness_kind,
        }


def _orth(V: np.ndarray) -> np.ndarray:
    if V.size == 0:
        return np.zeros((V.shape[0], 0))
    return linalg.orth(V, rcond=TOL)


def _dist(Q: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(y - Q @ (Q.T @ y)))


def components(Q: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Split coordinates into blocks on which X decomposes as a direct sum.

    Uses the fundamental circuits of a pivot basis of the coordinate
    functionals.  Returns the list of blocks and the coordinates on which X
    vanishes identically.
    """
    n, d = Q.shape
    norms = np.linalg.norm(Q, axis=1)
    loops = np.flatnonzero(norms <= TOL)
    if d == 0:
        return [], np.arange(n)
    Mt = Q.T  # d x n, column i is the functional x -> x_i
    _, _, piv = linalg.qr(Mt, pivoting=True)
    P = piv[:d]
    R = linalg.solve(Mt[:, P], Mt)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for j in range(n):
        if j in loops:
            continue
        for r in np.flatnonzero(np.abs(R[:, j]) > TOL * max(1.0, np.abs(R[:, j]).max())):
            parent[find(j)] = find(P[r])
    groups: dict[int, list[int]] = {}
    for j in range(n):
        if j not in loops:
            groups.setdefault(find(j), []).append(j)
    return [np.array(g) for g in sorted(groups.values())], loops


def extreme_rays(Qc: np.ndarray) -> np.ndarray | None:
    """Extreme rays of {x in span(Qc)} n orthant, by zero-pattern enumeration.

    A nonnegative x in X spans an extreme ray iff the coordinates where it
    vanishes cut X down to a line, so it suffices to try every set of d-1
    coordinates.  Returns None when the enumeration is too large.
    """
    n, d = Qc.shape
    if d == 0:
        return np.zeros((n, 0))
    if math.comb(n, d - 1) > MAX_PATTERNS:
        return None
    found: dict[tuple, np.ndarray] = {}
    for Z in itertools.combinations(range(n), d - 1):
        sub = Qc[list(Z), :]
        if d > 1:
            s = linalg.svdvals(sub)
            if s[-1] <= TOL:
                continue
            a = linalg.null_space(sub, rcond=TOL)
            if a.shape[1] != 1:
                continue
            y = Qc @ a[:, 0]
        else:
            y = Qc[:, 0].copy()
        y[np.abs(y) <= TOL * np.abs(y).max()] = 0.0
        if np.all(y <= 0):
            y = -y
        if not np.all(y >= 0) or not y.any():
            continue
        y = y / y.max()
        key = tuple(np.round(y, 8))
        found.setdefault(key, y)
    if not found:
        return np.zeros((n, 0))
    return np.array([found[k] for k in sorted(found)]).T


def _constructive(Q: np.ndarray):
    n, d = Q.shape
    blocks, _ = components(Q)
    rays = []
    sub_ok = True
    comp_info = []
    for C in blocks:
        Qc = _orth(Q[C, :])
        R = extreme_rays(Qc)
        comp_info.append({"coords": C.tolist(), "dim": Qc.shape[1],
                          "rays": None if R is None else R.shape[1]})
        if R is None:
            # a connected block of dimension >= 2 never splits into disjoint atoms
            sub_ok = False
            continue
        for k in range(R.shape[1]):
            full = np.zeros(n)
            full[C] = R[:, k]
            rays.append(full)
    rays = np.array(rays).T if rays else np.zeros((n, 0))
    if sub_ok and rays.shape[1]:
        supp = rays > 0
        overlap = supp.T.astype(int) @ supp.astype(int)
        disjoint = np.all(overlap[~np.eye(rays.shape[1], dtype=bool)] == 0)
        sub_ok = disjoint and np.linalg.matrix_rank(rays, tol=TOL) == d
    elif sub_ok:
        sub_ok = d == 0
    stonean = sub_ok and all(np.allclose(r[r > 0], 1.0, atol=TOL) for r in rays.T)
    return sub_ok, stonean, rays, comp_info


def _find_modulus_witness(Q: np.ndarray, rng) -> np.ndarray | None:
    cands = [Q[:, k] for k in range(Q.shape[1])]
    cands += [Q @ rng.standard_normal(Q.shape[1]) for _ in range(50)]
    best, best_v = None, 0.0
    for x in cands:
        v = _dist(Q, np.abs(x)) / max(np.linalg.norm(x), 1e-300)
        if v > best_v:
            best, best_v = x, v
    return best if best_v > TOL else None


def _min_one_witness(Q: np.ndarray, rays: np.ndarray) -> np.ndarray | None:
    for r in rays.T:
        pos = r[r > 0]
        if np.ptp(pos) > TOL:
            x = r * 2.0 / (pos.max() + pos.min())
            if _dist(Q, np.minimum(x, 1.0)) > TOL * np.linalg.norm(x):
                return x
    return None


def closure_oracle(Q: np.ndarray, seed: int = 0, samples: int = ORACLE_SAMPLES) -> tuple[bool, bool]:
    """Randomized test of |x| in X and (s x) ^ 1 in X for s in {0.1, 1, 10}."""
    rng = np.random.default_rng(seed)
    d = Q.shape[1]
    if d == 0:
        return True, True
    sub, ston = True, True
    for _ in range(samples):
        x = Q @ rng.standard_normal(d)
        nx = np.linalg.norm(x)
        if _dist(Q, np.abs(x)) > TOL * nx:
            sub = False
        for s in (0.1, 1.0, 10.0):
            y = s * x
            if _dist(Q, np.minimum(y, 1.0)) > TOL * max(np.linalg.norm(y), 1.0):
                ston = False
    return sub, sub and ston


def classify_lattice(X, seed: int = 0) -> LatticeClassification:
    """Decide whether X is a (Stonean) sublattice, with basis or witness.

    ``X`` may be a :class:`Subspace` or an array whose rows span the subspace.
    Lattice operations are coordinatewise, so the trace weights play no role.
    """
    V = X.basis if isinstance(X, Subspace) else np.atleast_2d(np.asarray(X, dtype=float)).T
    if V.size == 0:
        V = np.zeros((V.shape[0], 0))
    if np.iscomplexobj(V):
        raise TypeError("complex scalars are not supported")
    Q = _orth(V)
    sub, ston, rays, comp = _constructive(Q)
    o_sub, o_ston = closure_oracle(Q, seed=seed)
    if (sub, ston) != (o_sub, o_ston):
        raise LatticeOracleError(
            f"constructive verdict (sublattice={sub}, stonean={ston}) disagrees with "
            f"sampled closure (sublattice={o_sub}, stonean={o_ston})"
        )
    witness, kind = None, None
    if not sub:
        witness = _find_modulus_witness(Q, np.random.default_rng(seed))
        kind = "modulus"
    elif not ston:
        witness = _min_one_witness(Q, rays)
        kind = "min_one"
    basis = rays if sub else np.zeros((Q.shape[0], 0))
    return LatticeClassification(sub, ston, basis, witness, kind, rays, comp)


# ---------------------------------------------------------------------------
# positivity of e^{-tL} on X


def _lattice_coordinates(L: CouplingOperator, cls: LatticeClassification):
    """Matrix of L acting on coefficients w.r.t. the disjoint lattice basis."""
    U = cls.lattice_basis
    F = L.form_matrix(U)  # <L u_j, u_i>
    g = np.array([L.subspace.ambient.inner(u, u) for u in U.T])
    return F / g[:, None], F


def _metzler_ok(F: np.ndarray) -> bool:
    off = F[~np.eye(F.shape[0], dtype=bool)]
    tol = 1e-10 * max(np.abs(F).max(initial=0.0), 1e-300)
    return bool(np.all(off <= tol))


def sampled_min_entry(Lc: np.ndarray, times=SAMPLE_TIMES) -> float:
    if Lc.size == 0:
        return 0.0
    return float(min(linalg.expm(-t * Lc).min() for t in times))


def check_L_positive(L: CouplingOperator, cls: LatticeClassification) -> bool:
    """Is e^{-tL} positivity preserving on the sublattice X?"""
    if not cls.is_sublattice:
        raise HypothesisError("X is not a sublattice; the positivity criterion does not apply")
    Lc, F = _lattice_coordinates(L, cls)
    ok = _metzler_ok(F)
    if ok and sampled_min_entry(Lc) < -1e-12:
        raise LatticeOracleError("Metzler coupling produced a negative semigroup entry")
    return ok


def check_L_submarkov(L: CouplingOperator, cls: LatticeClassification) -> bool:
    """Is e^{-tL} submarkovian on the Stonean sublattice X?"""
    if not cls.is_stonean:
        raise HypothesisError("X is not a Stonean sublattice; the submarkov criterion does not apply")
    Lc, F = _lattice_coordinates(L, cls)
    if not _metzler_ok(F):
        return False
    tol = 1e-10 * max(np.abs(F).max(initial=0.0), 1e-300)
    return bool(np.all(F.sum(axis=1) >= -tol))


@dataclass
class HypothesisVerdict:
    sublattice: bool
    stonean: bool
    L_positive: bool
    L_submarkov: bool

    @property
    def pos(self) -> bool:
        return self.sublattice and self.L_positive

    @property
    def submarkov(self) -> bool:
        return self.stonean and self.L_submarkov


def _verdict(L: CouplingOperator, cls: LatticeClassification) -> HypothesisVerdict:
    pos = check_L_positive(L, cls) if cls.is_sublattice else False
    sub = check_L_submarkov(L, cls) if cls.is_stonean else False
    return HypothesisVerdict(cls.is_sublattice, cls.is_stonean, pos, sub)


@dataclass
class TheoremCheck:
    pos_hypotheses: bool
    submarkov_hypotheses: bool
    classification: LatticeClassification | None
    per_vertex: dict[str, HypothesisVerdict] | None = None
    per_vertex_classification: dict[str, LatticeClassification] | None = None

    def to_dict(self) -> dict:
        out = {"pos_hypotheses": self.pos_hypotheses, "submarkov_hypotheses": self.submarkov_hypotheses}
        if self.classification is not None:
            out.update(self.classification.to_dict())
        if self.per_vertex is not None:
            out["per_vertex"] = {
                v: {"is_sublattice": h.sublattice, "is_stonean": h.stonean, "L_positive": h.L_positive,
                    "L_submarkov": h.L_submarkov, "pos_hypotheses": h.pos, "submarkov_hypotheses": h.submarkov,
                    "basis": self.per_vertex_classification[v].lattice_basis.T.tolist(),
                    "witness": (None if self.per_vertex_classification[v].witness is None
                                else self.per_vertex_classification[v].witness.tolist())}
                for v, h in self.per_vertex.items()
            }
        return out


def theorem_check(X, L: CouplingOperator | None = None, seed: int = 0) -> TheoremCheck:
    """Evaluate the lattice hypotheses that make e^{-tH} positive / submarkovian.

    Passing :class:`BoundaryData` built from local conditions gives per-vertex
    verdicts, and the global verdict is their conjunction.
    """
    if isinstance(X, BoundaryData):
        bd = X
        X, L = bd.X, bd.L
        if bd.is_local:
            per, per_cls = {}, {}
            for v, blk in bd.blocks.items():
                c = classify_lattice(blk.X, seed=seed)
                per_cls[v] = c
                per[v] = _verdict(blk.L, c)
            return TheoremCheck(all(h.pos for h in per.values()), all(h.submarkov for h in per.values()),
                                None, per, per_cls)
    if L is None:
        L = CouplingOperator.zero(X)
    cls = classify_lattice(X, seed=seed)
    h = _verdict(L, cls)
    return TheoremCheck(h.pos, h.submarkov, cls)
