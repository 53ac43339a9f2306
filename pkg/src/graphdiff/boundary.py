"""Trace space, boundary subspaces X, coupling operators L and local builders.

The trace space is R^(E1' u V1) with the weighted product that puts weight 1
on edge ends and mu_v on massive vertices.  Subspaces keep a basis that is
orthonormal for that product, so projections and adjoints below are all
weighted ones.  Lattice operations elsewhere are coordinatewise and ignore
the weights.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, NamedTuple

import numpy as np
from scipy import linalg

from .graph import MetricGraph, classify

RANK_TOL = 1e-10

Coord = tuple  # ("edge", eid, j) or ("vertex", vid)


@dataclass(frozen=True, eq=False)
class TraceSpace:
    coords: tuple[Hashable, ...]
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.coords),) or np.any(w <= 0):
            raise ValueError("trace weights must be positive, one per coordinate")
        object.__setattr__(self, "weights", w)

    @classmethod
    def euclidean(cls, n: int) -> "TraceSpace":
        return cls(tuple(range(n)), np.ones(n))

    @classmethod
    def of_graph(cls, graph: MetricGraph) -> "TraceSpace":
        part = classify(graph)
        coords = [("edge", e, j) for e, j in part.E1_prime] + [("vertex", v) for v in part.V1]
        weights = [1.0] * len(part.E1_prime) + [graph.vertex(v).mass for v in part.V1]
        return cls(tuple(coords), np.array(weights, dtype=float))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, coord) -> int:
        return self.coords.index(coord)

    def vertex_indices(self) -> np.ndarray:
        return np.array([i for i, c in enumerate(self.coords) if isinstance(c, tuple) and c[0] == "vertex"], dtype=int)

    def inner(self, x, y) -> float:
        return float(np.sum(self.weights * np.asarray(x) * np.asarray(y)))


class Subspace:
    """Subspace of a trace space stored through a weighted-orthonormal basis."""

    def __init__(self, ambient: TraceSpace, vectors=None, *, orthonormal: bool = False):
        self.ambient = ambient
        n = ambient.dim
        V = np.zeros((0, n)) if vectors is None else np.atleast_2d(np.asarray(vectors, dtype=float))
        if V.size == 0:
            V = np.zeros((0, n))
        if V.shape[1] != n:
            raise ValueError(f"basis vectors must have length {n}, got {V.shape[1]}")
        V = V.T
        self.given = V
        if orthonormal or V.shape[1] == 0:
            self.basis = V
            self.R = np.eye(V.shape[1])
            return
        sw = np.sqrt(ambient.weights)
        Q, R = linalg.qr(sw[:, None] * V, mode="economic")
        d = np.abs(np.diag(R))
        if d.min() <= RANK_TOL * max(d.max(), 1.0):
            raise ValueError("subspace basis vectors are linearly dependent")
        self.basis = Q / sw[:, None]
        # given = basis @ R
        self.R = R

    @classmethod
    def full(cls, ambient: TraceSpace) -> "Subspace":
        return cls(ambient, np.diag(1 / np.sqrt(ambient.weights)), orthonormal=True)

    @classmethod
    def zero(cls, ambient: TraceSpace) -> "Subspace":
        return cls(ambient, None)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def coefficients(self, xi) -> np.ndarray:
        return self.basis.T @ (self.ambient.weights * np.asarray(xi, dtype=float))

    def projector(self) -> np.ndarray:
        """Weighted orthogonal projector onto the subspace, as a matrix."""
        return self.basis @ (self.basis.T * self.ambient.weights)

    def contains(self, xi, tol: float = 1e-9) -> bool:
        xi = np.asarray(xi, dtype=float)
        r = xi - project(self, xi)
        return np.sqrt(self.ambient.inner(r, r)) <= tol * max(np.sqrt(self.ambient.inner(xi, xi)), 1e-300)


def project(X: Subspace, xi) -> np.ndarray:
    """Weighted orthogonal projection of ``xi`` onto ``X``."""
    return X.basis @ X.coefficients(xi)


@dataclass(eq=False)
class CouplingOperator:
    """Self-adjoint L on X, as a symmetric matrix in X's orthonormal basis."""

    subspace: Subspace
    matrix: np.ndarray

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.matrix, dtype=float)).reshape(self.subspace.dim, self.subspace.dim)
        scale = max(np.abs(L).max(initial=0.0), 1.0)
        if np.abs(L - L.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("coupling matrix is not symmetric")
        self.matrix = 0.5 * (L + L.T)

    @classmethod
    def zero(cls, X: Subspace) -> "CouplingOperator":
        return cls(X, np.zeros((X.dim, X.dim)))

    @classmethod
    def from_form(cls, X: Subspace, form) -> "CouplingOperator":
        """L from its form Gram matrix <L x_j, x_i> on the basis X was given with."""
        F = np.atleast_2d(np.asarray(form, dtype=float))
        k = X.given.shape[1]
        if F.shape != (k, k):
            raise ValueError(f"coupling form must be {k}x{k}, got {F.shape}")
        if k == 0:
            return cls.zero(X)
        Rinv = linalg.inv(X.R)
        return cls(X, Rinv.T @ F @ Rinv)

    def ambient_matrix(self) -> np.ndarray:
        """L extended by zero on the orthogonal complement, in ambient coordinates."""
        U = self.subspace.basis
        return U @ self.matrix @ (U.T * self.subspace.ambient.weights)

    def form_matrix(self, vectors) -> np.ndarray:
        """Gram matrix <L u_j, u_i> for vectors u in X (columns)."""
        C = self.subspace.basis.T @ (self.subspace.ambient.weights[:, None] * np.asarray(vectors, dtype=float))
        return C.T @ self.matrix @ C


# ---------------------------------------------------------------------------
# local boundary conditions


class Incidence(NamedTuple):
    starting: tuple[str, ...]  # E_{1,v,0}
    ending: tuple[str, ...]  # E_{1,v,1}
    ends: tuple[tuple[str, int], ...]  # E_{1,v}


def incidence_sets(graph: MetricGraph) -> dict[str, Incidence]:
    out = {}
    for v in graph.vertices:
        start, end, both = [], [], []
        for e in graph.edges:
            if e.measure.is_zero:
                continue
            if e.source == v.id:
                start.append(e.id)
                both.append((e.id, 0))
            if e.target == v.id:
                end.append(e.id)
                both.append((e.id, 1))
        out[v.id] = Incidence(tuple(start), tuple(end), tuple(both))
    return out


@dataclass(frozen=True)
class LocalBC:
    """Boundary condition at one vertex.

    ``kind`` is one of ``"kirchhoff"``, ``"delta"``, ``"dirichlet"``, ``"free"``
    or ``"custom"``.  For ``custom`` the basis vectors live in the local
    coordinates E_{1,v} (then v itself when massive) and ``form`` is the Gram
    matrix of <L_v x_j, x_i> on that basis.
    """

    kind: str = "kirchhoff"
    strength: float = 0.0
    basis: tuple = ()
    form: tuple | None = None

    KINDS = ("kirchhoff", "delta", "dirichlet", "free", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")


def kirchhoff() -> LocalBC:
    return LocalBC("kirchhoff")


def delta(strength: float) -> LocalBC:
    return LocalBC("delta", float(strength))


def dirichlet() -> LocalBC:
    return LocalBC("dirichlet")


def free() -> LocalBC:
    return LocalBC("free")


def custom(basis, form=None) -> LocalBC:
    basis = tuple(tuple(float(x) for x in row) for row in basis)
    form = None if form is None else tuple(tuple(float(x) for x in row) for row in form)
    return LocalBC("custom", basis=basis, form=form)


@dataclass(eq=False)
class LocalBlock:
    vertex: str
    indices: np.ndarray  # positions of the local coordinates in the global trace space
    X: Subspace
    L: CouplingOperator


@dataclass(eq=False)
class BoundaryData:
    X: Subspace
    L: CouplingOperator
    blocks: dict[str, LocalBlock] | None = None

    def __iter__(self):
        return iter((self.X, self.L))

    @property
    def is_local(self) -> bool:
        return self.blocks is not None


def _local_pair(bc: LocalBC, space: TraceSpace, vid: str):
    n = space.dim
    if bc.kind in ("kirchhoff", "delta"):
        if n == 0:
            X = Subspace.zero(space)
            return X, CouplingOperator.zero(X)
        X = Subspace(space, np.ones(n))
        return X, CouplingOperator.from_form(X, [[bc.strength if bc.kind == "delta" else 0.0]])
    if bc.kind == "dirichlet":
        X = Subspace.zero(space)
        return X, CouplingOperator.zero(X)
    if bc.kind == "free":
        X = Subspace.full(space)
        return X, CouplingOperator.zero(X)
    rows = [np.asarray(r, dtype=float) for r in bc.basis]
    for r in rows:
        if r.shape != (n,):
            raise ValueError(
                f"nonlocal block at vertex {vid!r}: basis vector of length {r.size}, "
                f"local space has {n} coordinates"
            )
    X = Subspace(space, rows or None)
    form = np.zeros((len(rows), len(rows))) if bc.form is None else bc.form
    return X, CouplingOperator.from_form(X, form)


def assemble_local(graph: MetricGraph, local: Mapping[str, LocalBC] | None = None,
                   default: LocalBC | None = None) -> BoundaryData:
    """Direct sum of per-vertex boundary conditions.

    Vertices missing from ``local`` get ``default`` (Kirchhoff unless given).
    """
    local = dict(local or {})
    unknown = set(local) - {v.id for v in graph.vertices}
    if unknown:
        raise ValueError(f"boundary condition for unknown vertices {sorted(unknown)}")
    default = default or kirchhoff()
    space = TraceSpace.of_graph(graph)
    inc = incidence_sets(graph)
    n = space.dim
    basis_cols, L_blocks, blocks = [], [], {}
    for v in graph.vertices:
        coords = [("edge", e, j) for e, j in inc[v.id].ends]
        if v.mass > 0:
            coords.append(("vertex", v.id))
        idx = np.array([space.index(c) for c in coords], dtype=int)
        lspace = TraceSpace(tuple(coords), space.weights[idx])
        Xv, Lv = _local_pair(local.get(v.id, default), lspace, v.id)
        blocks[v.id] = LocalBlock(v.id, idx, Xv, Lv)
        for k in range(Xv.dim):
            col = np.zeros(n)
            col[idx] = Xv.basis[:, k]
            basis_cols.append(col)
        L_blocks.append(Lv.matrix)
    X = Subspace(space, basis_cols or None, orthonormal=True)
    L = CouplingOperator(X, linalg.block_diag(*L_blocks) if L_blocks else np.zeros((0, 0)))
    return BoundaryData(X, L, blocks)


def assemble_global(graph: MetricGraph, basis, form=None) -> BoundaryData:
    """Boundary data given directly in global trace coordinates."""
    space = TraceSpace.of_graph(graph)
    X = Subspace(space, basis if len(basis) else None)
    form = np.zeros((X.dim, X.dim)) if form is None else form
    return BoundaryData(X, CouplingOperator.from_form(X, form))


# ---------------------------------------------------------------------------
# density condition, X0 and Q0


@dataclass(eq=False)
class DensityResult:
    holds: bool
    rank: int
    n_vertices: int
    certificates: dict = field(default_factory=dict)  # vertex coord -> xi^v

    def __bool__(self):
        return self.holds


def density_condition(X: Subspace) -> DensityResult:
    """Is the projection of X onto the massive-vertex coordinates onto?

    When it is, each massive vertex v gets a certificate xi^v in X with
    xi^v(v) = 1 and xi^v(w) = 0 for the other massive vertices.
    """
    vidx = X.ambient.vertex_indices()
    k = len(vidx)
    if k == 0:
        return DensityResult(True, 0, 0)
    Uv = X.basis[vidx, :]
    if X.dim == 0:
        return DensityResult(False, 0, k)
    s = linalg.svdvals(Uv)
    rank = int(np.sum(s > RANK_TOL * max(s.max(initial=0.0), 1.0)))
    if rank < k:
        return DensityResult(False, rank, k)
    C = linalg.lstsq(Uv, np.eye(k))[0]
    certs = {}
    for i, vi in enumerate(vidx):
        xi = X.basis @ C[:, i]
        xi[vidx] = np.eye(k)[i]
        certs[X.ambient.coords[vi]] = xi
    return DensityResult(True, rank, k, certs)


def x0_and_q0(X: Subspace) -> tuple[Subspace, np.ndarray]:
    """X0 = X with all massive-vertex coordinates zero, and the weighted projector onto it."""
    vidx = X.ambient.vertex_indices()
    if len(vidx) == 0 or X.dim == 0:
        X0 = Subspace(X.ambient, X.basis.T, orthonormal=True)
    else:
        N = linalg.null_space(X.basis[vidx, :], rcond=RANK_TOL)
        X0 = Subspace(X.ambient, (X.basis @ N).T, orthonormal=True)
    return X0, X0.projector()
