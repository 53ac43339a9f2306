"""Discrete form, constrained operator H and checks of its boundary description.

Unknowns are the nodal values on every massive edge followed by the values
at the massive vertices.  With lumped masses the form is

    tau(f, g) = f^T K g + <L T f, T g>,

where K is the cellwise 1/length stiffness (gap cells included, since the
interpolant is affine across gaps) and T reads edge ends and vertex values.
H is then the unique operator on D = {f : T f in X} with <Hf, g>_M = tau(f, g).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .boundary import RANK_TOL, BoundaryData, CouplingOperator, Subspace, TraceSpace, density_condition, x0_and_q0
from .graph import MetricGraph, classify
from .mesh import EdgeMesh, mesh_graph


class NotDenseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GlobalDofMap:
    edge_slices: dict[str, slice]
    vertex_dofs: dict[str, int]
    n: int
    trace_dofs: np.ndarray  # DOF read by each trace coordinate, in trace order

    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.trace_dofs] = False
        return np.flatnonzero(mask)


def build_dof_map(graph: MetricGraph, meshes: dict[str, EdgeMesh], space: TraceSpace) -> GlobalDofMap:
    part = classify(graph)
    slices, start = {}, 0
    for eid in part.E1:
        slices[eid] = slice(start, start + meshes[eid].size)
        start += meshes[eid].size
    vdofs = {}
    for vid in part.V1:
        vdofs[vid] = start
        start += 1
    tdofs = []
    for c in space.coords:
        if c[0] == "edge":
            s = slices[c[1]]
            tdofs.append(s.start if c[2] == 0 else s.stop - 1)
        else:
            tdofs.append(vdofs[c[1]])
    return GlobalDofMap(slices, vdofs, start, np.array(tdofs, dtype=int))


@dataclass(eq=False)
class DiscreteSystem:
    graph: MetricGraph
    meshes: dict[str, EdgeMesh]
    dof_map: GlobalDofMap
    mass: np.ndarray  # diagonal of M
    K: np.ndarray
    T: np.ndarray
    W: np.ndarray  # diagonal of the trace weights
    A: np.ndarray
    boundary: BoundaryData

    @property
    def M(self) -> np.ndarray:
        return np.diag(self.mass)

    @property
    def n(self) -> int:
        return self.dof_map.n

    def form(self, f, g) -> float:
        return float(np.asarray(f) @ self.A @ np.asarray(g))

    def strace(self, f) -> np.ndarray:
        """Signed trace of the slopes (ingoing derivatives), zero on vertex coordinates."""
        f = np.asarray(f, dtype=float)
        out = np.zeros(len(self.W))
        for i, c in enumerate(self.boundary.X.ambient.coords):
            if c[0] != "edge":
                continue
            mesh = self.meshes[c[1]]
            vals = f[self.dof_map.edge_slices[c[1]]]
            h = mesh.cell_lengths
            out[i] = (vals[1] - vals[0]) / h[0] if c[2] == 0 else -(vals[-1] - vals[-2]) / h[-1]
        return out


def assemble(graph: MetricGraph, meshes: dict[str, EdgeMesh], X: Subspace, L: CouplingOperator,
             boundary: BoundaryData | None = None) -> DiscreteSystem:
    dens = density_condition(X)
    if not dens.holds:
        raise NotDenseError(
            f"form domain not dense: projection of X onto the massive vertices has rank "
            f"{dens.rank} < {dens.n_vertices}"
        )
    space = X.ambient
    dm = build_dof_map(graph, meshes, space)
    n = dm.n
    mass = np.zeros(n)
    K = np.zeros((n, n))
    for eid, sl in dm.edge_slices.items():
        mesh = meshes[eid]
        mass[sl] = mesh.lumped_masses
        idx = np.arange(sl.start, sl.stop)
        k = 1.0 / mesh.cell_lengths
        i, j = idx[:-1], idx[1:]
        K[i, i] += k
        K[j, j] += k
        K[i, j] -= k
        K[j, i] -= k
    for vid, d in dm.vertex_dofs.items():
        mass[d] = graph.vertex(vid).mass
    T = np.zeros((space.dim, n))
    T[np.arange(space.dim), dm.trace_dofs] = 1.0
    W = space.weights
    U = X.basis
    C = U.T @ (W[:, None] * T)  # coefficients of T f in the orthonormal basis of X
    A = K + C.T @ L.matrix @ C
    A = 0.5 * (A + A.T)
    return DiscreteSystem(graph, meshes, dm, mass, K, T, W, A, boundary or BoundaryData(X, L))


def build_system(graph: MetricGraph, boundary: BoundaryData, h_target: float) -> DiscreteSystem:
    return assemble(graph, mesh_graph(graph, h_target), boundary.X, boundary.L, boundary)


@dataclass(eq=False)
class ConstrainedOperator:
    """H on the constrained space D, with its M-orthonormal eigenpairs.

    ``B`` spans D; ``H_matrix`` acts on B-coefficients; ``modes`` holds the
    eigenvectors in nodal coordinates, so ``modes.T @ M @ modes = I``.
    """

    system: DiscreteSystem
    X: Subspace
    B: np.ndarray
    G: np.ndarray  # B^T M B
    A_B: np.ndarray  # B^T A B
    H_matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # in B coordinates, G-orthonormal
    modes: np.ndarray = field(init=False)

    def __post_init__(self):
        self.modes = self.B @ self.eigenvectors

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0]) if len(self.eigenvalues) else np.inf

    @property
    def dim(self) -> int:
        return self.B.shape[1]

    def coefficients(self, f) -> np.ndarray:
        """B-coefficients of the M-orthogonal projection of a nodal vector onto D."""
        return linalg.solve(self.G, self.B.T @ (self.system.mass * np.asarray(f, dtype=float)), assume_a="pos")

    def project(self, f) -> np.ndarray:
        return self.B @ self.coefficients(f)

    def apply(self, f) -> np.ndarray:
        """H f in nodal coordinates, for f in D."""
        return self.B @ (self.H_matrix @ self.coefficients(f))

    def inner(self, f, g) -> float:
        return float(np.sum(self.system.mass * np.asarray(f) * np.asarray(g)))


def constraint_basis(system: DiscreteSystem, X: Subspace) -> np.ndarray:
    """Orthonormal basis of {f : P T f = 0}, P the weighted projector onto X-perp.

    Columns touching no trace DOF are unit vectors; the trace block is the
    numerical kernel of P from an SVD with threshold RANK_TOL * max(sigma_max, 1).
    """
    dm = system.dof_map
    P = np.eye(X.ambient.dim) - X.projector()
    if P.size:
        _, s, Vt = linalg.svd(P)
        # nonzero singular values of a projector are >= 1, so the cutoff is absolute
        rank = int(np.sum(s > RANK_TOL * max(s.max(initial=0.0), 1.0)))
        kernel = Vt[rank:].T
    else:
        kernel = np.zeros((0, 0))
    free = dm.free_dofs()
    B = np.zeros((dm.n, len(free) + kernel.shape[1]))
    B[free, np.arange(len(free))] = 1.0
    B[dm.trace_dofs, len(free):] = kernel
    return B


def build_operator(system: DiscreteSystem, X: Subspace | None = None, eigen_count: int | None = None) -> ConstrainedOperator:
    X = X if X is not None else system.boundary.X
    B = constraint_basis(system, X)
    G = B.T @ (system.mass[:, None] * B)
    A_B = B.T @ system.A @ B
    A_B = 0.5 * (A_B + A_B.T)
    G = 0.5 * (G + G.T)
    try:
        linalg.cholesky(G)
    except linalg.LinAlgError as exc:
        raise ValueError("constrained mass matrix is singular") from exc
    H = linalg.solve(G, A_B, assume_a="pos")
    d = B.shape[1]
    if d == 0:
        lam, psi = np.zeros(0), np.zeros((0, 0))
    else:
        subset = None if eigen_count is None or eigen_count >= d else (0, eigen_count - 1)
        # generalized symmetric-definite problem, Cholesky reduction inside LAPACK
        lam, psi = linalg.eigh(A_B, G, subset_by_index=subset)
        # eigenvalues inside the rounding band of a zero eigenvalue are zero; left as
        # +-1e-14 they make e^{-tH}1 drift away from 1 for large t
        band = d * np.finfo(float).eps * np.abs(H).sum(axis=1).max()
        lam = np.where(np.abs(lam) <= band, 0.0, lam)
    return ConstrainedOperator(system, X, B, G, A_B, H, lam, psi)


def lower_bound(op: ConstrainedOperator) -> float:
    return op.lambda_min


# ---------------------------------------------------------------------------
# boundary description checks


@dataclass
class CheckReport:
    interior_residual: float
    boundary_identity_residual: float
    vertex_residual: float
    eps_norm: float
    tol: float
    samples: int

    @property
    def passed(self) -> bool:
        return max(self.interior_residual, self.boundary_identity_residual, self.vertex_residual) <= self.tol

    def to_dict(self) -> dict:
        return {
            "interior_residual": self.interior_residual,
            "boundary_identity_residual": self.boundary_identity_residual,
            "vertex_residual": self.vertex_residual,
            "eps_norm": self.eps_norm,
            "tol": self.tol,
            "samples": self.samples,
            "passed": self.passed,
        }


def _rel(res, *scales) -> float:
    s = max([np.max(np.abs(x), initial=0.0) for x in scales] + [1e-300])
    return float(np.max(np.abs(res), initial=0.0) / s)


def endpoint_correction(op: ConstrainedOperator, f, Hf=None) -> np.ndarray:
    """eps_h(e, j) = -m_(e,j) (Hf)(endpoint node); zero on vertex coordinates."""
    sysm = op.system
    Hf = op.apply(f) if Hf is None else Hf
    eps = np.zeros(len(sysm.W))
    for i, c in enumerate(op.X.ambient.coords):
        if c[0] == "edge":
            d = sysm.dof_map.trace_dofs[i]
            eps[i] = -sysm.mass[d] * Hf[d]
    return eps


def operator_identities(op: ConstrainedOperator, f, certificates=None) -> dict:
    """Residuals of the interior, boundary and vertex identities for one f in D."""
    sysm = op.system
    X = op.X
    W = sysm.W
    f = np.asarray(f, dtype=float)
    Hf = op.apply(f)

    # interior: H f = -(slope jump) / m at every non-trace node
    free = sysm.dof_map.free_dofs()
    rhs = np.zeros(sysm.n)
    mag = np.zeros(sysm.n)  # size of the individual slope quotients, for a relative scale
    for eid, sl in sysm.dof_map.edge_slices.items():
        mesh = sysm.meshes[eid]
        s = np.diff(f[sl]) / mesh.cell_lengths
        m = mesh.lumped_masses[1:-1]
        rhs[sl.start + 1:sl.stop - 1] = -np.diff(s) / m
        mag[sl.start + 1:sl.stop - 1] = (np.abs(s[1:]) + np.abs(s[:-1])) / m
    interior = _rel(Hf[free] - rhs[free], Hf[free], rhs[free], mag[free])

    xi = sysm.T @ f
    Lxi = sysm.boundary.L.ambient_matrix() @ xi
    st = sysm.strace(f)
    eps = endpoint_correction(op, f, Hf)
    _, Q0 = x0_and_q0(X)
    lhs = Q0 @ (st - Lxi)
    boundary = _rel(lhs - Q0 @ eps, st, Lxi, eps)

    vertex = 0.0
    certs = density_condition(X).certificates if certificates is None else certificates
    for coord, xv in certs.items():
        d = sysm.dof_map.vertex_dofs[coord[1]]
        left = Hf[d] * sysm.graph.vertex(coord[1]).mass
        right = float(np.sum(W * (Lxi - st + eps) * xv))
        vertex = max(vertex, _rel(left - right, left, right, W * Lxi, W * st, eps))
    return {
        "interior": interior,
        "boundary": boundary,
        "vertex": vertex,
        "eps_norm": float(np.linalg.norm(eps)),
        "Hf": Hf,
        "eps": eps,
        "strace": st,
    }


def verify_operator_description(op: ConstrainedOperator, system: DiscreteSystem | None = None,
                                X: Subspace | None = None, samples: int = 10, seed: int = 0,
                                tol: float = 1e-10, vectors=None) -> CheckReport:
    """Check the operator description of H on random (or given) vectors of D."""
    if system is not None and system is not op.system:
        raise ValueError("operator was built from a different system")
    if X is not None and X is not op.X:
        raise ValueError("operator was built for a different X")
    if vectors is None:
        rng = np.random.default_rng(seed)
        vectors = op.B @ rng.standard_normal((op.dim, samples))
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float).T).T
    certs = density_condition(op.X).certificates
    worst = {"interior": 0.0, "boundary": 0.0, "vertex": 0.0, "eps_norm": 0.0}
    for k in range(vectors.shape[1]):
        r = operator_identities(op, vectors[:, k], certs)
        for key in worst:
            worst[key] = max(worst[key], r[key])
    return CheckReport(worst["interior"], worst["boundary"], worst["vertex"], worst["eps_norm"], tol,
                       vectors.shape[1])


def representation_residual(op: ConstrainedOperator, f, g) -> float:
    """| <Hf, g>_M - tau(f, g) | / (|f| |g|) for f, g in D."""
    f, g = np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    lhs = op.inner(op.apply(f), g)
    rhs = op.system.form(f, g)
    return abs(lhs - rhs) / (np.linalg.norm(f) * np.linalg.norm(g))
