"""Singular diffusion on weighted metric graphs, discretized at desk scale.

Edges carry speed measures (density plus atoms), vertices may carry mass,
and boundary data (X, L) glue everything together.  The package assembles
the quadratic form, builds the associated operator H, evolves e^{-tH} and
checks the lattice conditions for positivity and the submarkov property.
"""
from .boundary import (
    BoundaryData,
    CouplingOperator,
    LocalBC,
    Subspace,
    TraceSpace,
    assemble_global,
    assemble_local,
    custom,
    delta,
    density_condition,
    dirichlet,
    free,
    incidence_sets,
    kirchhoff,
    project,
    x0_and_q0,
)
from .graph import Edge, EdgeMeasure, MetricGraph, Vertex, classify, edge_gaps, edge_support, validate
from .lattice import check_L_positive, check_L_submarkov, classify_lattice, theorem_check
from .mesh import build_mesh, discrete_dmu, iota, mesh_graph
from .operator import (
    NotDenseError,
    assemble,
    build_operator,
    build_system,
    lower_bound,
    verify_operator_description,
)
from .semigroup import check_positive, check_submarkov, evolve

__version__ = "0.1.0"

__all__ = [
    "assemble",
    "assemble_global",
    "assemble_local",
    "BoundaryData",
    "build_mesh",
    "build_operator",
    "build_system",
    "check_L_positive",
    "check_L_submarkov",
    "check_positive",
    "check_submarkov",
    "classify",
    "classify_lattice",
    "CouplingOperator",
    "custom",
    "delta",
    "density_condition",
    "dirichlet",
    "discrete_dmu",
    "Edge",
    "edge_gaps",
    "edge_support",
    "EdgeMeasure",
    "evolve",
    "free",
    "incidence_sets",
    "iota",
    "kirchhoff",
    "LocalBC",
    "lower_bound",
    "mesh_graph",
    "MetricGraph",
    "NotDenseError",
    "project",
    "Subspace",
    "theorem_check",
    "TraceSpace",
    "validate",
    "verify_operator_description",
    "x0_and_q0",
    "Vertex",
]
