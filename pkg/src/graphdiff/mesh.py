"""Measure-aware edge meshes and the piecewise-linear extension map.

Nodes sit only on the support of the edge measure (density breakpoints,
refinement points inside density segments, atoms), so a nodal vector
interpolated linearly is automatically affine across every gap.  Masses are
lumped: each density cell gives half of its measure to both ends, atoms sit
on their own node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Edge, MetricGraph


@dataclass(frozen=True, eq=False)
class EdgeMesh:
    edge_id: str
    nodes: np.ndarray
    lumped_masses: np.ndarray
    cell_density: np.ndarray  # density value on each cell, 0 on gap cells

    @property
    def cell_lengths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def gap_cells(self) -> np.ndarray:
        return np.flatnonzero(self.cell_density == 0)


def _uniform(lo: float, hi: float, h: float) -> np.ndarray:
    n = max(1, math.ceil((hi - lo) / h - 1e-9))
    return lo + (hi - lo) * np.arange(n + 1) / n


def build_mesh(edge: Edge, h_target: float) -> EdgeMesh:
    """Mesh one massive edge with cells no longer than ``h_target`` on the density part.

    Gap cells are never subdivided.
    """
    if not h_target > 0:
        raise ValueError(f"h_target must be positive, got {h_target}")
    mu = edge.measure
    if mu.is_zero:
        raise ValueError(f"edge {edge.id!r} carries no measure and is not meshed")
    a, b = edge.interval
    pts = [np.array([a, b])]
    for lo, hi, _ in mu.density:
        pts.append(_uniform(lo, hi, h_target))
    pts.append(np.array([x for x, _ in mu.atoms]))
    raw = np.sort(np.concatenate(pts))
    # coincident breakpoints from neighbouring segments
    keep = np.concatenate([[True], np.diff(raw) > 1e-13 * (b - a)])
    nodes = raw[keep]
    nodes[0], nodes[-1] = a, b

    mids = 0.5 * (nodes[:-1] + nodes[1:])
    dens = np.zeros(len(mids))
    for lo, hi, w in mu.density:
        dens[(mids > lo) & (mids < hi)] = w
    half = 0.5 * dens * np.diff(nodes)
    masses = np.zeros(len(nodes))
    masses[:-1] += half
    masses[1:] += half
    for x, m in mu.atoms:
        masses[np.argmin(np.abs(nodes - x))] += m
    return EdgeMesh(edge.id, nodes, masses, dens)


def mesh_graph(graph: MetricGraph, h_target: float) -> dict[str, EdgeMesh]:
    return {e.id: build_mesh(e, h_target) for e in graph.edges if not e.measure.is_zero}


class PiecewiseLinear:
    """Continuous piecewise-linear function with the given breakpoints."""

    def __init__(self, breakpoints, values):
        self.breakpoints = np.asarray(breakpoints, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def __call__(self, x):
        return np.interp(x, self.breakpoints, self.values)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.breakpoints)

    def derivative_right(self, x: float) -> float:
        k = np.searchsorted(self.breakpoints, x, side="right") - 1
        return float(self.slopes[min(k, len(self.slopes) - 1)])

    def derivative_left(self, x: float) -> float:
        k = np.searchsorted(self.breakpoints, x, side="left") - 1
        return float(self.slopes[max(k, 0)])

    def energy(self) -> float:
        """Dirichlet energy, the integral of the squared derivative."""
        return float(np.sum(np.diff(self.values) ** 2 / np.diff(self.breakpoints)))


def iota(values, mesh: EdgeMesh) -> PiecewiseLinear:
    values = np.asarray(values, dtype=float)
    if values.shape != mesh.nodes.shape:
        raise ValueError(f"expected {mesh.size} nodal values, got {values.shape}")
    return PiecewiseLinear(mesh.nodes, values)


def discrete_dmu(values, mesh: EdgeMesh) -> np.ndarray:
    """Lumped measure derivative of the slope at the interior nodes.

    Returns ``(slope_right - slope_left) / m_k`` for k = 1 .. n-2.  At an atom
    node carrying only its atom mass this is exact.
    """
    s = iota(values, mesh).slopes
    return np.diff(s) / mesh.lumped_masses[1:-1]


def signed_trace(values, mesh: EdgeMesh) -> tuple[float, float]:
    """Ingoing derivatives: +slope at the left end, -slope at the right end."""
    s = iota(values, mesh).slopes
    return float(s[0]), float(-s[-1])
