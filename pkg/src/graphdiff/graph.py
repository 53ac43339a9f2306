"""Weighted metric graphs: vertices with masses, edges carrying speed measures.

Edge measures are restricted to a piecewise-constant density plus finitely
many interior atoms.  Objects here only store data; the standing hypotheses
are checked by :func:`validate`, which reports violations instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence


class DensitySegment(NamedTuple):
    lo: float
    hi: float
    value: float


class Atom(NamedTuple):
    at: float
    mass: float


@dataclass(frozen=True)
class EdgeMeasure:
    """Speed measure on one edge: density segments plus point masses."""

    density: tuple[DensitySegment, ...] = ()
    atoms: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "density", tuple(DensitySegment(*map(float, s)) for s in self.density))
        object.__setattr__(self, "atoms", tuple(Atom(*map(float, a)) for a in self.atoms))

    @classmethod
    def lebesgue(cls, a: float, b: float, value: float = 1.0) -> "EdgeMeasure":
        return cls(density=((a, b, value),))

    @classmethod
    def zero(cls) -> "EdgeMeasure":
        return cls()

    @property
    def is_zero(self) -> bool:
        return not self.density and not self.atoms

    @property
    def total(self) -> float:
        return sum(w * (hi - lo) for lo, hi, w in self.density) + sum(m for _, m in self.atoms)

    def scaled(self, c: float) -> "EdgeMeasure":
        return EdgeMeasure(
            density=tuple((lo, hi, c * w) for lo, hi, w in self.density),
            atoms=tuple((x, c * m) for x, m in self.atoms),
        )

    def reflected(self, a: float, b: float) -> "EdgeMeasure":
        """Image of the measure under x -> a + b - x."""
        dens = sorted((a + b - hi, a + b - lo, w) for lo, hi, w in self.density)
        atoms = sorted((a + b - x, m) for x, m in self.atoms)
        return EdgeMeasure(density=tuple(dens), atoms=tuple(atoms))


@dataclass(frozen=True)
class Vertex:
    id: str
    mass: float = 0.0


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    interval: tuple[float, float] = (0.0, 1.0)
    measure: EdgeMeasure = field(default_factory=EdgeMeasure)

    def __post_init__(self):
        object.__setattr__(self, "interval", tuple(float(x) for x in self.interval))

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    def reversed(self) -> "Edge":
        """Same edge traversed in the opposite direction."""
        a, b = self.interval
        return Edge(self.id, self.target, self.source, (a, b), self.measure.reflected(a, b))


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)


class Violation(NamedTuple):
    kind: str  # "vertex" | "edge" | "graph"
    id: str
    reason: str

    def __str__(self):
        return f"{self.kind} {self.id!r}: {self.reason}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"valid": self.ok, "violations": [v._asdict() for v in self.violations]}


class Partition(NamedTuple):
    E0: tuple[str, ...]
    E1: tuple[str, ...]
    V0: tuple[str, ...]
    V1: tuple[str, ...]
    E1_prime: tuple[tuple[str, int], ...]


def _measure_violations(edge: Edge) -> list[str]:
    out = []
    a, b = edge.interval
    mu = edge.measure
    for lo, hi, w in mu.density:
        if not lo < hi:
            out.append(f"density segment ({lo}, {hi}) is empty or reversed")
        if lo < a or hi > b:
            out.append(f"density segment ({lo}, {hi}) leaves the interval [{a}, {b}]")
        if not w > 0:
            out.append(f"density value {w} must be positive")
    segs = sorted(mu.density)
    for s, t in zip(segs, segs[1:]):
        if t.lo < s.hi:
            out.append(f"density segments ({s.lo}, {s.hi}) and ({t.lo}, {t.hi}) overlap")
    for x, m in mu.atoms:
        if not m > 0:
            out.append(f"atom mass {m} at {x} must be positive")
        if x == a or x == b:
            out.append(f"atom at endpoint {x}")
        elif not a < x < b:
            out.append(f"atom at {x} outside the interval [{a}, {b}]")
    if not mu.is_zero:
        starts = any(lo == a for lo, _, _ in mu.density)
        ends = any(hi == b for _, hi, _ in mu.density)
        if not (starts and ends):
            missing = [p for p, ok in ((a, starts), (b, ends)) if not ok]
            out.append(f"endpoints not in support: {missing}")
    return out


def validate(graph: MetricGraph) -> ValidationReport:
    """Collect every violated standing hypothesis of ``graph``."""
    found: list[Violation] = []
    seen: set[str] = set()
    for v in graph.vertices:
        if v.id in seen:
            found.append(Violation("vertex", v.id, "duplicate vertex id"))
        seen.add(v.id)
        if not v.mass >= 0:
            found.append(Violation("vertex", v.id, f"mass {v.mass} must be nonnegative"))
    seen_e: set[str] = set()
    for e in graph.edges:
        if e.id in seen_e:
            found.append(Violation("edge", e.id, "duplicate edge id"))
        seen_e.add(e.id)
        for end in (e.source, e.target):
            if end not in seen:
                found.append(Violation("edge", e.id, f"unknown vertex {end!r}"))
        if not e.a < e.b:
            found.append(Violation("edge", e.id, f"interval ({e.a}, {e.b}) needs a < b"))
            continue
        found.extend(Violation("edge", e.id, r) for r in _measure_violations(e))
    return ValidationReport(tuple(found))


def classify(graph: MetricGraph) -> Partition:
    E0 = tuple(e.id for e in graph.edges if e.measure.is_zero)
    E1 = tuple(e.id for e in graph.edges if not e.measure.is_zero)
    V0 = tuple(v.id for v in graph.vertices if v.mass == 0)
    V1 = tuple(v.id for v in graph.vertices if v.mass > 0)
    E1p = tuple((eid, j) for eid in E1 for j in (0, 1))
    return Partition(E0, E1, V0, V1, E1p)


def edge_support(measure: EdgeMeasure, interval: Sequence[float] | None = None) -> list[tuple[float, float]]:
    """Closed support of an edge measure as ordered disjoint pieces.

    Isolated points (atoms in gaps) appear as degenerate pairs ``(x, x)``.
    Touching density segments are merged.
    """
    if measure.is_zero:
        raise ValueError("no support on E0 edge (zero measure)")
    pieces: list[list[float]] = []
    for lo, hi, _ in sorted(measure.density):
        if pieces and lo <= pieces[-1][1]:
            pieces[-1][1] = max(pieces[-1][1], hi)
        else:
            pieces.append([lo, hi])
    for x, _ in measure.atoms:
        if not any(lo <= x <= hi for lo, hi in pieces):
            pieces.append([x, x])
    pieces.sort()
    return [(lo, hi) for lo, hi in pieces]


def edge_gaps(measure: EdgeMeasure, interval: Sequence[float]) -> list[tuple[float, float]]:
    """Open components of the complement of the support in the interval."""
    a, b = interval
    sup = edge_support(measure, interval)
    gaps = []
    left = a
    for lo, hi in sup:
        if lo > left:
            gaps.append((left, lo))
        left = max(left, hi)
    if left < b:
        gaps.append((left, b))
    return gaps

