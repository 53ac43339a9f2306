import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphdiff import io as gio
from graphdiff.graph import Edge, EdgeMeasure, MetricGraph, Vertex, classify, edge_gaps, edge_support, validate

from conftest import interval_graph


def reasons(report):
    return [v.reason for v in report.violations]


def test_lebesgue_edge_is_valid():
    assert validate(interval_graph()).ok


def test_pure_atom_edge_has_endpoints_outside_support():
    g = interval_graph(measure=EdgeMeasure(atoms=((0.5, 1.0),)))
    rep = validate(g)
    assert not rep.ok
    assert any("endpoints not in support" in r for r in reasons(rep))


def test_atom_at_endpoint_rejected():
    g = interval_graph(measure=EdgeMeasure(density=((0, 1, 1),), atoms=((0.0, 1.0),)))
    assert any("atom at endpoint" in r for r in reasons(validate(g)))


@pytest.mark.parametrize("measure,needle", [
    (EdgeMeasure(density=((0, 0.6, 1), (0.5, 1, 1))), "overlap"),
    (EdgeMeasure(density=((0, 1, -1),)), "density"),
    (EdgeMeasure(density=((0, 1, 1),), atoms=((1.5, 1.0),)), "outside"),
])
def test_bad_measures_reported(measure, needle):
    rep = validate(interval_graph(measure=measure))
    assert any(needle in r for r in reasons(rep)), reasons(rep)


def test_unknown_vertex_and_duplicates():
    g = MetricGraph((Vertex("a"), Vertex("a")), (Edge("e", "a", "zz", (0, 1), EdgeMeasure.lebesgue(0, 1)),))
    rep = validate(g)
    kinds = {(v.kind, v.id) for v in rep.violations}
    assert ("vertex", "a") in kinds
    assert any("unknown vertex" in r for r in reasons(rep))


def test_negative_vertex_mass_rejected():
    assert not validate(interval_graph(masses=(-1.0, 0.0))).ok


def test_classify_examples():
    p = classify(interval_graph())
    assert list(p.E1) == ["e"] and not p.E0 and not p.V1 and len(p.V0) == 2

    g = MetricGraph((Vertex("v", 1.0), Vertex("w")), (Edge("z", "v", "w", (0, 1), EdgeMeasure.zero()),))
    p = classify(g)
    assert not p.E1 and list(p.V1) == ["v"]

    g = MetricGraph(
        (Vertex("a"), Vertex("b", 0.5), Vertex("c")),
        (Edge("z", "a", "b", (0, 1), EdgeMeasure.zero()), Edge("l", "b", "c", (0, 1), EdgeMeasure.lebesgue(0, 1))),
    )
    p = classify(g)
    assert len(p.E1_prime) == 2 and list(p.V1) == ["b"]


def test_edge_support_examples():
    m = EdgeMeasure(density=((0, 0.2, 1), (0.8, 1, 1)), atoms=((0.5, 1.0),))
    assert edge_support(m) == [(0.0, 0.2), (0.5, 0.5), (0.8, 1.0)]
    assert edge_gaps(m, (0, 1)) == [(0.2, 0.5), (0.5, 0.8)]
    assert edge_support(EdgeMeasure(density=((0, 1, 2),))) == [(0.0, 1.0)]
    assert edge_gaps(EdgeMeasure(density=((0, 1, 2),)), (0, 1)) == []
    assert edge_support(EdgeMeasure(density=((0, 0.5, 1), (0.5, 1, 3)))) == [(0.0, 1.0)]


def test_edge_support_of_zero_measure_is_an_error():
    with pytest.raises(ValueError, match="no support"):
        edge_support(EdgeMeasure.zero())


# -- properties --------------------------------------------------------------

@st.composite
def measures(draw):
    cuts = sorted(set(draw(st.lists(st.floats(0.01, 0.99), min_size=0, max_size=6))))
    pts = [0.0, *cuts, 1.0]
    dens = [(lo, hi, draw(st.floats(0.1, 5.0))) for lo, hi in zip(pts[:-1], pts[1:])
            if hi - lo > 1e-6 and draw(st.booleans())]
    atoms = [(x, draw(st.floats(0.1, 2.0))) for x in draw(st.lists(st.floats(0.05, 0.95), max_size=3, unique=True))]
    return EdgeMeasure(tuple(dens), tuple(atoms))


@st.composite
def graphs(draw):
    nv = draw(st.integers(1, 4))
    verts = tuple(Vertex(f"v{i}", draw(st.sampled_from([0.0, 0.5, 2.0]))) for i in range(nv))
    ne = draw(st.integers(1, 4))
    edges = []
    for k in range(ne):
        s, t = draw(st.integers(0, nv - 1)), draw(st.integers(0, nv - 1))
        edges.append(Edge(f"e{k}", f"v{s}", f"v{t}", (0.0, 1.0), draw(measures())))
    return MetricGraph(verts, tuple(edges))


@given(graphs())
def test_validate_is_stable_under_round_trip(g):
    again = gio.loads(gio.dumps(g))
    assert validate(again).to_dict() == validate(g).to_dict()
    assert json.loads(gio.dumps(again)) == json.loads(gio.dumps(g))


@given(graphs())
def test_classify_partitions(g):
    p = classify(g)
    assert len(p.E0) + len(p.E1) == len(g.edges)
    assert len(p.V0) + len(p.V1) == len(g.vertices)
    assert not set(p.E0) & set(p.E1) and not set(p.V0) & set(p.V1)
    assert len(p.E1_prime) == 2 * len(p.E1)


@given(measures())
def test_support_intervals_disjoint_and_ordered(m):
    if m.is_zero:
        return
    sup = edge_support(m)
    for (a0, b0), (a1, b1) in zip(sup[:-1], sup[1:]):
        assert a0 <= b0 < a1 <= b1
