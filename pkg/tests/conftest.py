import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from graphdiff.graph import Edge, EdgeMeasure, MetricGraph, Vertex

settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

DATA = Path(__file__).parent / "data"


def interval_graph(length=1.0, measure=None, masses=(0.0, 0.0)):
    m = measure if measure is not None else EdgeMeasure.lebesgue(0.0, length)
    return MetricGraph(
        (Vertex("v0", masses[0]), Vertex("v1", masses[1])),
        (Edge("e", "v0", "v1", (0.0, length), m),),
    )


def path_graph(lengths=(1.0, 1.0)):
    vs = [Vertex(f"v{k}") for k in range(len(lengths) + 1)]
    es = [Edge(f"e{k}", f"v{k}", f"v{k + 1}", (0.0, L), EdgeMeasure.lebesgue(0.0, L)) for k, L in enumerate(lengths)]
    return MetricGraph(tuple(vs), tuple(es))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  {detail}")
