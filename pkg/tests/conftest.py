import json

import numpy as np
import pytest

from ocelcluster import running_example_path
from ocelcluster.ocel import load_ocel
from ocelcluster.tracegraph import TraceGraph

# Directed graph consistent with every worked example on it: a->c costs 7 via
# a,d,e,c and 9 via a,b,c; deg_in(b)=1, deg_in(c)=2, deg_out(a)=deg_out(b)=2.
WEIGHTED_EXAMPLE = {
    ("a", "b"): 4,
    ("b", "c"): 5,
    ("a", "d"): 2,
    ("d", "e"): 3,
    ("e", "c"): 2,
    ("b", "d"): 1,
}


@pytest.fixture
def example_path():
    return str(running_example_path())


@pytest.fixture
def example_doc(example_path):
    with open(example_path, encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def example_log(example_path):
    return load_ocel(example_path)


@pytest.fixture
def weighted_graph():
    return TraceGraph(("a", "b", "c", "d", "e"), dict(WEIGHTED_EXAMPLE))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
