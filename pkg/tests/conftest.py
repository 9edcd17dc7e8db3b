import random
from pathlib import Path

import pytest

from qtorsion import (
    CharMap,
    blowup,
    cube,
    interval,
    k_wedge,
    polygon,
    prism,
    simplex,
    validate_rchar,
)
from qtorsion.io import load_polytope
from qtorsion.lattice import primitive

DATA = Path(__file__).parent / "data"

# criterion lines collected by test_acceptance.py, printed at the end of the run
ACCEPTANCE_LINES = {}


def load(name):
    return load_polytope(DATA / name)


def corpus():
    """Small simple polytopes used across structural tests, keyed by a readable name."""
    out = {
        "interval": interval(),
        "triangle": polygon(3),
        "square": polygon(4),
        "pentagon": polygon(5),
        "hexagon": polygon(6),
        "simplex3": simplex(3),
        "cube": cube(3),
        "prism3": prism(3),
        "prism5": prism(5),
        "prism6": prism(6),
        "simplex4": simplex(4),
    }
    out["wedge_square"] = k_wedge(out["square"], 0, 1)
    out["wedge2_triangle"] = k_wedge(out["triangle"], 0, 2)
    out["cube_cut_vertex"] = blowup(out["cube"], out["cube"].vertex_face(0)).result
    out["prism_cut_edge"] = blowup(out["prism3"], [0, 2]).result
    return out


def random_char(P, rng, bound=3, tries=2000):
    """A random R-characteristic map on ``P`` with small entries, or None."""
    n = P.dim
    for _ in range(tries):
        vecs = []
        for _ in range(P.n_facets):
            while True:
                v = tuple(rng.randint(-bound, bound) for _ in range(n))
                if any(v):
                    vecs.append(primitive(v))
                    break
        lam = CharMap(n, vecs)
        if validate_rchar(P, lam):
            return lam
    return None


@pytest.fixture(scope="session")
def poly_corpus():
    return corpus()


@pytest.fixture
def rng():
    return random.Random(20240517)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
