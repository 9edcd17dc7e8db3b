import pytest

from qtorsion import WedgeParams, cube, interval, k_wedge, k_wedge_char, prism, simplex, singularity_order
from qtorsion.errors import CharMapError, WedgeParameterError
from qtorsion.io import load_complex
from qtorsion.simplicial import (
    SimplicialComplex,
    SimplicialError,
    VertexCharMap,
    complex_isomorphism,
    dual_of_polytope,
    simplicial_k_wedge,
    wedge_vertex_vectors,
)

from conftest import DATA, corpus, load


def test_dual_sizes():
    K = dual_of_polytope(cube())
    assert (len(K.vertices), len(K.maximal), K.dim, K.is_pure) == (6, 8, 2, True)
    K = dual_of_polytope(prism(3))
    assert (len(K.vertices), len(K.maximal)) == (5, 6)


def test_constructor_checks():
    with pytest.raises(SimplicialError):
        SimplicialComplex(["a", "a"], [[0, 1]])
    with pytest.raises(SimplicialError):
        SimplicialComplex(["a", "b"], [[0, 1], [0]])
    with pytest.raises(SimplicialError):
        SimplicialComplex(["a", "b", "c"], [[0, 1]])
    with pytest.raises(SimplicialError):
        SimplicialComplex(["a", "b"], [[0, 1], [1, 0]])
    with pytest.raises(SimplicialError):
        SimplicialComplex(["a", "b"], [[0, 1]]).index("z")


def test_from_simplices_keeps_maximal():
    K = SimplicialComplex.from_simplices("abc", [["a"], ["a", "b"], ["b", "c"], ["c"]])
    assert K.sorted_maximal() == [["a", "b"], ["b", "c"]]


def test_link_and_deletion_of_cycle():
    K = load_complex(DATA / "four_cycle.json")
    assert sorted(sorted(s) for s in K.link("v1")) == [["v2"], ["v4"]]
    assert sorted(sorted(s) for s in K.deletion("v1")) == [["v2", "v3"], ["v3", "v4"]]


@pytest.mark.parametrize("name", ["square", "pentagon", "cube", "prism3", "simplex3"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_wedge_is_dual_of_polytope_wedge(name, k):
    P = corpus()[name]
    f = P.facet_names[0]
    K = simplicial_k_wedge(dual_of_polytope(P), f, k)
    assert K.is_pure
    assert complex_isomorphism(K, dual_of_polytope(k_wedge(P, 0, k))) is not None


def test_literal_variant():
    K = dual_of_polytope(cube())
    assert simplicial_k_wedge(K, "F0", 1, literal=True) == simplicial_k_wedge(K, "F0", 1)
    lit = simplicial_k_wedge(K, "F0", 2, literal=True)
    assert not lit.is_pure


def test_two_points_wedge_to_tetrahedron_boundary():
    K = dual_of_polytope(interval())
    assert (len(K.vertices), len(K.maximal), K.dim) == (2, 2, 0)
    W = simplicial_k_wedge(K, "F0", 2)
    assert complex_isomorphism(W, dual_of_polytope(simplex(3))) is not None
    assert {"F0_0", "F0_1", "F0_2"} <= set(W.vertices)


def test_wedge_rejects_name_clash_and_k0():
    K = SimplicialComplex(["a", "a_0", "b"], [[0, 2], [1, 2]])
    with pytest.raises(SimplicialError):
        simplicial_k_wedge(K, "a", 2)
    with pytest.raises(SimplicialError):
        simplicial_k_wedge(K, "b", 0)


def test_isomorphism_negative():
    assert complex_isomorphism(dual_of_polytope(cube()), dual_of_polytope(prism(4))) is not None
    assert complex_isomorphism(dual_of_polytope(prism(3)), dual_of_polytope(simplex(4))) is None


def test_vertex_char_checks():
    K = dual_of_polytope(cube())
    with pytest.raises(CharMapError):
        VertexCharMap(3, {"F0": (0, 0, 0)})
    with pytest.raises(CharMapError):
        VertexCharMap(3, {f: (1, 0, 0) for f in K.vertices}).check(K)
    with pytest.raises(CharMapError):
        VertexCharMap(3, {"F0": (1, 0, 0)}).check(K)


@pytest.mark.parametrize("a", [-2, 0, 3])
def test_wedge_vectors_match_polytope_side(a):
    P, lam = load("square.json")
    K = dual_of_polytope(P)
    vl = VertexCharMap(2, lam.as_dict(P))
    K2, l2 = wedge_vertex_vectors(K, vl, "F4", a)
    assert l2["F4_1"] == (1, a, 0, 0) and l2["F4_2"] == (0, 1, 0, 0)
    assert l2["F4_0"] == (-1, -1) + lam[P.facet_index("F4")]
    W = k_wedge(P, "F4", 2)
    lw = k_wedge_char(P, lam, "F4", WedgeParams(2, a))
    poly_orders = sorted(singularity_order(W, lw, v) for v in range(W.n_vertices))
    assert sorted(l2.cone_orders(K2).values()) == poly_orders


def test_wedge_vectors_reject_a_one():
    P, lam = load("square.json")
    with pytest.raises(WedgeParameterError):
        wedge_vertex_vectors(dual_of_polytope(P), VertexCharMap(2, lam.as_dict(P)), "F4", 1)
