import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtorsion import (
    CombinatorialPolytope,
    SubComplex,
    all_faces,
    check,
    cube,
    face_counts,
    face_from_facets,
    face_of_vertices,
    face_polytope,
    find_isomorphism,
    is_isomorphic,
    polygon,
    prism,
    product_with_simplex,
    simplex,
    validate,
)
from qtorsion.errors import PolytopeError
from qtorsion.polytope import euler_check

from conftest import corpus, load

EXPECTED_COUNTS = {
    "interval": (2,),
    "triangle": (3, 3),
    "square": (4, 4),
    "hexagon": (6, 6),
    "simplex3": (4, 6, 4),
    "cube": (8, 12, 6),
    "prism5": (10, 15, 7),
    "simplex4": (5, 10, 10, 5),
    "cube_cut_vertex": (10, 15, 7),
}


@pytest.mark.parametrize("name", sorted(corpus()))
def test_corpus_is_valid(poly_corpus, name):
    P = poly_corpus[name]
    assert validate(P), validate(P).message
    assert euler_check(P)


@pytest.mark.parametrize("name,counts", sorted(EXPECTED_COUNTS.items()))
def test_face_counts(poly_corpus, name, counts):
    assert face_counts(poly_corpus[name]) == counts


def test_vertex_facet_and_counts_of_products():
    P = product_with_simplex(polygon(5), 2)
    assert (P.dim, P.n_facets, P.n_vertices) == (4, 8, 15)
    assert validate(P)
    # vertex (v, s) misses exactly D<s>
    r = 5
    for v in range(5):
        for s in range(3):
            fs = P.vertices[v * 3 + s]
            assert {r, r + 1, r + 2} - fs == {r + s}


def test_rejects_non_simple_vertex():
    P, _ = load("bad_cube.json")
    r = validate(P)
    assert not r and r.violation == "simplicity"
    with pytest.raises(PolytopeError):
        check(P)


def test_rejects_bad_index_and_names():
    assert validate(CombinatorialPolytope(2, ["A", "B"], [[0, 5], [0, 1]])).violation == "facet index"
    assert validate(CombinatorialPolytope(2, ["A", "A", "B"], [[0, 1], [1, 2], [0, 2]])).violation \
        == "facet names"
    assert validate(CombinatorialPolytope(0, [], [])).violation == "dimension"


def test_rejects_ridge_and_duplicate_problems():
    # a dangling vertex leaves ridges with one or three vertices
    tri = [[0, 1], [1, 2], [0, 2]]
    assert validate(CombinatorialPolytope(2, "ABCD", tri + [[2, 3]])).violation == "ridge condition"
    assert validate(CombinatorialPolytope(2, "ABC", tri + [[0, 1]])).violation == "ridge condition"
    # an unused facet is empty
    assert validate(CombinatorialPolytope(2, "ABCD", tri)).violation == "empty facet"


def test_rejects_disconnected():
    # two disjoint triangles on six facets
    verts = [[0, 1], [1, 2], [0, 2], [3, 4], [4, 5], [3, 5]]
    assert validate(CombinatorialPolytope(2, "ABCDEF", verts)).violation == "connectivity"


def test_interval_rules():
    assert validate(CombinatorialPolytope(1, "AB", [[0], [1]]))
    assert not validate(CombinatorialPolytope(1, "AB", [[0], [0]]))


def test_face_lookup():
    C = cube()
    F = face_from_facets(C, ["F0", "F2"])
    assert F.dim == 1 and len(F) == 2
    assert face_of_vertices(C, F.vertices) == F
    assert face_from_facets(C, []) == C.whole()
    # opposite facets of the cube do not meet
    opposite = [(a, b) for a in range(6) for b in range(a + 1, 6)
                if not (C.facet_vertices[a] & C.facet_vertices[b])]
    assert len(opposite) == 3
    assert face_from_facets(C, opposite[0]) is None


def test_face_polytope_of_prism_side():
    P = prism(5)
    F = face_from_facets(P, ["S0"])
    Q, gids, vids = face_polytope(P, F)
    assert validate(Q) and (Q.dim, Q.n_facets, Q.n_vertices) == (2, 4, 4)
    assert set(vids) == F.vertices
    assert P.facet_index("S0") not in gids


def test_faces_ordered_and_unique(poly_corpus):
    faces = all_faces(poly_corpus["prism6"])
    assert len(faces) == len({f.vertices for f in faces})
    assert [f.dim for f in faces] == sorted(f.dim for f in faces)
    assert faces[-1].dim == 3


def test_subcomplex_keeps_antichain():
    C = cube()
    top = face_from_facets(C, [0])
    edge = face_from_facets(C, [0, 2])
    other = face_from_facets(C, [1])
    K = SubComplex.from_faces([top, edge, other])
    assert set(K.key()) == {top.vertices, other.vertices}
    assert K.dim == 2 and len(K.vertices) == 8


def test_vertex_index_tokens():
    C = cube()
    label = C.vertex_label(3)
    assert C.vertex_index(label) == 3
    assert C.vertex_index("v3") == C.vertex_index("3") == C.vertex_index(3) == 3
    for bad in ("v99", "x", f"{C.facet_names[0]}^{C.facet_names[1]}^{C.facet_names[1]}"):
        with pytest.raises(PolytopeError):
            C.vertex_index(bad)
    with pytest.raises(PolytopeError):
        C.facet_index("nope")


def test_isomorphism_ignores_labels():
    P = prism(4)
    C = cube()
    m = find_isomorphism(P, C)
    assert m is not None and sorted(m) == list(range(6))
    assert not is_isomorphic(prism(5), product_with_simplex(simplex(2), 2))
    assert is_isomorphic(simplex(2), polygon(3))


@given(st.permutations(range(6)))
def test_isomorphism_under_relabeling(perm):
    C = cube()
    relabeled = CombinatorialPolytope(
        3, [C.facet_names[i] for i in range(6)],
        [frozenset(perm[f] for f in fs) for fs in reversed(C.vertices)])
    m = find_isomorphism(C, relabeled)
    assert m is not None
    image = {frozenset(m[f] for f in fs) for fs in C.vertices}
    assert image == set(relabeled.vertices)
