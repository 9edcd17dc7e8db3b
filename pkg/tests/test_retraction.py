from itertools import islice
from math import gcd

import pytest

from qtorsion import SubComplex, blowdown, cube, face_from_facets, polygon, prism
from qtorsion.errors import ConstructionError, RetractionError
from qtorsion.retraction import (
    enumerate_retractions,
    face_induced_retraction,
    find_retraction,
    free_vertices,
    induced_retraction_2wedge,
    induced_retraction_blowdown,
    next_complex,
    p_clean_retractions,
    retraction_from_order,
    singularity_trace,
    verify_retraction,
    wedge_vertex_images,
)

from conftest import load

PRISM_ORDER = ("T1^QAB^QBC", "T2^QAB^QBC", "T2^QAB^QAC", "T2^QBC^QAC", "T1^QBC^QAC", "T1^QAB^QAC")


def test_whole_polytope_every_vertex_free():
    P = cube()
    assert free_vertices(SubComplex((P.whole(),))) == frozenset(range(8))


def test_triangle_has_six_sequences():
    seqs = list(enumerate_retractions(polygon(3)))
    assert len(seqs) == 6
    assert len({s.order for s in seqs}) == 6


def test_square_first_retraction_leaves_path():
    P = polygon(4)
    B = next_complex(P, SubComplex((P.whole(),)), 0)
    assert len(B.maximal_faces) == 2 and all(f.dim == 1 for f in B.maximal_faces)
    # the vertex opposite the retracted one is shared by both edges
    assert free_vertices(B) == frozenset({1, 3})
    with pytest.raises(RetractionError):
        next_complex(P, B, 2)


@pytest.mark.parametrize("P", [polygon(5), cube(), prism(5)], ids=["pentagon", "cube", "prism5"])
def test_enumerated_sequences_verify(P):
    for seq in islice(enumerate_retractions(P), 60):
        ok, msg = verify_retraction(P, seq)
        assert ok, msg
        assert len(seq) == P.n_vertices
        assert seq[-1].max_face.dim == 0


def test_seeded_search_reproducible():
    P = prism(5)
    a = next(enumerate_retractions(P, seed=11)).order
    b = next(enumerate_retractions(P, seed=11)).order
    assert a == b


def test_start_and_defer():
    P = cube()
    seq = find_retraction(P, start=5, defer=[0])
    assert seq.order[0] == 5
    strict = next(enumerate_retractions(P, defer=[0, 1], strict_defer=True))
    assert set(strict.order[-2:]) == {0, 1}


def test_replay_catches_tampering():
    P = cube()
    seq = find_retraction(P)
    steps = list(seq.steps)
    steps[1], steps[2] = steps[2], steps[1]
    bad = type(seq)(P, tuple(steps))
    ok, msg = verify_retraction(P, bad)
    assert not ok and "step 2" in msg
    truncated = type(seq)(P, seq.steps[:-1])
    assert not verify_retraction(P, truncated)[0]


def test_order_must_stay_free():
    P = polygon(4)
    with pytest.raises(RetractionError):
        retraction_from_order(P, [0, 2, 1, 3])
    with pytest.raises(RetractionError):
        retraction_from_order(P, [0, 1, 2])


def test_trace_on_square():
    P, lam = load("square.json")
    order = [P.vertex_index(x) for x in ("F2^F3", "F1^F2", "F1^F4", "F3^F4")]
    seq = retraction_from_order(P, order)
    tr = singularity_trace(P, lam, seq)
    assert tr[0] == 17 and tr[-1] == 1
    assert len(tr) == 4


@pytest.mark.parametrize("p", [2, 3, 17, 47])
def test_p_clean_sequences_avoid_p(p):
    P, lam = load("square.json")
    n = 0
    for seq in islice(p_clean_retractions(P, lam, p), 10):
        assert all(gcd(q, p) == 1 for q in singularity_trace(P, lam, seq))
        n += 1
    assert n > 0


def test_prism_trace_and_face_induced_order():
    P, lam = load("prism_unit_repaired.json")
    order = [P.vertex_index(x) for x in PRISM_ORDER]
    seq = retraction_from_order(P, order)
    assert len(singularity_trace(P, lam, seq)) == 6
    T1 = face_from_facets(P, ["T1"])
    fseq = face_induced_retraction(P, seq, T1)
    assert [P.vertex_label(v) for v in fseq.order] == [PRISM_ORDER[0], PRISM_ORDER[4], PRISM_ORDER[5]]
    assert verify_retraction(P, fseq, start=T1)[0]


def _cube_onto_edge():
    P, lam = load("cube_edge_collapse_repaired.json")
    return P, lam, blowdown(P, "Ft", ["Ft", "F1"])


def test_induced_blowdown_postpones_non_free_image():
    P, _, bd = _cube_onto_edge()
    order = [P.vertex_index(x) for x in
             ("F0^F2^Ft", "F0^F2^F3", "F0^F3^F4", "F1^F3^F4",
              "F0^F4^Ft", "F1^F4^Ft", "F1^F2^Ft", "F1^F2^F3")]
    seq = retraction_from_order(P, order)
    rep = induced_retraction_blowdown(P, seq, bd)
    assert rep.postponed == (4,)
    assert len(rep.sequence) == bd.result.n_vertices == 6
    assert verify_retraction(bd.result, rep.sequence)[0]
    assert rep.to_json()["postponed"] == [5]


def test_induced_blowdown_tags_and_d_values():
    P, lam, bd = _cube_onto_edge()
    seq = find_retraction(P, prefix=[P.vertex_index(x) for x in ("F0^F2^Ft", "F0^F4^Ft", "F1^F2^Ft")])
    rep = induced_retraction_blowdown(P, seq, bd, lam, [1, 1])
    assert set(rep.step_cases) <= {"unaffected", "blowdown-of", "face-of"}
    assert len(rep.step_cases) == len(rep.sequence)
    assert rep.d_values == {0: 1, 1: 3}
    assert rep.orders[1] == (1, 3)
    assert all(rep.consistent.values()) and not rep.d_undefined


def test_induced_blowdown_requires_matching_source():
    P, _, bd = _cube_onto_edge()
    with pytest.raises(ConstructionError):
        induced_retraction_blowdown(cube(), find_retraction(cube()), bd)


def test_wedge_vertex_images_layout():
    P = polygon(4)
    imgs = wedge_vertex_images(P, 0, 2)
    on = P.facet_vertices[0]
    assert [len(x) for x in imgs] == [1 if v in on else 3 for v in range(4)]
    assert sorted(sum(imgs, [])) == list(range(8))


@pytest.mark.parametrize("a", [3, -1, 0])
def test_two_wedge_lift_of_square(a):
    P, lam = load("square.json")
    f = P.facet_index("F4")
    seq = find_retraction(P, defer=P.facet_vertices[f], strict_defer=True)
    W, lw, wseq, trace = induced_retraction_2wedge(P, seq, f, lam, a)
    assert len(wseq) == W.n_vertices == 8
    assert verify_retraction(W, wseq)[0]
    assert trace == singularity_trace(W, lw, wseq)
    src = set(singularity_trace(P, lam, seq))
    allowed = src | {q * abs(1 - a) for q in src}
    assert set(trace) <= allowed
    if abs(1 - a) != 1:
        assert abs(1 - a) in trace


def test_two_wedge_requires_face_last():
    P, lam = load("square.json")
    f = P.facet_index("F4")
    first = next(iter(P.facet_vertices[f]))
    seq = find_retraction(P, start=first)
    with pytest.raises(RetractionError):
        induced_retraction_2wedge(P, seq, f, lam, 2)
