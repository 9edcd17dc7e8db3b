"""Retraction sequences: search, replay, traces and induced sequences.

A subcomplex is kept as its antichain of maximal faces.  A vertex is free
when exactly one maximal face contains it; faces of simple polytopes are
simple, so that face is a neighbourhood of the vertex shaped like a corner.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .charmap import CharMap, compute_dF, induce_on_face, singularity_order_in_face
from .constructions import BlowdownResult, k_wedge, k_wedge_char, WedgeParams
from .errors import ConstructionError, LatticeError, RetractionError
from .polytope import (
    CombinatorialPolytope,
    Face,
    SubComplex,
    all_faces,
    face_from_facets,
    face_of_vertices,
)

__all__ = [
    "RetractionStep",
    "RetractionSequence",
    "InducedRetractionReport",
    "free_vertices",
    "next_complex",
    "find_retraction",
    "enumerate_retractions",
    "retraction_from_order",
    "verify_retraction",
    "singularity_trace",
    "find_p_clean_retraction",
    "face_induced_retraction",
    "induced_retraction_blowdown",
    "induced_retraction_2wedge",
    "wedge_vertex_images",
]


@dataclass(frozen=True)
class RetractionStep:
    complex: SubComplex
    max_face: Face
    vertex: int


@dataclass(frozen=True)
class RetractionSequence:
    polytope: CombinatorialPolytope
    steps: tuple

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    @property
    def order(self) -> tuple:
        return tuple(s.vertex for s in self.steps)

    def to_json(self) -> list:
        P = self.polytope
        out = []
        for s in self.steps:
            out.append({
                "vertex": P.vertex_name(s.vertex),
                "max_face_facets": [P.facet_names[f] for f in sorted(s.max_face.facets)],
                "complex_maximal_faces": [
                    [P.vertex_name(v) for v in sorted(m.vertices)]
                    for m in s.complex.maximal_faces],
            })
        return out


def free_vertices(B: SubComplex) -> frozenset:
    count = {}
    for m in B.maximal_faces:
        for v in m.vertices:
            count[v] = count.get(v, 0) + 1
    return frozenset(v for v, c in count.items() if c == 1)


def _facets_of_face(P: CombinatorialPolytope, M: Face) -> list:
    if M.dim == 0:
        return []
    out = {}
    for g in range(P.n_facets):
        if g in M.facets or not (P.facet_vertices[g] & M.vertices):
            continue
        f = face_from_facets(P, M.facets | {g})
        if f.dim == M.dim - 1:
            out[f.vertices] = f
    return list(out.values())


def next_complex(P: CombinatorialPolytope, B: SubComplex, b: int) -> SubComplex:
    if b not in free_vertices(B):
        raise RetractionError(f"v{b} is not free in the complex")
    keep = [m for m in B.maximal_faces if b not in m.vertices]
    for m in B.maximal_faces:
        if b in m.vertices:
            keep.extend(f for f in _facets_of_face(P, m) if b not in f.vertices)
    return SubComplex.from_faces(keep)


def _max_face_at(B: SubComplex, b: int) -> Face:
    return B.containing(b)[0]


def retraction_from_order(P: CombinatorialPolytope, order: Sequence[int],
                          start: Optional[SubComplex] = None) -> RetractionSequence:
    """Build the sequence retracting vertices in ``order``; raises if one is not free."""
    B = start if start is not None else SubComplex((P.whole(),))
    steps = []
    for b in order:
        if b not in free_vertices(B):
            raise RetractionError(f"v{b} is not free at step {len(steps) + 1}")
        steps.append(RetractionStep(B, _max_face_at(B, b), b))
        B = next_complex(P, B, b)
    if B.maximal_faces:
        raise RetractionError("order does not exhaust the complex")
    return RetractionSequence(P, tuple(steps))


def enumerate_retractions(P: CombinatorialPolytope, *, start: Optional[int] = None,
                          defer: Iterable[int] = (), strict_defer: bool = False,
                          predicate: Optional[Callable[[Face, int], bool]] = None,
                          prefix: Sequence[int] = (), seed: Optional[int] = None,
                          initial: Optional[SubComplex] = None) -> Iterator[RetractionSequence]:
    """Depth-first enumeration of retraction sequences.

    Candidates are tried by vertex index (shuffled when ``seed`` is given).
    ``defer`` vertices are only tried when no other vertex is free; with
    ``strict_defer`` they wait until every other vertex is gone.
    ``predicate(E, b)`` rejects individual steps.  States whose subtree has
    produced nothing are remembered and never re-entered.
    """
    defer = frozenset(defer)
    forced = list(prefix)
    if start is not None:
        forced = [start] + [v for v in forced if v != start]
    rng = random.Random(seed) if seed is not None else None
    dead = set()
    B0 = initial if initial is not None else SubComplex((P.whole(),))
    others = frozenset(B0.vertices) - defer

    def candidates(B, depth):
        free = sorted(free_vertices(B))
        if depth < len(forced):
            return [forced[depth]] if forced[depth] in free else []
        if rng is not None:
            rng.shuffle(free)
        normal = [v for v in free if v not in defer]
        if strict_defer:
            if B.vertices & others:
                return normal
            return free
        return normal if normal else free

    def walk(B, depth, steps):
        if not B.maximal_faces:
            yield RetractionSequence(P, tuple(steps))
            return
        key = B.key()
        if depth >= len(forced) and key in dead:
            return
        found = False
        for b in candidates(B, depth):
            E = _max_face_at(B, b)
            if predicate is not None and not predicate(E, b):
                continue
            steps.append(RetractionStep(B, E, b))
            for seq in walk(next_complex(P, B, b), depth + 1, steps):
                found = True
                yield seq
            steps.pop()
        if not found and depth >= len(forced):
            dead.add(key)

    yield from walk(B0, 0, [])


def find_retraction(P: CombinatorialPolytope, start: Optional[int] = None,
                    defer: Iterable[int] = (), predicate=None, **kw) -> Optional[RetractionSequence]:
    return next(enumerate_retractions(P, start=start, defer=defer, predicate=predicate, **kw), None)


def verify_retraction(P: CombinatorialPolytope, seq: RetractionSequence,
                      start: Optional[Face] = None) -> tuple:
    """Replay the sequence against the full face set, independently of the search.

    Returns ``(ok, message)``.
    """
    root = start if start is not None else P.whole()
    alive = {f.vertices for f in all_faces(P) if f.vertices <= root.vertices}
    order = []
    for i, step in enumerate(seq.steps, 1):
        b = step.vertex
        if not any(b in f for f in alive):
            return False, f"step {i}: v{b} already retracted"
        maximal = {f for f in alive if not any(f < g for g in alive)}
        if {m.vertices for m in step.complex.maximal_faces} != maximal:
            return False, f"step {i}: recorded complex differs from the replay"
        at_b = [f for f in maximal if b in f]
        if len(at_b) != 1:
            return False, f"step {i}: v{b} lies in {len(at_b)} maximal faces"
        if at_b[0] != step.max_face.vertices:
            return False, f"step {i}: recorded maximal face differs"
        alive = {f for f in alive if b not in f}
        order.append(b)
    if alive:
        return False, "faces remain after the last step"
    last = seq.steps[-1] if seq.steps else None
    if last is None or last.max_face.vertices != frozenset([last.vertex]):
        return False, "last step is not a single vertex"
    if sorted(order) != sorted(root.vertices):
        return False, "vertex list is not a permutation of the vertices"
    return True, "ok"


class _OrderCache:
    def __init__(self, P, lam):
        self.P, self.lam = P, lam
        self.induced = {}

    def __call__(self, E: Face, b: int) -> int:
        if not E.facets:
            return singularity_order_in_face(self.P, self.lam, E, b)
        ind = self.induced.get(E.vertices)
        if ind is None:
            ind = self.induced[E.vertices] = induce_on_face(self.P, self.lam, E)
        return ind.order_at(self.P, b)


def singularity_trace(P: CombinatorialPolytope, lam: CharMap, seq: RetractionSequence) -> tuple:
    order = _OrderCache(P, lam)
    return tuple(order(s.max_face, s.vertex) for s in seq.steps)


def find_p_clean_retraction(P: CombinatorialPolytope, lam: CharMap, p: int, **kw) -> Optional[RetractionSequence]:
    return next(p_clean_retractions(P, lam, p, **kw), None)


def p_clean_retractions(P: CombinatorialPolytope, lam: CharMap, p: int, **kw) -> Iterator[RetractionSequence]:
    order = _OrderCache(P, lam)
    return enumerate_retractions(P, predicate=lambda E, b: gcd(order(E, b), p) == 1, **kw)


def face_induced_retraction(P: CombinatorialPolytope, seq: RetractionSequence, F: Face) -> RetractionSequence:
    """Retract ``F`` in the order its vertices appear in ``seq``.

    Each step's maximal face is the intersection of ``F`` with the maximal
    face of the matching step of ``seq``; feasibility is still checked.
    """
    order = [b for b in seq.order if b in F.vertices]
    return retraction_from_order(P, order, start=SubComplex((F,)))


# ----------------------------------------------------------------------------
# induced sequence after a blowdown

@dataclass(frozen=True)
class InducedRetractionReport:
    sequence: RetractionSequence
    step_cases: tuple
    source_steps: tuple
    d_values: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    consistent: dict = field(default_factory=dict)
    d_undefined: dict = field(default_factory=dict)
    postponed: tuple = ()

    def to_json(self) -> dict:
        return {
            "sequence": self.sequence.to_json(),
            "step_cases": list(self.step_cases),
            "source_steps": [i + 1 for i in self.source_steps],
            "d_values": {str(t + 1): d for t, d in sorted(self.d_values.items())},
            "d_undefined": {str(t + 1): m for t, m in sorted(self.d_undefined.items())},
            "postponed": [t + 1 for t in self.postponed],
        }


def _transported(lam: CharMap, bd: BlowdownResult) -> CharMap:
    inv = {j: i for i, j in bd.facet_map.items()}
    return CharMap(lam.rank, [lam[inv[j]] for j in range(bd.result.n_facets)])


def induced_retraction_blowdown(P: CombinatorialPolytope, seq: RetractionSequence, bd: BlowdownResult,
                                lam: Optional[CharMap] = None, combination=None) -> InducedRetractionReport:
    """Push ``seq`` through the blowdown, skipping vertices whose image is already gone.

    An image that is not yet free when its turn comes is postponed and
    retracted as soon as it is; ``postponed`` lists those steps.

    Steps are tagged ``unaffected`` (the source face misses the collapsed
    facet), ``blowdown-of`` (the new face is the collapsed image of the
    source face) or ``face-of``.  With ``lam`` and ``combination`` (the
    rational coefficients of the collapsed facet's vector over the product
    facets) each blowdown-of step gets its reduction factor ``d_t``; the
    pair of orders (source, image) is kept for those steps in ``orders``.
    Steps where the projected combination is not a multiple of the target
    vector have no ``d_t`` and are listed in ``d_undefined`` instead.
    """
    if bd.source != P:
        raise ConstructionError("blowdown was not built from this polytope")
    Q = bd.result
    big = bd.structure.big_facet
    big_verts = P.facet_vertices[big]
    vmap = bd.vertex_map
    lam_q = _transported(lam, bd) if lam is not None else None
    coeffs = dict(zip(bd.structure.p_facets, combination)) if combination is not None else None
    B = SubComplex((Q.whole(),))
    steps, cases, src, dvals, orders, consistent, undefined = [], [], [], {}, {}, {}, {}
    postponed = []
    done, waiting = set(), []

    def take(i, B):
        step = seq.steps[i]
        b2 = vmap[step.vertex]
        E2 = _max_face_at(B, b2)
        E = step.max_face
        img = face_of_vertices(Q, {vmap[v] for v in E.vertices})
        if not (E.vertices & big_verts):
            case = "unaffected"
        elif img.vertices == E2.vertices and E2.dim == E.dim and len(E2) < len(E):
            case = "blowdown-of"
        else:
            case = "face-of"
        t = len(steps)
        steps.append(RetractionStep(B, E2, b2))
        cases.append(case)
        src.append(i)
        if lam is not None and case == "blowdown-of":
            g1 = singularity_order_in_face(P, lam, E, step.vertex)
            g2 = singularity_order_in_face(Q, lam_q, E2, b2)
            orders[t] = (g1, g2)
            if coeffs is not None:
                combo = list(bd.structure.p_facets)
                try:
                    d = compute_dF(P, lam, E, big, combo, [coeffs[c] for c in combo])
                except LatticeError as exc:
                    undefined[t] = str(exc)
                    d = None
                if d is not None:
                    dvals[t] = d
                if d is not None and step.vertex in big_verts:
                    c = Fraction(coeffs[bd.structure.miss[step.vertex]])
                    consistent[t] = abs(c) / d * g2 == g1
        done.add(b2)
        return next_complex(Q, B, b2)

    def drain(B):
        # retract postponed images as soon as they become free
        progress = True
        while progress:
            progress = False
            for j in list(waiting):
                if vmap[seq.steps[j].vertex] in free_vertices(B):
                    waiting.remove(j)
                    postponed.append(len(steps))
                    B = take(j, B)
                    progress = True
                    break
        return B

    for i, step in enumerate(seq.steps):
        b2 = vmap[step.vertex]
        if b2 in done or any(vmap[seq.steps[j].vertex] == b2 for j in waiting):
            continue
        if b2 not in free_vertices(B):
            waiting.append(i)
            continue
        B = drain(take(i, B))
    if waiting:
        raise RetractionError(
            f"image of v{seq.steps[waiting[0]].vertex} never becomes free in the induced complex")
    out = RetractionSequence(Q, tuple(steps))
    return InducedRetractionReport(out, tuple(cases), tuple(src), dvals, orders, consistent,
                                   undefined, tuple(postponed))


# ----------------------------------------------------------------------------
# induced sequence on a 2-wedge

def wedge_vertex_images(P: CombinatorialPolytope, F, k: int) -> list:
    """For each vertex of ``P``, its vertices in ``k_wedge(P, F, k)``.

    Off ``F`` the list is ``[corner, t_1, .., t_k]``; on ``F`` a single vertex.
    """
    f = P.facet_index(F)
    out, nxt = [], 0
    for fs in P.vertices:
        size = 1 if f in fs else k + 1
        out.append(list(range(nxt, nxt + size)))
        nxt += size
    return out


def induced_retraction_2wedge(P: CombinatorialPolytope, seq: RetractionSequence, F, lam: CharMap,
                              a: int) -> tuple:
    """Lift ``seq`` (retracting ``F`` last) to ``k_wedge(P, F, 2)``.

    Each vertex off ``F`` becomes three consecutive steps, each vertex of
    ``F`` one step.  Every new order must be the source order or ``|1 - a|``
    times it.  Returns ``(wedge, char, sequence, trace)``.
    """
    params = WedgeParams(2, a)
    params.check_char()
    f = P.facet_index(F)
    on_f = P.facet_vertices[f]
    order = seq.order
    first_f = next((i for i, b in enumerate(order) if b in on_f), len(order))
    if any(b not in on_f for b in order[first_f:]):
        raise RetractionError("sequence does not retract the vertices of F last")
    W = k_wedge(P, f, 2)
    lw = k_wedge_char(P, lam, f, params)
    src_trace = singularity_trace(P, lam, seq)
    images = wedge_vertex_images(P, f, 2)
    w_order = _OrderCache(W, lw)
    factor = abs(1 - a)

    def options(i):
        imgs = images[order[i]]
        if len(imgs) == 1:
            return [imgs]
        corner, t1, t2 = imgs
        return [[t1, t2, corner], [t2, t1, corner], [corner, t1, t2], [corner, t2, t1],
                [t1, corner, t2], [t2, corner, t1]]

    def walk(i, B, steps):
        if i == len(order):
            return steps if not B.maximal_faces else None
        allowed = {src_trace[i], factor * src_trace[i]}
        for opt in options(i):
            Bc, new, ok = B, [], True
            for b in opt:
                if b not in free_vertices(Bc):
                    ok = False
                    break
                E = _max_face_at(Bc, b)
                if w_order(E, b) not in allowed:
                    ok = False
                    break
                new.append(RetractionStep(Bc, E, b))
                Bc = next_complex(W, Bc, b)
            if ok:
                res = walk(i + 1, Bc, steps + new)
                if res is not None:
                    return res
        return None

    steps = walk(0, SubComplex((W.whole(),)), [])
    if steps is None:
        raise RetractionError("no lift of the sequence to the 2-wedge with the expected orders")
    out = RetractionSequence(W, tuple(steps))
    return W, lw, out, singularity_trace(W, lw, out)
