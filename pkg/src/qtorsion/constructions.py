"""Blowup, blowdown and the polytopal k-wedge, with characteristic map transports.

All constructions act on vertex-facet incidence only.  Facet indices of
the input are preserved wherever possible so that correspondences stay
readable: a blowup appends its new facet, a blowdown deletes the collapsed
facet and shifts the later indices down by one.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .charmap import CharMap, validate_rchar
from .errors import (
    BlowdownError,
    CharMapError,
    ConstructionError,
    PolytopeError,
    ProductStructureError,
    RestrictionError,
    WedgeParameterError,
)
from .lattice import det_exact
from .polytope import (
    CombinatorialPolytope,
    Face,
    _fresh_names,
    face_from_facets,
    find_isomorphism,
    product_with_simplex,
    validate,
)

__all__ = [
    "BlowupResult",
    "ProductStructure",
    "BlowdownResult",
    "WedgeParams",
    "blowup",
    "detect_product_structure",
    "blowdown",
    "k_wedge",
    "wedge_as_blowdown",
    "wedge_char_on_product",
    "k_wedge_char",
    "restrict_char",
    "fiber_determinants",
]


def _resolve_face(P: CombinatorialPolytope, F) -> Face:
    if isinstance(F, Face):
        return F
    face = face_from_facets(P, F)
    if face is None:
        raise PolytopeError("the given facets have empty intersection")
    return face


def _check_valid(P: CombinatorialPolytope, err=PolytopeError):
    rep = validate(P)
    if not rep:
        raise err(f"invalid polytope ({rep.violation}): {rep.message}")


# ----------------------------------------------------------------------------
# blowup

@dataclass(frozen=True)
class BlowupResult:
    """``result`` keeps every facet of the input at its index; ``new_facet`` is appended.

    ``vertex_origin[i]`` is the vertex of the input that vertex ``i`` of the
    result lies over.
    """

    result: CombinatorialPolytope
    new_facet: int
    face: Face
    vertex_origin: tuple


def blowup(P: CombinatorialPolytope, F, name: Optional[str] = None) -> BlowupResult:
    """Truncate the face ``F`` (a ``Face`` or an iterable of facets cutting it out)."""
    F = _resolve_face(P, F)
    n = P.dim
    if not F.vertices:
        raise ConstructionError("cannot blow up an empty face")
    if not F.facets:
        raise ConstructionError("cannot blow up the whole polytope")
    if F.dim > n - 2:
        raise ConstructionError("blowing up a facet changes nothing")
    t = P.n_facets
    if name is None:
        spec = ",".join(P.facet_names[f] for f in sorted(F.facets))
        name = _fresh_names(P.facet_names, [f"T:{spec}"])[0]
    elif name in P.facet_names:
        raise ConstructionError(f"facet name {name!r} already used")
    verts, origin = [], []
    for vid, fs in enumerate(P.vertices):
        if vid not in F.vertices:
            verts.append(fs)
            origin.append(vid)
            continue
        for h in sorted(F.facets):
            verts.append((fs - {h}) | {t})
            origin.append(vid)
    out = CombinatorialPolytope(n, list(P.facet_names) + [name], verts)
    _check_valid(out, ConstructionError)
    return BlowupResult(out, t, F, tuple(origin))


# ----------------------------------------------------------------------------
# product structure and blowdown

@dataclass(frozen=True)
class ProductStructure:
    """A verified identification of the facet ``big_facet`` with ``base_face x simplex``.

    ``p_facets`` lists the facets ``P_1..P_{n-d}``; all but ``missing``
    contain ``base_face``.  ``fibers`` maps a key ``K`` (the facets of a
    vertex of the big facet outside ``{big_facet} | p_facets``) to the
    vertices sharing it, and ``miss[w]`` is the one p-facet avoiding ``w``.
    """

    big_facet: int
    base_face: Face
    p_facets: tuple
    missing: int
    fibers: Mapping[frozenset, tuple]
    miss: Mapping[int, int]

    @property
    def codim(self) -> int:
        return len(self.p_facets)


def _try_candidate(P, big, F, H, G) -> Optional[ProductStructure]:
    p_facets = tuple(H) + (G,)
    pset = frozenset(p_facets)
    fibers = defaultdict(list)
    miss = {}
    for w in sorted(P.facet_vertices[big]):
        off = pset - P.vertices[w]
        if len(off) != 1:
            return None
        miss[w] = next(iter(off))
        fibers[P.vertices[w] - pset - {big}].append(w)
    k = len(p_facets)
    for members in fibers.values():
        if len(members) != k or len({miss[w] for w in members}) != k:
            return None
    if len(P.facet_vertices[big]) != len(F.vertices) * k:
        return None
    base_keys = {P.vertices[v] - F.facets for v in F.vertices}
    if set(fibers) != base_keys:
        return None
    order = {f: i for i, f in enumerate(p_facets)}
    fibers = {key: tuple(sorted(ws, key=lambda w: order[miss[w]])) for key, ws in fibers.items()}
    return ProductStructure(big, F, p_facets, G, fibers, miss)


def detect_product_structure(P: CombinatorialPolytope, big_facet, F) -> ProductStructure:
    big = P.facet_index(big_facet)
    F = _resolve_face(P, F)
    n = P.dim
    if big not in F.facets:
        raise ConstructionError("base face is not contained in the big facet")
    if F.dim >= n - 1:
        raise ConstructionError("base face equals the big facet; nothing to collapse")
    H = sorted(F.facets - {big})
    cands = [g for g in range(P.n_facets)
             if g not in F.facets and P.facet_vertices[g] & P.facet_vertices[big]]
    found = [ps for g in cands if (ps := _try_candidate(P, big, F, H, g)) is not None]
    if not found:
        raise ProductStructureError(
            f"facet {P.facet_names[big]} is not a product of the face "
            f"{F.label(P)} with a simplex")
    if len(found) > 1:
        names = ", ".join(P.facet_names[ps.missing] for ps in found)
        raise ProductStructureError(
            f"ambiguous product structure, candidates: {names}",
            candidates=[ps.missing for ps in found])
    return found[0]


@dataclass(frozen=True)
class BlowdownResult:
    """``facet_map`` sends every facet except the collapsed one to its index in ``result``."""

    source: CombinatorialPolytope
    result: CombinatorialPolytope
    facet_map: Mapping[int, int]
    vertex_map: tuple
    structure: ProductStructure

    @property
    def image_face(self) -> Face:
        """The face of ``result`` that the big facet collapses onto."""
        return face_from_facets(self.result, [self.facet_map[p] for p in self.structure.p_facets])

    def fiber_image(self, key: frozenset) -> int:
        return self.vertex_map[self.structure.fibers[key][0]]


def blowdown(P: CombinatorialPolytope, big_facet=None, F=None, *,
             structure: Optional[ProductStructure] = None,
             roundtrip: bool = True) -> BlowdownResult:
    """Collapse ``big_facet`` onto ``F``.

    The result is validated and, with ``roundtrip``, blowing it up along the
    image face must give back ``P`` up to isomorphism.  Either failure
    raises ``BlowdownError``.
    """
    ps = structure if structure is not None else detect_product_structure(P, big_facet, F)
    big = ps.big_facet
    fmap = {}
    for f in range(P.n_facets):
        if f != big:
            fmap[f] = len(fmap)
    names = [P.facet_names[f] for f in range(P.n_facets) if f != big]
    big_verts = P.facet_vertices[big]
    key_of = {w: key for key, ws in ps.fibers.items() for w in ws}
    pset = frozenset(ps.p_facets)
    verts, vmap, seen = [], [None] * P.n_vertices, {}
    for vid, fs in enumerate(P.vertices):
        if vid not in big_verts:
            vmap[vid] = len(verts)
            verts.append(frozenset(fmap[f] for f in fs))
            continue
        key = key_of[vid]
        if key not in seen:
            seen[key] = len(verts)
            verts.append(frozenset(fmap[f] for f in key | pset))
        vmap[vid] = seen[key]
    out = CombinatorialPolytope(P.dim, names, verts)
    rep = validate(out)
    if not rep:
        raise BlowdownError(f"collapsed polytope is invalid ({rep.violation}): {rep.message}")
    res = BlowdownResult(P, out, fmap, tuple(vmap), ps)
    if roundtrip:
        back = blowup(out, res.image_face).result
        if find_isomorphism(back, P) is None:
            raise BlowdownError("blowing the result back up does not recover the input")
    return res


# ----------------------------------------------------------------------------
# k-wedge

@dataclass(frozen=True)
class WedgeParams:
    k: int
    a: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ConstructionError("wedge needs k >= 1")

    def check_char(self):
        if self.a == 1:
            raise WedgeParameterError("a = 1 makes the wedge characteristic map degenerate")


def k_wedge(P: CombinatorialPolytope, F, k: int) -> CombinatorialPolytope:
    """``Q_F(k)``: old facets except ``F`` in order, then ``H``, then ``W1..Wk``.

    A vertex off ``F`` yields a corner vertex on all of ``W1..Wk`` followed by
    ``k`` vertices on ``H`` (the t-th avoids ``Wt``); a vertex on ``F`` yields one
    vertex on ``H`` and every ``W``.
    """
    f = P.facet_index(F)
    if k < 1:
        raise ConstructionError("wedge needs k >= 1")
    fmap = {}
    for g in range(P.n_facets):
        if g != f:
            fmap[g] = len(fmap)
    old = [P.facet_names[g] for g in range(P.n_facets) if g != f]
    extra = _fresh_names(old, ["H"] + [f"W{s}" for s in range(1, k + 1)])
    h = len(old)
    W = [h + s for s in range(1, k + 1)]
    verts = []
    for vid, fs in enumerate(P.vertices):
        img = {fmap[g] for g in fs if g != f}
        if f in fs:
            verts.append(img | {h} | set(W))
            continue
        verts.append(img | set(W))
        for t in range(k):
            verts.append(img | {h} | {w for s, w in enumerate(W) if s != t})
    return CombinatorialPolytope(P.dim + k, old + extra, verts)


def wedge_as_blowdown(P: CombinatorialPolytope, F, k: int) -> BlowdownResult:
    """The same wedge built by collapsing ``F x simplex`` inside ``P x simplex``."""
    f = P.facet_index(F)
    prod = product_with_simplex(P, k)
    r = P.n_facets
    base = face_from_facets(prod, [f] + [r + s for s in range(1, k + 1)])
    return blowdown(prod, f, base, roundtrip=False)


def _product_rows(P, lam, f, k, a):
    n = P.dim
    rows = [(0,) * k + tuple(lam[g]) for g in range(P.n_facets)]
    rows.append((-1,) * k + tuple(lam[f]))
    rows.append((1, a) + (0,) * (n + k - 2))
    for j in range(2, k + 1):
        rows.append(tuple(int(i == j - 1) for i in range(k)) + (0,) * n)
    return rows


def wedge_char_on_product(P: CombinatorialPolytope, lam: CharMap, F, params: WedgeParams) -> CharMap:
    """Characteristic map on ``P x simplex`` (facet order of ``product_with_simplex``).

    ``F`` is the facet whose vector fills the tail of the row on ``D0``.
    """
    params.check_char()
    f = P.facet_index(F)
    out = CharMap(P.dim + params.k, _product_rows(P, lam, f, params.k, params.a))
    rep = validate_rchar(product_with_simplex(P, params.k), out)
    if not rep:
        raise CharMapError(rep.message)
    return out


def k_wedge_char(P: CombinatorialPolytope, lam: CharMap, F, params: WedgeParams) -> CharMap:
    """The map on ``k_wedge(P, F, k)`` inherited from the product map."""
    params.check_char()
    f = P.facet_index(F)
    rows = _product_rows(P, lam, f, params.k, params.a)
    keep = [rows[g] for g in range(P.n_facets) if g != f] + rows[P.n_facets:]
    out = CharMap(P.dim + params.k, keep)
    rep = validate_rchar(k_wedge(P, f, params.k), out)
    if not rep:
        raise CharMapError(rep.message)
    return out


# ----------------------------------------------------------------------------
# restriction across a blowdown

def fiber_determinants(lam: CharMap, bd: BlowdownResult) -> dict:
    """For each collapsed vertex of the result, the determinant of its vectors."""
    inv = {j: i for i, j in bd.facet_map.items()}
    out = {}
    for key in bd.structure.fibers:
        vid = bd.fiber_image(key)
        rows = [lam[inv[j]] for j in sorted(bd.result.vertices[vid])]
        out[vid] = det_exact(rows)
    return out


def restrict_char(lam: CharMap, bd: BlowdownResult) -> CharMap:
    """Carry ``lam`` to the blowdown; raises ``RestrictionError`` if the result is degenerate."""
    if len(lam) != bd.source.n_facets:
        raise CharMapError("map does not match the blown-down polytope")
    for vid, d in fiber_determinants(lam, bd).items():
        if d == 0:
            raise RestrictionError(
                f"vectors at {bd.result.vertex_label(vid)} are dependent after blowdown",
                vertex=vid, det=0)
    inv = {j: i for i, j in bd.facet_map.items()}
    out = CharMap(lam.rank, [lam[inv[j]] for j in range(bd.result.n_facets)])
    rep = validate_rchar(bd.result, out)
    if not rep:
        vid, d = rep.witness
        raise RestrictionError(rep.message, vertex=vid, det=d)
    return out
