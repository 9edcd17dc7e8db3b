"""R-characteristic maps, induced maps on faces and singularity orders."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import CharMapError, LatticeError, PolytopeError
from .lattice import (
    complement_basis,
    det_exact,
    group_order,
    primitive,
    project_coordinates,
    saturation_basis,
    smith_normal_form,
)
from .polytope import CombinatorialPolytope, Face, ValidationReport

__all__ = [
    "CharMap",
    "InducedCharMap",
    "SingularityGroup",
    "validate_rchar",
    "induce_on_face",
    "singularity_order",
    "singularity_order_in_face",
    "singularity_group",
    "compute_dF",
]


@dataclass(frozen=True)
class CharMap:
    """Facet index -> integer vector of length ``rank``."""

    rank: int
    vectors: tuple

    def __init__(self, rank: int, vectors: Sequence[Sequence[int]]):
        vecs = tuple(tuple(int(x) for x in v) for v in vectors)
        for i, v in enumerate(vecs):
            if len(v) != rank:
                raise CharMapError(f"vector {i} has length {len(v)}, expected {rank}")
            if not any(v):
                raise CharMapError(f"vector {i} is zero")
            if primitive(v) != v:
                raise CharMapError(f"vector {i} = {v} is not primitive")
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_names(cls, P: CombinatorialPolytope, mapping: Mapping[str, Sequence[int]]) -> "CharMap":
        missing = [f for f in P.facet_names if f not in mapping]
        if missing:
            raise CharMapError(f"no vector for facet {missing[0]!r}")
        extra = set(mapping) - set(P.facet_names)
        if extra:
            raise CharMapError(f"vector given for unknown facet {sorted(extra)[0]!r}")
        return cls(P.dim, [mapping[f] for f in P.facet_names])

    def __getitem__(self, facet: int) -> tuple:
        return self.vectors[facet]

    def __len__(self):
        return len(self.vectors)

    def as_dict(self, P: CombinatorialPolytope) -> dict:
        return {name: list(v) for name, v in zip(P.facet_names, self.vectors)}


def _check_fits(P: CombinatorialPolytope, lam: CharMap):
    if len(lam) != P.n_facets:
        raise CharMapError(f"map has {len(lam)} vectors for {P.n_facets} facets")
    if lam.rank != P.dim:
        raise CharMapError(f"vectors live in Z^{lam.rank}, polytope has dimension {P.dim}")


def validate_rchar(P: CombinatorialPolytope, lam: CharMap) -> ValidationReport:
    """Linear independence at every vertex.

    Every nonempty intersection of facets of a simple polytope contains a
    vertex, so checking the ``n`` vectors at each vertex is equivalent to
    checking every nonempty intersection.
    """
    _check_fits(P, lam)
    for vid, fs in enumerate(P.vertices):
        d = det_exact([lam[f] for f in sorted(fs)])
        if d == 0:
            return ValidationReport.failed(
                "linear independence",
                f"vectors at vertex v{vid} ({P.vertex_label(vid)}) are dependent", (vid, 0))
    return ValidationReport.passed()


@dataclass(frozen=True)
class InducedCharMap:
    """The characteristic map induced on a face by projecting modulo its normal lattice.

    ``vectors`` maps the index ``j`` of a facet ``F_j`` of the polytope to
    the vector assigned to the facet ``F & F_j`` of the face.
    ``projections`` keeps the same images before reduction to primitive form.
    """

    face: Face
    sat: tuple
    comp: tuple
    vectors: Mapping[int, tuple]
    projections: Mapping[int, tuple]
    trivial: bool = False

    def order_at(self, P: CombinatorialPolytope, vid: int) -> int:
        if vid not in self.face.vertices:
            raise PolytopeError(f"v{vid} is not a vertex of the face")
        rows = [self.vectors[g] for g in sorted(P.vertices[vid] - self.face.facets)]
        if not rows:
            return 1
        return abs(det_exact(rows))

    def as_charmap(self, P: CombinatorialPolytope) -> CharMap:
        """The induced map as a ``CharMap`` on the face polytope (see ``face_polytope``)."""
        gids = sorted(set().union(*(P.vertices[v] for v in self.face.vertices)) - self.face.facets)
        return CharMap(self.face.dim, [self.vectors[g] for g in gids])


def induce_on_face(P: CombinatorialPolytope, lam: CharMap, F: Face,
                   comp: Optional[Sequence[Sequence[int]]] = None) -> InducedCharMap:
    _check_fits(P, lam)
    if not F.vertices:
        raise PolytopeError("cannot induce on an empty face")
    if not F.facets:
        n = P.dim
        vecs = {g: lam[g] for g in range(P.n_facets)}
        basis = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return InducedCharMap(F, (), basis, vecs, dict(vecs), trivial=True)
    sat = saturation_basis([lam[g] for g in sorted(F.facets)])
    comp = complement_basis(sat, explicit=comp)
    vecs, raw = {}, {}
    for g in sorted(set().union(*(P.vertices[v] for v in F.vertices)) - F.facets):
        proj = project_coordinates(lam[g], sat, comp)
        if not any(proj):
            raise LatticeError(f"facet {P.facet_names[g]} projects to zero on the face")
        raw[g] = proj
        vecs[g] = primitive(proj)
    return InducedCharMap(F, tuple(map(tuple, sat)), tuple(map(tuple, comp)), vecs, raw)


def singularity_order(P: CombinatorialPolytope, lam: CharMap, vid: int) -> int:
    """``|det|`` of the vectors at a vertex."""
    _check_fits(P, lam)
    if not 0 <= vid < P.n_vertices:
        raise PolytopeError(f"v{vid} is not a vertex")
    return abs(det_exact([lam[f] for f in sorted(P.vertices[vid])]))


def singularity_order_in_face(P: CombinatorialPolytope, lam: CharMap, F: Face, vid: int,
                              comp=None, induced: Optional[InducedCharMap] = None) -> int:
    if vid not in F.vertices:
        raise PolytopeError(f"v{vid} is not a vertex of the face")
    if not F.facets:
        return singularity_order(P, lam, vid)
    ind = induced if induced is not None else induce_on_face(P, lam, F, comp)
    return ind.order_at(P, vid)


@dataclass(frozen=True)
class SingularityGroup:
    invariant_factors: tuple
    order: int

    def __str__(self):
        tors = [d for d in self.invariant_factors if d != 1]
        return " x ".join(f"Z/{d}" for d in tors) if tors else "trivial"


def singularity_group(P: CombinatorialPolytope, lam: CharMap, vid: int,
                      face: Optional[Face] = None, comp=None) -> SingularityGroup:
    """Invariant factors of the local group at ``vid`` (inside ``face`` if given)."""
    if face is None or not face.facets:
        if not 0 <= vid < P.n_vertices:
            raise PolytopeError(f"v{vid} is not a vertex")
        rows = [lam[f] for f in sorted(P.vertices[vid])]
    else:
        if vid not in face.vertices:
            raise PolytopeError(f"v{vid} is not a vertex of the face")
        ind = induce_on_face(P, lam, face, comp)
        rows = [ind.vectors[g] for g in sorted(P.vertices[vid] - face.facets)]
    if not rows:
        return SingularityGroup((), 1)
    factors = smith_normal_form(rows).invariant_factors
    return SingularityGroup(factors, group_order(factors))


def compute_dF(P: CombinatorialPolytope, lam: CharMap, F: Face, target: int,
               combo: Sequence[int], coeffs: Sequence, comp=None) -> int:
    """Positive integer ``d`` with ``lam_F(target) == sum c_i lam_F(combo_i) / d``.

    The relation ``lam(target) == sum c_i lam(combo_i)`` must hold exactly.
    Zero coefficients are dropped, as are combo facets containing ``F``
    (their projection vanishes, so they contribute nothing on the face).
    """
    coeffs = [Fraction(c) for c in coeffs]
    if len(coeffs) != len(combo):
        raise ValueError("one coefficient per combo facet")
    n = lam.rank
    total = [sum(c * lam[g][i] for c, g in zip(coeffs, combo)) for i in range(n)]
    if tuple(total) != tuple(Fraction(x) for x in lam[target]):
        raise LatticeError("target vector is not the stated rational combination")
    terms = [(g, c) for g, c in zip(combo, coeffs) if c != 0]
    for g in [target] + [g for g, _ in terms]:
        if not (P.facet_vertices[g] & F.vertices):
            raise PolytopeError(f"facet {P.facet_names[g]} does not meet the face")
    if target in F.facets:
        raise PolytopeError("target facet contains the face")
    terms = [(g, c) for g, c in terms if g not in F.facets]
    ind = induce_on_face(P, lam, F, comp)
    w = ind.vectors[target]
    u = [sum(c * ind.vectors[g][i] for g, c in terms) for i in range(len(w))]
    # u must be a positive integer multiple of w
    j = next(i for i, x in enumerate(w) if x)
    s = u[j] / w[j]
    if any(u[i] != s * w[i] for i in range(len(w))):
        raise LatticeError("combination of induced vectors is not parallel to the target")
    if s <= 0 or s.denominator != 1:
        raise LatticeError(f"reduction factor {s} is not a positive integer")
    return int(s)
