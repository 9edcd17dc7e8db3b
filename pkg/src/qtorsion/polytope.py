"""Combinatorial simple polytopes.

A polytope is stored purely through its vertex-facet incidence: an ambient
dimension ``n``, an ordered list of facet names and, for every vertex, the
set of facet indices meeting at it.  No coordinates are kept; every
construction in the package is determined by this incidence.

Facet identity is the positional index; names are display metadata.
Vertex identity is the positional index into ``vertices``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional, Sequence

import networkx as nx
from networkx.algorithms import isomorphism

from .errors import PolytopeError

__all__ = [
    "CombinatorialPolytope",
    "Face",
    "SubComplex",
    "ValidationReport",
    "validate",
    "face_from_facets",
    "face_polytope",
    "all_faces",
    "product_with_simplex",
    "face_counts",
    "euler_check",
    "find_isomorphism",
    "is_isomorphic",
    "simplex",
    "cube",
    "polygon",
    "prism",
    "interval",
]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a structural check.

    ``violation`` names the first invariant that failed (``None`` on pass)
    and ``witness`` carries the offending vertex, ridge or facet.
    """

    ok: bool
    violation: Optional[str] = None
    message: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok

    @classmethod
    def passed(cls):
        return cls(True)

    @classmethod
    def failed(cls, violation, message, witness=None):
        return cls(False, violation, message, witness)


@dataclass(frozen=True, eq=False)
class CombinatorialPolytope:
    dim: int
    facet_names: tuple
    vertices: tuple

    def __init__(self, dim: int, facet_names: Iterable[str], vertices: Iterable[Iterable[int]]):
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "facet_names", tuple(str(f) for f in facet_names))
        object.__setattr__(self, "vertices", tuple(frozenset(int(i) for i in v) for v in vertices))

    def __repr__(self):
        return (f"CombinatorialPolytope(dim={self.dim}, facets={self.n_facets}, "
                f"vertices={self.n_vertices})")

    def __eq__(self, other):
        if not isinstance(other, CombinatorialPolytope):
            return NotImplemented
        return (self.dim == other.dim and self.facet_names == other.facet_names
                and self.vertices == other.vertices)

    def __hash__(self):
        return hash((self.dim, self.facet_names, self.vertices))

    @property
    def n_facets(self) -> int:
        return len(self.facet_names)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def facet_vertices(self) -> tuple:
        """For each facet index, the frozenset of vertex ids lying on it."""
        on = [set() for _ in self.facet_names]
        for vid, fs in enumerate(self.vertices):
            for f in fs:
                if 0 <= f < len(on):
                    on[f].add(vid)
        return tuple(frozenset(s) for s in on)

    @cached_property
    def _name_index(self) -> dict:
        return {name: i for i, name in enumerate(self.facet_names)}

    def facet_index(self, name) -> int:
        """Resolve a facet name (or an integer index) to its index."""
        if isinstance(name, int):
            if not 0 <= name < self.n_facets:
                raise PolytopeError(f"facet index {name} out of range")
            return name
        try:
            return self._name_index[name]
        except KeyError:
            raise PolytopeError(f"unknown facet name {name!r}") from None

    def vertex_name(self, vid: int) -> str:
        return f"v{vid}"

    def vertex_label(self, vid: int) -> str:
        """Human readable label: the facets meeting at the vertex."""
        return "^".join(self.facet_names[f] for f in sorted(self.vertices[vid]))

    def vertex_index(self, token) -> int:
        """Resolve ``v3``, ``3`` or a facet intersection ``A^B^C`` to a vertex id."""
        if isinstance(token, int):
            vid = token
        else:
            token = str(token).strip()
            if "^" in token:
                fs = frozenset(self.facet_index(t) for t in token.split("^"))
                for vid, vs in enumerate(self.vertices):
                    if vs == fs:
                        return vid
                raise PolytopeError(f"no vertex with facets {token!r}")
            if token.startswith("v"):
                token = token[1:]
            try:
                vid = int(token)
            except ValueError:
                raise PolytopeError(f"cannot parse vertex {token!r}") from None
        if not 0 <= vid < self.n_vertices:
            raise PolytopeError(f"vertex index {vid} out of range")
        return vid

    def whole(self) -> "Face":
        """The polytope itself as a face (empty support)."""
        return Face(frozenset(), frozenset(range(self.n_vertices)), self.dim)

    def vertex_face(self, vid: int) -> "Face":
        return Face(self.vertices[vid], frozenset([vid]), 0)

    def adjacent(self, u: int, v: int) -> bool:
        return u != v and len(self.vertices[u] & self.vertices[v]) == self.dim - 1

    @cached_property
    def edge_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        for u, v in combinations(range(self.n_vertices), 2):
            if self.adjacent(u, v):
                g.add_edge(u, v)
        return g

    def neighbours(self, vid: int) -> frozenset:
        return frozenset(self.edge_graph.neighbors(vid))

    def renamed(self, names: Sequence[str]) -> "CombinatorialPolytope":
        return CombinatorialPolytope(self.dim, names, self.vertices)


@dataclass(frozen=True)
class Face:
    """A nonempty face, identified by its vertex set.

    ``facets`` is the full support: every facet containing the face.  For
    a simple polytope ``dim == n - len(facets)``.
    """

    facets: frozenset
    vertices: frozenset
    dim: int

    def __contains__(self, vid):
        return vid in self.vertices

    def __le__(self, other: "Face"):
        return self.vertices <= other.vertices

    def __lt__(self, other: "Face"):
        return self.vertices < other.vertices

    def __len__(self):
        return len(self.vertices)

    def label(self, P: CombinatorialPolytope) -> str:
        if not self.facets:
            return "<P>"
        return ",".join(P.facet_names[f] for f in sorted(self.facets))


def _support(P: CombinatorialPolytope, vertex_set) -> frozenset:
    it = iter(vertex_set)
    s = set(P.vertices[next(it)])
    for v in it:
        s &= P.vertices[v]
    return frozenset(s)


def face_from_facets(P: CombinatorialPolytope, S: Iterable) -> Optional[Face]:
    """The face cut out by the facets ``S``, or ``None`` if they do not meet.

    Facets may be given by index or by name.
    """
    idx = frozenset(P.facet_index(s) for s in S)
    if not idx:
        return P.whole()
    verts = frozenset(v for v, fs in enumerate(P.vertices) if idx <= fs)
    if not verts:
        return None
    supp = _support(P, verts)
    return Face(supp, verts, P.dim - len(supp))


def face_of_vertices(P: CombinatorialPolytope, verts: Iterable[int]) -> Face:
    """Smallest face containing the given vertices."""
    verts = frozenset(verts)
    if not verts:
        raise PolytopeError("empty vertex set has no enclosing face")
    supp = _support(P, verts)
    return face_from_facets(P, supp)


def all_faces(P: CombinatorialPolytope, include_whole: bool = True) -> list:
    """Every nonempty face, ordered by dimension then vertex tuple."""
    seen = {}
    for fs in P.vertices:
        fs = sorted(fs)
        for k in range(len(fs) + 1):
            for sub in combinations(fs, k):
                if not sub and not include_whole:
                    continue
                f = face_from_facets(P, sub)
                seen.setdefault(f.vertices, f)
    return sorted(seen.values(), key=lambda f: (f.dim, sorted(f.vertices)))


def face_polytope(P: CombinatorialPolytope, F: Face):
    """The face ``F`` as a polytope in its own right.

    Returns ``(polytope, facet_ids, vertex_ids)``: ``facet_ids[j]`` is the
    index in ``P`` of the facet ``G`` with ``F & G`` the j-th facet of the
    face, and ``vertex_ids[i]`` the vertex of ``P`` that is vertex ``i``.
    """
    vids = sorted(F.vertices)
    gids = sorted(set().union(*(P.vertices[v] for v in vids)) - F.facets)
    gpos = {g: i for i, g in enumerate(gids)}
    verts = [[gpos[g] for g in P.vertices[v] - F.facets] for v in vids]
    names = [P.facet_names[g] for g in gids]
    return CombinatorialPolytope(F.dim, names, verts), tuple(gids), tuple(vids)


@dataclass(frozen=True)
class SubComplex:
    """Union of faces, stored as an antichain of maximal faces."""

    maximal_faces: tuple

    @classmethod
    def from_faces(cls, faces: Iterable[Face]) -> "SubComplex":
        faces = {f.vertices: f for f in faces}
        keep = [f for f in faces.values()
                if not any(f.vertices < g for g in faces if g is not f.vertices)]
        keep.sort(key=lambda f: (-f.dim, sorted(f.vertices)))
        return cls(tuple(keep))

    @property
    def vertices(self) -> frozenset:
        out = set()
        for f in self.maximal_faces:
            out |= f.vertices
        return frozenset(out)

    @property
    def dim(self) -> int:
        return max((f.dim for f in self.maximal_faces), default=-1)

    def containing(self, vid: int) -> list:
        return [f for f in self.maximal_faces if vid in f.vertices]

    def key(self) -> frozenset:
        return frozenset(f.vertices for f in self.maximal_faces)


# ----------------------------------------------------------------------------
# validation

def validate(P: CombinatorialPolytope) -> ValidationReport:
    n, r = P.dim, P.n_facets
    if n < 1:
        return ValidationReport.failed("dimension", f"dimension must be >= 1, got {n}")
    if len(set(P.facet_names)) != r:
        return ValidationReport.failed("facet names", "facet names are not distinct")
    for vid, fs in enumerate(P.vertices):
        bad = [f for f in fs if not 0 <= f < r]
        if bad:
            return ValidationReport.failed(
                "facet index", f"vertex v{vid} references unknown facet {bad[0]}", vid)
    for vid, fs in enumerate(P.vertices):
        if len(fs) != n:
            return ValidationReport.failed(
                "simplicity",
                f"vertex v{vid} lies on {len(fs)} facets, expected {n}", vid)
    for f, vs in enumerate(P.facet_vertices):
        if not vs:
            return ValidationReport.failed(
                "empty facet", f"facet {P.facet_names[f]} contains no vertex", f)
    if n == 1:
        if P.n_vertices != 2 or P.vertices[0] == P.vertices[1]:
            return ValidationReport.failed(
                "ridge condition", "a 1-polytope has exactly two vertices on distinct facets")
        return ValidationReport.passed()
    ridges = defaultdict(int)
    for fs in P.vertices:
        for ridge in combinations(sorted(fs), n - 1):
            ridges[ridge] += 1
    for ridge, count in ridges.items():
        if count != 2:
            names = ",".join(P.facet_names[f] for f in ridge)
            return ValidationReport.failed(
                "ridge condition",
                f"ridge {{{names}}} lies in {count} vertices, expected 2", ridge)
    if len(set(P.vertices)) != P.n_vertices:
        return ValidationReport.failed("distinct vertices", "duplicate vertex facet sets")
    if not nx.is_connected(P.edge_graph):
        return ValidationReport.failed("connectivity", "vertex-edge graph is disconnected")
    return ValidationReport.passed()


def check(P: CombinatorialPolytope) -> CombinatorialPolytope:
    """Return ``P`` unchanged, raising ``PolytopeError`` if it is invalid."""
    rep = validate(P)
    if not rep:
        raise PolytopeError(f"invalid polytope ({rep.violation}): {rep.message}")
    return P


# ----------------------------------------------------------------------------
# counting and isomorphism

def face_counts(P: CombinatorialPolytope) -> tuple:
    """``(f_0, ..., f_{n-1})`` counts of proper faces by dimension."""
    counts = [0] * P.dim
    for f in all_faces(P, include_whole=False):
        counts[f.dim] += 1
    return tuple(counts)


def euler_check(P: CombinatorialPolytope) -> bool:
    """Boundary Euler characteristic equals that of the (n-1)-sphere."""
    chi = sum((-1) ** i * c for i, c in enumerate(face_counts(P)))
    return chi == 1 - (-1) ** P.dim


def _incidence_graph(P: CombinatorialPolytope) -> nx.Graph:
    g = nx.Graph()
    for f in range(P.n_facets):
        g.add_node(("f", f), kind="f")
    for v, fs in enumerate(P.vertices):
        g.add_node(("v", v), kind="v")
        for f in fs:
            g.add_edge(("v", v), ("f", f))
    return g


def find_isomorphism(P: CombinatorialPolytope, Q: CombinatorialPolytope) -> Optional[dict]:
    """Facet bijection ``P -> Q`` carrying vertex sets onto vertex sets, or None."""
    if (P.dim, P.n_facets, P.n_vertices) != (Q.dim, Q.n_facets, Q.n_vertices):
        return None
    gm = isomorphism.GraphMatcher(
        _incidence_graph(P), _incidence_graph(Q),
        node_match=lambda a, b: a["kind"] == b["kind"])
    for m in gm.isomorphisms_iter():
        return {a[1]: b[1] for a, b in m.items() if a[0] == "f"}
    return None


def is_isomorphic(P: CombinatorialPolytope, Q: CombinatorialPolytope) -> bool:
    return find_isomorphism(P, Q) is not None


# ----------------------------------------------------------------------------
# products and standard polytopes

def _fresh_names(existing, stems):
    taken = set(existing)
    out = []
    for s in stems:
        name = s
        while name in taken:
            name += "'"
        taken.add(name)
        out.append(name)
    return out


def product_with_simplex(P: CombinatorialPolytope, k: int, prefix: str = "D") -> CombinatorialPolytope:
    """``P x Delta^k``.

    Facets are the ``r`` facets ``F_j x Delta^k`` (same names, same order)
    followed by ``P x F_s`` for ``s = 0..k`` named ``D0..Dk``.  Vertex
    ``(v, s)`` has id ``v * (k + 1) + s`` and lies on every simplex facet
    except ``D<s>``.
    """
    if k < 1:
        raise PolytopeError("simplex dimension must be positive")
    r = P.n_facets
    names = list(P.facet_names) + _fresh_names(P.facet_names, [f"{prefix}{s}" for s in range(k + 1)])
    verts = []
    for fs in P.vertices:
        for s in range(k + 1):
            verts.append(set(fs) | {r + j for j in range(k + 1) if j != s})
    return CombinatorialPolytope(P.dim + k, names, verts)


def simplex(n: int, names: Optional[Sequence[str]] = None) -> CombinatorialPolytope:
    names = list(names) if names else [f"F{i}" for i in range(n + 1)]
    return CombinatorialPolytope(n, names, [set(range(n + 1)) - {i} for i in range(n + 1)])


def interval(names=("F0", "F1")) -> CombinatorialPolytope:
    return CombinatorialPolytope(1, names, [{0}, {1}])


def polygon(m: int, names: Optional[Sequence[str]] = None) -> CombinatorialPolytope:
    """m-gon whose edges ``E0..E{m-1}`` are listed cyclically; vertex i = E{i-1} & E{i}."""
    if m < 3:
        raise PolytopeError("a polygon needs at least 3 edges")
    names = list(names) if names else [f"E{i}" for i in range(m)]
    return CombinatorialPolytope(2, names, [{(i - 1) % m, i} for i in range(m)])


def prism(m: int) -> CombinatorialPolytope:
    """m-gonal prism: sides ``S0..S{m-1}``, then ``Bot`` and ``Top``."""
    base = polygon(m, [f"S{i}" for i in range(m)])
    p = product_with_simplex(base, 1)
    return p.renamed([f"S{i}" for i in range(m)] + ["Top", "Bot"])


def cube(n: int = 3) -> CombinatorialPolytope:
    """n-cube with opposite facet pairs ``(F0, F1), (F2, F3), ...``."""
    names = [f"F{i}" for i in range(2 * n)]
    verts = []
    for bits in range(2 ** n):
        verts.append({2 * i + ((bits >> i) & 1) for i in range(n)})
    return CombinatorialPolytope(n, names, verts)
