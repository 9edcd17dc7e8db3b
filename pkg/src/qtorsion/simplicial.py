"""Simplicial complexes on the fan side: duals, the simplicial wedge and its vectors."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from .constructions import WedgeParams
from .errors import CharMapError, QTorsionError
from .lattice import det_exact, rank
from .polytope import CombinatorialPolytope

__all__ = [
    "SimplicialComplex",
    "VertexCharMap",
    "dual_of_polytope",
    "simplicial_k_wedge",
    "wedge_vertex_vectors",
    "complex_isomorphism",
    "SimplicialError",
]


class SimplicialError(QTorsionError):
    """Malformed simplicial complex or a vertex that is not in it."""


class SimplicialComplex:
    """A complex given by named vertices and an antichain of maximal simplices."""

    def __init__(self, vertices: Sequence[str], maximal: Iterable[Iterable]):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise SimplicialError("vertex names are not distinct")
        self._index = {v: i for i, v in enumerate(self.vertices)}
        simplices = []
        for s in maximal:
            ids = frozenset(self._resolve(x) for x in s)
            if not ids:
                raise SimplicialError("empty maximal simplex")
            simplices.append(ids)
        if len(set(simplices)) != len(simplices):
            raise SimplicialError("a maximal simplex is listed twice")
        for a in simplices:
            for b in simplices:
                if a < b:
                    raise SimplicialError("maximal simplices do not form an antichain")
        used = set().union(*simplices) if simplices else set()
        if len(used) != len(self.vertices):
            missing = next(v for i, v in enumerate(self.vertices) if i not in used)
            raise SimplicialError(f"vertex {missing!r} lies in no simplex")
        self.maximal = frozenset(simplices)

    def _resolve(self, x) -> int:
        if isinstance(x, int):
            if not 0 <= x < len(self.vertices):
                raise SimplicialError(f"vertex index {x} out of range")
            return x
        try:
            return self._index[x]
        except KeyError:
            raise SimplicialError(f"unknown vertex {x!r}") from None

    @classmethod
    def from_simplices(cls, vertices: Sequence[str], simplices: Iterable[Iterable]) -> "SimplicialComplex":
        """Keep only the inclusion-maximal sets; unused names are dropped."""
        sets = {frozenset(s) for s in simplices}
        top = [s for s in sets if not any(s < t for t in sets)]
        used = set().union(*top) if top else set()
        names = [v for v in vertices if v in used]
        return cls(names, top)

    def index(self, v: str) -> int:
        return self._resolve(v)

    def names(self, s: Iterable[int]) -> frozenset:
        return frozenset(self.vertices[i] for i in s)

    def sorted_maximal(self) -> list:
        """Maximal simplices as name sets, in a stable order."""
        keyed = sorted(sorted(s) for s in self.maximal)
        return [[self.vertices[i] for i in s] for s in keyed]

    @property
    def dim(self) -> int:
        return max(len(s) for s in self.maximal) - 1

    @property
    def is_pure(self) -> bool:
        return len({len(s) for s in self.maximal}) == 1

    def link(self, v) -> list:
        """Maximal simplices of the link, as name sets."""
        i = self._resolve(v)
        out = {self.names(s - {i}) for s in self.maximal if i in s}
        return [s for s in out if s]

    def deletion(self, v) -> list:
        """Maximal simplices of the subcomplex of simplices avoiding ``v``, as name sets."""
        i = self._resolve(v)
        faces = {self.names(s - {i}) for s in self.maximal}
        faces.discard(frozenset())
        return [s for s in faces if not any(s < t for t in faces)]

    def __repr__(self):
        return f"SimplicialComplex(vertices={len(self.vertices)}, maximal={len(self.maximal)})"

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and \
            {self.names(s) for s in self.maximal} == {other.names(s) for s in other.maximal}

    def __hash__(self):
        return hash(frozenset(self.names(s) for s in self.maximal))


def dual_of_polytope(P: CombinatorialPolytope) -> SimplicialComplex:
    """One vertex per facet, one maximal simplex per vertex of ``P``."""
    return SimplicialComplex(P.facet_names, [sorted(v) for v in P.vertices])


def wedge_names(v: str, k: int) -> list:
    return [f"{v}_{i}" for i in range(k + 1)]


def simplicial_k_wedge(K: SimplicialComplex, v, k: int, *, literal: bool = False) -> SimplicialComplex:
    """Replace ``v`` by ``k + 1`` vertices ``v_0 .. v_k``.

    The result is the full new simplex joined with the link of ``v``,
    together with the boundary of the new simplex joined with the part of
    ``K`` avoiding ``v``.  With ``literal`` the second part uses the single
    new vertices instead of the boundary; for ``k >= 2`` that complex is
    not pure.
    """
    if k < 1:
        raise SimplicialError("wedge needs k >= 1")
    name = K.vertices[K.index(v)]
    new = wedge_names(name, k)
    clash = set(new) & set(K.vertices)
    if clash:
        raise SimplicialError(f"new vertex name {sorted(clash)[0]!r} already used")
    full = frozenset(new)
    link = K.link(name) or [frozenset()]
    rest = K.deletion(name)
    if literal:
        pieces = [frozenset([x]) for x in new]
    else:
        pieces = [full - {x} for x in new]
    simplices = [full | s for s in link] + [p | s for p in pieces for s in rest]
    order = [x for x in K.vertices if x != name] + new
    return SimplicialComplex.from_simplices(order, simplices)


def complex_isomorphism(K1: SimplicialComplex, K2: SimplicialComplex) -> Optional[dict]:
    """A vertex bijection carrying maximal simplices onto maximal simplices, or None."""
    if len(K1.vertices) != len(K2.vertices) or len(K1.maximal) != len(K2.maximal):
        return None

    def graph(K):
        G = nx.Graph()
        for i in range(len(K.vertices)):
            G.add_node(("v", i), kind=0)
        for j, s in enumerate(sorted(sorted(s) for s in K.maximal)):
            G.add_node(("s", j), kind=1)
            G.add_edges_from((("s", j), ("v", i)) for i in s)
        return G

    gm = GraphMatcher(graph(K1), graph(K2), node_match=lambda a, b: a["kind"] == b["kind"])
    for m in gm.isomorphisms_iter():
        return {K1.vertices[a[1]]: K2.vertices[b[1]] for a, b in m.items() if a[0] == "v"}
    return None


@dataclass(frozen=True)
class VertexCharMap:
    """Vertex name -> integer vector of length ``rank``."""

    rank: int
    vectors: Mapping[str, tuple]

    def __init__(self, rank: int, vectors: Mapping[str, Sequence[int]]):
        vecs = {str(k): tuple(int(x) for x in v) for k, v in vectors.items()}
        for k, v in vecs.items():
            if len(v) != rank:
                raise CharMapError(f"vector for {k!r} has length {len(v)}, expected {rank}")
            if not any(v):
                raise CharMapError(f"vector for {k!r} is zero")
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "vectors", vecs)

    def __getitem__(self, v: str) -> tuple:
        return self.vectors[v]

    def check(self, K: SimplicialComplex) -> None:
        """Raise unless there is one vector per vertex and every maximal cone is independent."""
        missing = [v for v in K.vertices if v not in self.vectors]
        if missing:
            raise CharMapError(f"no vector for vertex {missing[0]!r}")
        extra = set(self.vectors) - set(K.vertices)
        if extra:
            raise CharMapError(f"vector for unknown vertex {sorted(extra)[0]!r}")
        for names in K.sorted_maximal():
            rows = [self.vectors[v] for v in names]
            if rank(rows) < len(rows):
                raise CharMapError("vectors of the cone {" + ", ".join(names) + "} are dependent")

    def cone_orders(self, K: SimplicialComplex) -> dict:
        """``|det|`` of each full-dimensional maximal cone, keyed by its name set."""
        out = {}
        for names in K.sorted_maximal():
            if len(names) == self.rank:
                out[frozenset(names)] = abs(det_exact([self.vectors[v] for v in names]))
        return out


def wedge_vertex_vectors(K: SimplicialComplex, lam: VertexCharMap, v, a: int) -> tuple:
    """The simplicial 2-wedge at ``v`` with its vectors; returns ``(K2, lam2)``.

    Only ``k = 2`` is covered.  ``a = 1`` is rejected.
    """
    WedgeParams(2, a).check_char()
    lam.check(K)
    name = K.vertices[K.index(v)]
    K2 = simplicial_k_wedge(K, name, 2)
    v0, v1, v2 = wedge_names(name, 2)
    zero = (0,) * lam.rank
    vecs = {x: (0, 0) + lam[x] for x in K.vertices if x != name}
    vecs[v0] = (-1, -1) + lam[name]
    vecs[v1] = (1, a) + zero
    vecs[v2] = (0, 1) + zero
    out = VertexCharMap(lam.rank + 2, vecs)
    out.check(K2)
    return K2, out
