"""DV-quotients, automorphisms and orbits of finite graphs, and the eta map.

The DV-quotient by a seed set ``W`` is the least deterministic quotient in
which all of ``W`` is identified: it is computed by folding with the seeds
pre-merged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from scipy.cluster.hierarchy import DisjointSet

from .alphabet import WordLike
from .errors import GraphError, TruncationError
from .graph import InverseGraph, RootedGraph, Vertex, accepts
from .morphisms import GraphMorphism, find_morphism, fold, quotient_graph


@dataclass(frozen=True)
class DvQuotient:
    base: RootedGraph
    seeds: frozenset
    quotient: RootedGraph
    projection: GraphMorphism
    class_of: tuple
    saturated: bool

    @property
    def n_classes(self) -> int:
        return len(self.quotient.graph)

    def members(self, cls: int) -> list[int]:
        return [v for v, c in enumerate(self.class_of) if c == cls]


def dv_quotient(rg: RootedGraph, seeds: Iterable[Vertex]) -> DvQuotient:
    """Quotient of ``rg`` by the congruence generated by identifying ``seeds``.

    On a ball the merges forced by unseen vertices are missing, so the
    result is marked unsaturated whenever the base has truncated vertices.
    """
    g = rg.graph
    W = sorted({g.vertex(v) for v in seeds})
    if not W:
        raise ValueError("the seed set must not be empty")
    classes = fold(len(g), g.edges, [(W[0], w) for w in W[1:]])
    first: dict[int, int] = {}
    for v, c in enumerate(classes):
        first.setdefault(c, v)
    keys = [f"[{g.key(first[c])}]" for c in range(len(first))]
    q = RootedGraph(quotient_graph(g, classes, keys), classes[rg.root])
    proj = GraphMorphism(rg, q, tuple(classes))
    return DvQuotient(
        base=rg,
        seeds=frozenset(W),
        quotient=q,
        projection=proj,
        class_of=tuple(classes),
        saturated=not g.truncated,
    )


def automorphisms(g: InverseGraph, base: Vertex = 0) -> list[GraphMorphism]:
    """All automorphisms, one per successful propagation ``base -> y``.

    An automorphism is determined by the image of one vertex, so trying every
    target of ``base`` finds them all. Truncation marks are ignored: a ball is
    treated as the finite graph it is.
    """
    x = g.vertex(base)
    src = RootedGraph(g, x)
    out = []
    for y in range(len(g)):
        m = find_morphism(src, RootedGraph(g, y))
        if m is not None and m.is_isomorphism():
            out.append(m)
    return out


@dataclass(frozen=True)
class OrbitLabeling:
    graph: InverseGraph
    automorphisms: tuple
    orbit: tuple

    @property
    def count(self) -> int:
        return len(set(self.orbit))

    def orbit_of(self, v: Vertex) -> list[int]:
        o = self.orbit[self.graph.vertex(v)]
        return [u for u, k in enumerate(self.orbit) if k == o]


def orbit_partition(g: InverseGraph, autos=None) -> OrbitLabeling:
    if autos is None:
        autos = automorphisms(g)
    ds = DisjointSet(range(len(g)))
    for m in autos:
        for v, w in enumerate(m.vertex_map):
            ds.merge(v, w)
    number: dict[int, int] = {}
    orbit = []
    for v in range(len(g)):
        orbit.append(number.setdefault(ds[v], len(number)))
    return OrbitLabeling(g, tuple(autos), tuple(orbit))


def is_quasi_transitive(g: InverseGraph) -> tuple[bool, int]:
    """Finite graphs always are; the orbit count is the interesting part."""
    return True, orbit_partition(g).count


def eta_walk(q: DvQuotient, w: WordLike):
    """Lift of the quotient circuit ``w`` at the root, as a vertex sequence."""
    base = q.base.graph
    word = base.alphabet.parse(w)
    if not accepts(q.quotient, word):
        raise GraphError(f"{base.alphabet.format(word, '1')!r} is not a circuit of the quotient")
    table = base.table
    v = q.base.root
    seq = [v]
    for c in word:
        if not q.saturated and v in base.truncated:
            raise TruncationError(f"lift leaves the trusted region at {base.key(v)}")
        nxt = int(table[v, c])
        if nxt < 0:
            raise TruncationError(f"lift is blocked at {base.key(v)}")
        v = nxt
        seq.append(v)
    return seq


def eta_evaluate(q: DvQuotient, w: WordLike) -> str:
    """Key of the seed-class vertex reached by lifting ``w`` from the root.

    With seeds an orbit of a group ``H`` of automorphisms, that vertex names
    the unique element of ``H`` sending the root to it; the root's own key
    plays the identity.
    """
    return q.base.graph.key(eta_walk(q, w)[-1])
