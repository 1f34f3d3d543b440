"""Morphisms between inverse graphs, covers, walk lifting, cores and folding."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .alphabet import InvolutiveAlphabet, WordLike, free_reduce
from .errors import GraphError, TruncationError
from .graph import InverseGraph, RootedGraph, Vertex, Walk, induced_subgraph, trace_status


@dataclass(frozen=True)
class GraphMorphism:
    """Root-preserving vertex map; the edge map is induced by labels."""

    source: RootedGraph
    target: RootedGraph
    vertex_map: tuple

    def __call__(self, v: Vertex) -> int:
        return self.vertex_map[self.source.graph.vertex(v)]

    def is_valid(self) -> bool:
        if self.vertex_map[self.source.root] != self.target.root:
            return False
        t = self.target.graph.table
        m = self.vertex_map
        return all(t[m[u], c] == m[v] for u, c, v in self.source.graph.edges)

    def is_injective(self) -> bool:
        return len(set(self.vertex_map)) == len(self.vertex_map)

    def is_surjective(self) -> bool:
        return len(set(self.vertex_map)) == len(self.target.graph)

    def is_isomorphism(self) -> bool:
        return (
            self.is_injective()
            and self.is_surjective()
            and self.source.graph.n_edges == self.target.graph.n_edges
        )

    def is_immersion(self) -> bool:
        """Every star map is injective."""
        seen = set()
        m = self.vertex_map
        for u, c, v in self.source.graph.edges:
            image = (m[u], c, m[v], u)
            if image in seen:
                return False
            seen.add(image)
        return True

    def compose(self, other: "GraphMorphism") -> "GraphMorphism":
        """``other ∘ self``."""
        return GraphMorphism(
            self.source, other.target, tuple(other.vertex_map[x] for x in self.vertex_map)
        )


def find_morphism(src: RootedGraph, tgt: RootedGraph) -> Optional[GraphMorphism]:
    """The unique root-preserving morphism, found by propagation, or ``None``.

    Only the edges realized in ``src`` are checked, so a truncated source
    vertex with a partial star imposes nothing beyond what it shows.
    """
    if src.alphabet != tgt.alphabet:
        return None
    s = src.graph.table
    t = tgt.graph.table
    m = np.full(len(src.graph), -1, dtype=np.int64)
    m[src.root] = tgt.root
    queue = deque([src.root])
    while queue:
        u = queue.popleft()
        x = m[u]
        for c, v in enumerate(s[u]):
            if v < 0:
                continue
            y = t[x, c]
            if y < 0:
                return None
            if m[v] < 0:
                m[v] = y
                queue.append(v)
            elif m[v] != y:
                return None
    if (m < 0).any():
        raise GraphError("source graph is not connected")
    return GraphMorphism(src, tgt, tuple(int(x) for x in m))


def cover_report(m: GraphMorphism) -> tuple[bool, list[int]]:
    """``(ok, skipped)``: star bijectivity on non-truncated source vertices.

    ``skipped`` lists the truncated source vertices that were not checked.
    """
    s = m.source.graph
    t = m.target.graph.table
    st = s.table
    skipped = []
    ok = True
    for u in range(len(s)):
        if u in s.truncated:
            skipped.append(u)
            continue
        if not np.array_equal(st[u] >= 0, t[m.vertex_map[u]] >= 0):
            ok = False
    return ok, skipped


def is_cover(m: GraphMorphism) -> bool:
    return cover_report(m)[0]


def lift_walk(cover: GraphMorphism, start: Vertex, w: WordLike) -> Walk:
    """The unique walk from ``start`` projecting onto the walk labelled ``w``."""
    src = cover.source.graph
    word = src.alphabet.parse(w)
    start = src.vertex(start)
    base_end, _ = trace_status(cover.target.graph, cover.vertex_map[start], word)
    if base_end is None:
        raise GraphError("the word does not label a walk in the base")
    seq = [start]
    v = start
    for c in word:
        nxt = int(src.table[v, c])
        if nxt < 0:
            if v in src.truncated:
                raise TruncationError(f"lift leaves the trusted region at {src.key(v)}")
            raise GraphError(f"morphism is not a cover at {src.key(v)}")
        v = nxt
        seq.append(v)
    return Walk(tuple(seq), word)


def core_of(rg: RootedGraph) -> RootedGraph:
    """Remove hanging trees: repeatedly delete non-root vertices of degree one."""
    g = rg.graph
    table = g.table
    degree = (table >= 0).sum(axis=1)
    alive = np.ones(len(g), dtype=bool)
    stack = [v for v in range(len(g)) if degree[v] <= 1 and v != rg.root]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for w in table[v]:
            if w >= 0 and alive[w]:
                degree[w] -= 1
                if degree[w] == 1 and w != rg.root:
                    stack.append(int(w))
    sub = induced_subgraph(g, np.flatnonzero(alive))
    return RootedGraph(sub, sub.origin.index(rg.root))


def fold(
    n: int,
    edges: Iterable[tuple[int, int, int]],
    merges: Iterable[tuple[int, int]] = (),
) -> list[int]:
    """Least congruence making the graph deterministic and containing ``merges``.

    Returns a class index per vertex; classes are numbered by their smallest
    vertex. Clashes are processed in FIFO discovery order.
    """
    ds = DisjointSet(range(n))
    out: dict[int, dict[int, int]] = {v: {} for v in range(n)}
    pending: deque[tuple[int, int]] = deque(merges)

    for u, c, v in edges:
        row = out[u]
        if c in row:
            pending.append((row[c], v))
        else:
            row[c] = v
    while pending:
        a, b = pending.popleft()
        ra, rb = ds[a], ds[b]
        if ra == rb:
            continue
        ds.merge(ra, rb)
        keep = ds[ra]
        drop = rb if keep == ra else ra
        big, small = out[keep], out.pop(drop)
        for c, t in small.items():
            if c in big:
                pending.append((big[c], t))
            else:
                big[c] = t
    rep = [ds[v] for v in range(n)]
    number: dict[int, int] = {}
    for v in range(n):
        number.setdefault(rep[v], len(number))
    return [number[r] for r in rep]


def quotient_graph(
    g: InverseGraph, classes: Sequence[int], keys: Optional[Sequence[str]] = None
) -> InverseGraph:
    """Image of ``g`` under a vertex partition (given as class indices)."""
    k = max(classes) + 1 if len(classes) else 0
    if keys is None:
        keys = [str(i) for i in range(k)]
    edges = {(classes[u], c, classes[v]) for u, c, v in g.edges}
    truncated = {classes[t] for t in g.truncated}
    return InverseGraph(g.alphabet, keys, edges, truncated)


def stallings_fold(alphabet: InvolutiveAlphabet, generators: Iterable[WordLike]) -> RootedGraph:
    """Folded core graph of the subgroup generated by ``generators``.

    Its reduced accepted words are exactly the reduced words of the subgroup.
    """
    n = 1
    edges = []
    for gen in generators:
        word = free_reduce(alphabet.parse(gen))
        if not word:
            continue
        path = [0] + list(range(n, n + len(word) - 1)) + [0]
        n += len(word) - 1
        for i, c in enumerate(word):
            edges.append((path[i], c, path[i + 1]))
            edges.append((path[i + 1], c ^ 1, path[i]))
    classes = fold(n, edges)
    k = max(classes) + 1
    folded_edges = {(classes[u], c, classes[v]) for u, c, v in edges}
    folded = InverseGraph(alphabet, [str(i) for i in range(k)], folded_edges)
    return core_of(RootedGraph(folded, classes[0]))
