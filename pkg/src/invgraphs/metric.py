"""Graph metric: distances, disks, end-cones, cones and geodesic words."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .alphabet import Word
from .errors import GraphError, TruncationError
from .graph import InverseGraph, RootedGraph, Vertex, induced_subgraph


def distances(g: InverseGraph, src: Vertex, allowed: Optional[np.ndarray] = None) -> np.ndarray:
    """BFS distances from ``src`` (``-1`` = unreachable), optionally inside a vertex mask."""
    if allowed is not None:
        allowed = np.ascontiguousarray(allowed, dtype=np.uint8)
    return kernels.bfs(g.ktable, g.vertex(src), allowed)


def distance(g: InverseGraph, u: Vertex, v: Vertex) -> Optional[int]:
    d = int(distances(g, u)[g.vertex(v)])
    return None if d < 0 else d


def set_diameter(g: InverseGraph, vertices: Iterable[int]) -> int:
    """Largest distance in ``g`` between two vertices of the set (0 for singletons).

    Each search stops as soon as the remaining set members are reached, so
    small, tight sets stay cheap on large graphs.
    """
    vs = sorted(set(int(v) for v in vertices))
    table = g.rows
    best = 0
    for i, u in enumerate(vs[:-1]):
        todo = set(vs[i + 1:])
        dist = {u: 0}
        frontier = [u]
        d = 0
        while todo and frontier:
            d += 1
            nxt = []
            for x in frontier:
                for y in table[x]:
                    if y >= 0 and y not in dist:
                        dist[y] = d
                        nxt.append(y)
                        todo.discard(y)
            frontier = nxt
        if todo:
            raise GraphError("set spans several components; diameter is infinite")
        best = max(best, max(dist[v] for v in vs[i + 1:]))
    return best


def _boundary(g: InverseGraph, inside: np.ndarray, among: Iterable[int]) -> list[int]:
    table = g.table
    out = []
    for v in among:
        row = table[v]
        targets = row[row >= 0]
        if not inside[targets].all():
            out.append(v)
    return out


def disk(g: InverseGraph, center: Vertex, n: int) -> InverseGraph:
    """Induced subgraph on ``{x : d(center, x) <= n}``.

    Vertices with an edge leaving the disk are flagged truncated, and so are
    vertices that were already truncated in ``g``.
    """
    if n < 0:
        raise ValueError("radius must be non-negative")
    dist = distances(g, center)
    inside = (dist >= 0) & (dist <= n)
    chosen = np.flatnonzero(inside)
    outer = _boundary(g, inside, chosen[dist[chosen] == n])
    return induced_subgraph(g, chosen, truncate=outer)


@dataclass(frozen=True)
class EndCone:
    """Component of ``{x : |x| >= n}`` around an anchor of norm ``n``.

    ``graph`` is the induced subgraph (its ``origin`` maps back to the ball),
    ``frontier`` and ``anchor`` are ids in ``graph``. ``depth`` is the
    relative depth the cone was clipped at (``None`` for the whole ball);
    ``trusted_depth`` is how deep the ball guarantees completeness.
    """

    graph: InverseGraph
    anchor: int
    frontier: frozenset
    base_norm: int
    depth: Optional[int]
    trusted_depth: Optional[int]
    norms: tuple

    @property
    def exact(self) -> bool:
        """Whether the clipped cone is fully determined by the ball."""
        if self.trusted_depth is None:
            return True
        return self.depth is not None and self.depth <= self.trusted_depth

    def origin_frontier(self) -> frozenset:
        return frozenset(self.graph.origin[f] for f in self.frontier)


def end_cone(rg: RootedGraph, v: Vertex, depth: Optional[int] = None) -> EndCone:
    """End-cone at ``v``: its component in ``{x : n <= |x|}`` with ``n = |v|``.

    With ``depth`` the cone is the component of ``v`` in the band
    ``n <= |x| <= n + depth``; vertices at the band's outer edge that have
    edges leaving it are flagged truncated.
    """
    g = rg.graph
    v = g.vertex(v)
    norms = rg.norms
    n = int(norms[v])
    if n < 0:
        raise GraphError(f"vertex {g.key(v)} is not connected to the root")
    if n == 0:
        raise GraphError("the root has no end-cone")
    band = norms >= n
    if depth is not None:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        band &= norms <= n + depth
    comp = distances(g, v, band)
    inside = comp >= 0
    chosen = np.flatnonzero(inside)
    outer = []
    if depth is not None:
        outer = _boundary(g, inside, chosen[norms[chosen] == n + depth])
    sub = induced_subgraph(g, chosen, truncate=outer)
    local = {o: i for i, o in enumerate(sub.origin)}
    frontier = frozenset(local[o] for o in chosen if norms[o] == n)
    trusted = None if rg.radius is None else rg.radius - n
    return EndCone(
        graph=sub,
        anchor=local[v],
        frontier=frontier,
        base_norm=n,
        depth=depth,
        trusted_depth=trusted,
        norms=tuple(int(norms[o]) for o in sub.origin),
    )


def components(g: InverseGraph, mask: np.ndarray) -> np.ndarray:
    """Component label per vertex of the subgraph induced by ``mask`` (``-1`` outside)."""
    mask = np.asarray(mask, dtype=bool)
    idx = np.flatnonzero(mask)
    local = np.full(len(g), -1, dtype=np.int64)
    local[idx] = np.arange(len(idx))
    src, _, dst = (np.array(x, dtype=np.int64) for x in zip(*g.edges)) if g.edges else (np.zeros(0, np.int64),) * 3
    keep = mask[src] & mask[dst] if len(src) else np.zeros(0, dtype=bool)
    adj = coo_matrix(
        (np.ones(int(keep.sum()), dtype=np.int8), (local[src[keep]], local[dst[keep]])),
        shape=(len(idx), len(idx)),
    )
    _, lab = connected_components(adj, directed=False)
    out = np.full(len(g), -1, dtype=np.int64)
    out[idx] = lab
    return out


def frontiers(rg: RootedGraph, n: int) -> list[frozenset]:
    """Frontier sets of all end-cones at norm ``n`` (ids in the ball)."""
    norms = rg.norms
    lab = components(rg.graph, norms >= n)
    groups: dict[int, list[int]] = {}
    for v in np.flatnonzero(norms == n):
        groups.setdefault(int(lab[v]), []).append(int(v))
    return [frozenset(vs) for _, vs in sorted(groups.items())]


def cone_vertices(rg: RootedGraph, v: Vertex, radius: Optional[int] = None) -> np.ndarray:
    """Ids of ``{x : |x| = |v| + d(v, x)}``, optionally with ``d(v, x) <= radius``.

    Such ``x`` are exactly those reached from ``v`` by norm-increasing steps.
    """
    g = rg.graph
    v = g.vertex(v)
    norms = rg.norms
    table = g.table
    limit = None if radius is None else int(norms[v]) + radius
    seen = np.zeros(len(g), dtype=bool)
    seen[v] = True
    layer = [v]
    while layer:
        nxt = []
        for u in layer:
            nu = norms[u] + 1
            if limit is not None and nu > limit:
                continue
            for w in table[u]:
                if w >= 0 and not seen[w] and norms[w] == nu:
                    seen[w] = True
                    nxt.append(int(w))
        layer = nxt
    return np.flatnonzero(seen)


def cone(rg: RootedGraph, v: Vertex, radius: Optional[int] = None) -> InverseGraph:
    """Induced subgraph on the cone of ``v``; exact inside the trusted ball."""
    g = rg.graph
    chosen = cone_vertices(rg, v, radius)
    inside = np.zeros(len(g), dtype=bool)
    inside[chosen] = True
    outer = []
    if radius is not None:
        top = rg.norm(v) + radius
        outer = _boundary(g, inside, [x for x in chosen if rg.norms[x] == top])
    return induced_subgraph(g, chosen, truncate=outer)


def geodesic_words(rg: RootedGraph, max_len: int) -> set[Word]:
    """Labels of geodesics from the root of length at most ``max_len``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if not rg.trusts(max_len):
        raise TruncationError(
            f"ball is trusted to radius {rg.radius}, geodesics up to {max_len} requested"
        )
    table = rg.graph.table
    norms = rg.norms
    out: set[Word] = {()}
    layer: list[tuple[int, Word]] = [(rg.root, ())]
    for step in range(1, max_len + 1):
        nxt = []
        for u, w in layer:
            for c, x in enumerate(table[u]):
                if x >= 0 and norms[x] == step:
                    word = w + (c,)
                    out.add(word)
                    nxt.append((int(x), word))
        layer = nxt
    return out
