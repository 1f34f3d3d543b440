"""End-cone classification and tree-likeness verifiers.

End-cones of a ball are compared at a bounded relative depth, so a census
is a lower bound on the number of cone types of the infinite graph.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from . import kernels
from .errors import FormatError, GraphError, TruncationError
from .graph import InverseGraph, RootedGraph, Vertex, Walk, relabel
from .metric import EndCone, cone_vertices, distances, end_cone, frontiers, set_diameter
from .morphisms import find_morphism


# -- end-isomorphism ------------------------------------------------------
def _frontier_iso(c1: EndCone, c2: EndCone, g1: InverseGraph) -> bool:
    if len(c1.frontier) != len(c2.frontier) or len(g1) != len(c2.graph):
        return False
    if g1.n_edges != c2.graph.n_edges:
        return False
    anchor = min(c1.frontier)
    src = RootedGraph(g1, anchor)
    for f in sorted(c2.frontier):
        m = find_morphism(src, RootedGraph(c2.graph, f))
        if m is None or not m.is_isomorphism():
            continue
        if all(m.vertex_map[x] in c2.frontier for x in c1.frontier):
            return True
    return False


def end_isomorphic(c1: EndCone, c2: EndCone, relabel_letters: bool = False) -> bool:
    """Label-preserving isomorphism carrying frontier onto frontier.

    One frontier vertex of ``c1`` is anchored to each frontier vertex of
    ``c2`` in turn; propagation decides each anchoring. With
    ``relabel_letters`` the labels may also be permuted compatibly with
    inversion. The answer concerns the cones as clipped; see
    :attr:`EndCone.exact`.
    """
    if c1.graph.alphabet != c2.graph.alphabet:
        return False
    if not relabel_letters:
        return _frontier_iso(c1, c2, c1.graph)
    A = c1.graph.alphabet
    for perm in A.involutive_permutations():
        g1 = relabel(c1.graph, A, {c: perm[c] for c in range(0, A.size, 2)})
        if _frontier_iso(c1, c2, g1):
            return True
    return False


def cone_code(c: EndCone, relabel_letters: bool = False) -> tuple:
    """Lexicographically least adjacency code over frontier anchorings."""
    g = c.graph
    n = len(g)
    allowed = np.ones(n, dtype=np.uint8)
    flags = np.zeros(n, dtype=np.uint8)
    for f in c.frontier:
        flags[f] = 1
    A = g.alphabet
    orders = A.involutive_permutations() if relabel_letters else [tuple(A.codes)]
    best = None
    for order in orders:
        order_arr = np.asarray(order, dtype=np.int32)
        for f in c.frontier:
            code = kernels.canonical_code(g.ktable, f, allowed, flags, order_arr)
            if best is None or code < best:
                best = code
    return best


def cone_key(c: EndCone, relabel_letters: bool = False) -> str:
    """Short stable digest of :func:`cone_code`."""
    code = cone_code(c, relabel_letters)
    data = np.asarray(code, dtype=np.int64).tobytes()
    return hashlib.sha1(data).hexdigest()[:12]


@dataclass
class Census:
    max_norm: int
    depth: int
    relabel: bool
    rows: list  # (norm, vertex key, class key)
    per_norm: dict  # norm -> number of classes among its vertices
    cumulative: dict  # norm -> distinct classes at norms <= norm
    representatives: dict  # class key -> vertex key

    def to_tsv(self, header: bool = True) -> str:
        lines = ["norm\tvertex\tclass"] if header else []
        lines += [f"{n}\t{v}\t{k}" for n, v, k in self.rows]
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        lines = ["norm\tclasses\tcumulative"]
        for n in sorted(self.per_norm):
            lines.append(f"{n}\t{self.per_norm[n]}\t{self.cumulative[n]}")
        return "\n".join(lines) + "\n"


def _key_job(args):
    cone, relabel_letters = args
    return cone_key(cone, relabel_letters)


def end_cone_census(
    rg: RootedGraph,
    max_norm: int,
    depth: int,
    relabel_letters: bool = False,
    jobs: int = 1,
) -> Census:
    """Classify the end-cones at norms ``1..max_norm`` clipped at relative ``depth``.

    Vertices of equal norm in one band component share a cone, so each
    component is classified once.
    """
    if max_norm < 1 or depth < 0:
        raise ValueError("need max_norm >= 1 and depth >= 0")
    if not rg.trusts(max_norm + depth):
        raise TruncationError(
            f"ball is trusted to radius {rg.radius}; the census needs {max_norm + depth}"
        )
    g = rg.graph
    norms = rg.norms
    cones: list[EndCone] = []
    owner: dict[int, int] = {}
    for n in range(1, max_norm + 1):
        for v in np.flatnonzero(norms == n):
            v = int(v)
            if v in owner:
                continue
            c = end_cone(rg, v, depth)
            idx = len(cones)
            cones.append(c)
            for f in c.frontier:
                owner[c.graph.origin[f]] = idx
    if jobs > 1 and len(cones) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            keys = list(ex.map(_key_job, [(c, relabel_letters) for c in cones], chunksize=16))
    else:
        keys = [cone_key(c, relabel_letters) for c in cones]
    rows = []
    per_norm: dict[int, set] = defaultdict(set)
    reps: dict[str, str] = {}
    for n in range(1, max_norm + 1):
        for v in np.flatnonzero(norms == n):
            v = int(v)
            k = keys[owner[v]]
            rows.append((n, g.key(v), k))
            per_norm[n].add(k)
            reps.setdefault(k, g.key(v))
    cumulative = {}
    seen: set = set()
    for n in range(1, max_norm + 1):
        seen |= per_norm[n]
        cumulative[n] = len(seen)
    return Census(
        max_norm, depth, relabel_letters, rows,
        {n: len(per_norm[n]) for n in range(1, max_norm + 1)}, cumulative, reps,
    )


def frontier_diameters(rg: RootedGraph, max_norm: int) -> dict[int, int]:
    """Largest frontier diameter (distance in the ball) at each norm ``1..max_norm``."""
    out = {}
    for n in range(1, max_norm + 1):
        out[n] = max((set_diameter(rg.graph, f) for f in frontiers(rg, n)), default=0)
    return out


# -- tree decompositions -------------------------------------------------
@dataclass
class TreeDecomposition:
    bags: dict  # node -> frozenset of vertex ids
    tree_edges: list


@dataclass
class StrongTreePartition:
    blocks: list  # list of frozensets of vertex ids


@dataclass
class DecompositionReport:
    valid: bool
    max_diameter: int
    violations: list = field(default_factory=list)
    witness: Optional[int] = None
    quotient: Optional[nx.Graph] = None
    augmented: Optional[TreeDecomposition] = None
    augmented_report: Optional["DecompositionReport"] = None

    def uniform(self, n: int) -> bool:
        return self.valid and self.max_diameter <= n

    def __str__(self):
        head = "valid" if self.valid else "invalid"
        lines = [f"{head}; max diameter {self.max_diameter}"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


def verify_tree_decomposition(g: InverseGraph, td: TreeDecomposition) -> DecompositionReport:
    """Check coverage of vertices and edges, and connectivity of every vertex's bag set."""
    n = len(g)
    for t, bag in td.bags.items():
        for v in bag:
            if not 0 <= v < n:
                raise GraphError(f"bag {t} references unknown vertex {v}")
    violations = []
    witness = None
    T = nx.Graph()
    T.add_nodes_from(td.bags)
    for a, b in td.tree_edges:
        if a not in td.bags or b not in td.bags:
            violations.append(f"tree edge {a}-{b} uses an unknown bag")
            continue
        T.add_edge(a, b)
    if len(T) == 0 or not nx.is_tree(T):
        violations.append("the bag graph is not a tree")
    covered = set().union(*td.bags.values()) if td.bags else set()
    missing = [v for v in range(n) if v not in covered]
    if missing:
        witness = missing[0]
        violations.append(f"T1: vertex {g.key(missing[0])} is in no bag ({len(missing)} uncovered)")
    holders: dict[int, list] = defaultdict(list)
    for t, bag in td.bags.items():
        for v in bag:
            holders[v].append(t)
    for u, c, v in g.positive_edges():
        if u == v:
            continue
        if not set(holders[u]) & set(holders[v]):
            violations.append(f"T2: edge {g.key(u)} -{g.alphabet.token(c)}-> {g.key(v)} is in no bag")
            if witness is None:
                witness = u
            break
    for v in sorted(holders):
        ts = holders[v]
        if len(ts) > 1 and not nx.is_connected(T.subgraph(ts)):
            violations.append(f"T3: bags holding {g.key(v)} are not connected in the tree")
            if witness is None:
                witness = v
            break
    diam = max((set_diameter(g, bag) for bag in td.bags.values()), default=0)
    return DecompositionReport(not violations, diam, violations, witness)


def augment_partition(g: InverseGraph, p: StrongTreePartition) -> TreeDecomposition:
    """Bags ``S'_t``: each block plus the targets of edges leaving it."""
    rows = g.rows
    bags = {}
    block_of = {}
    for t, block in enumerate(p.blocks):
        bag = set(block)
        for u in block:
            block_of[u] = t
            bag.update(v for v in rows[u] if v >= 0)
        bags[t] = frozenset(bag)
    edges = set()
    for u, c, v in g.edges:
        a, b = block_of[u], block_of[v]
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return TreeDecomposition(bags, sorted(edges))


def verify_strong_tree_decomposition(
    g: InverseGraph, p: StrongTreePartition, check_augmentation: bool = True
) -> DecompositionReport:
    """The block graph must be a tree; reports the largest block diameter.

    The induced decomposition with augmented bags is verified too, and its
    diameter must not exceed the block diameter plus two.
    """
    n = len(g)
    seen: set[int] = set()
    for i, block in enumerate(p.blocks):
        if not block:
            raise GraphError(f"block {i} is empty")
        for v in block:
            if not 0 <= v < n:
                raise GraphError(f"block {i} references unknown vertex {v}")
            if v in seen:
                raise GraphError(f"vertex {g.key(v)} is in two blocks")
            seen.add(v)
    if len(seen) != n:
        missing = next(v for v in range(n) if v not in seen)
        raise GraphError(f"vertex {g.key(missing)} is in no block")
    block_of = {v: i for i, block in enumerate(p.blocks) for v in block}
    Q = nx.Graph()
    Q.add_nodes_from(range(len(p.blocks)))
    for u, c, v in g.edges:
        if block_of[u] != block_of[v]:
            Q.add_edge(block_of[u], block_of[v])
    violations = []
    if not nx.is_tree(Q):
        violations.append("the block graph is not a tree")
    diam = max(set_diameter(g, block) for block in p.blocks)
    report = DecompositionReport(not violations, diam, violations, quotient=Q)
    if check_augmentation and report.valid:
        td = augment_partition(g, p)
        sub = verify_tree_decomposition(g, td)
        report.augmented = td
        report.augmented_report = sub
        if not sub.valid:
            report.valid = False
            report.violations.append("augmented bags fail: " + "; ".join(sub.violations))
        elif sub.max_diameter > diam + 2:
            report.valid = False
            report.violations.append(
                f"augmented bag diameter {sub.max_diameter} exceeds block diameter {diam} + 2"
            )
    return report


def singleton_partition(g: InverseGraph) -> StrongTreePartition:
    return StrongTreePartition([frozenset([v]) for v in range(len(g))])


# -- separation and thinness --------------------------------------------
def cone_separation_check(rg: RootedGraph, v: Vertex, delta: int) -> bool:
    """Whether the disk ``D_delta(v)`` separates the root from the rest of the cone of ``v``.

    Decided by BFS from the root in the graph with the disk removed.
    """
    g = rg.graph
    v = g.vertex(v)
    dv = distances(g, v)
    if 0 <= dv[rg.root] <= delta:
        raise ValueError(f"the root lies in the disk of radius {delta} around {g.key(v)}")
    if not rg.trusts(rg.norm(v) + delta):
        raise TruncationError(f"the disk of radius {delta} around {g.key(v)} leaves the trusted ball")
    outside = ~((dv >= 0) & (dv <= delta))
    reach = distances(g, rg.root, outside.astype(np.uint8))
    targets = [x for x in cone_vertices(rg, v) if outside[x]]
    return not any(reach[x] >= 0 for x in targets)


def polygon_thin_check(g: InverseGraph, polygon: Sequence[Walk], delta: int) -> bool:
    """Whether each vertex of each side is within ``delta`` of the union of the other sides."""
    if not polygon:
        raise ValueError("empty polygon")
    for i, side in enumerate(polygon):
        d = distances(g, side.start)[side.end]
        if d != len(side):
            raise GraphError(f"side {i} has length {len(side)} but its endpoints are {d} apart")
        nxt = polygon[(i + 1) % len(polygon)]
        if side.end != nxt.start:
            raise GraphError(f"side {i} does not end where side {(i + 1) % len(polygon)} starts")
    if len(polygon) == 1:
        return True
    for i, side in enumerate(polygon):
        others = set()
        for j, s in enumerate(polygon):
            if j != i:
                others.update(s.vertices)
        others_list = sorted(others)
        for x in set(side.vertices):
            dist = distances(g, x)[others_list]
            dist = dist[dist >= 0]
            if not len(dist) or dist.min() > delta:
                return False
    return True


# -- decomposition files ------------------------------------------------
def loads_decomposition(text: str, g: InverseGraph, path=None):
    """``bag t v...`` / ``tree-edge t1 t2`` lines, or ``block v...`` lines."""
    bags: dict[str, frozenset] = {}
    tree_edges = []
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "bag":
                if not rest:
                    raise FormatError("expected: bag NAME VERTEX...", lineno, path)
                if rest[0] in bags:
                    raise FormatError(f"bag {rest[0]} given twice", lineno, path)
                bags[rest[0]] = frozenset(g.vertex(k) for k in rest[1:])
            elif head == "tree-edge":
                if len(rest) != 2:
                    raise FormatError("expected: tree-edge BAG BAG", lineno, path)
                tree_edges.append((rest[0], rest[1]))
            elif head == "block":
                blocks.append(frozenset(g.vertex(k) for k in rest))
            else:
                raise FormatError(f"unknown directive {head!r}", lineno, path)
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from None
    if blocks and (bags or tree_edges):
        raise FormatError("a file holds either bags or blocks, not both", None, path)
    if blocks:
        return StrongTreePartition(blocks)
    if not bags:
        raise FormatError("no bags or blocks", None, path)
    return TreeDecomposition(bags, tree_edges)


def load_decomposition(path, g: InverseGraph):
    with open(path, encoding="utf-8") as fh:
        return loads_decomposition(fh.read(), g, path=path)
