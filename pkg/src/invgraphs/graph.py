"""Inverse graphs, rooted graphs and walks.

An :class:`InverseGraph` stores its raw edge set, so that graphs violating
the invariants can still be represented and reported on by :func:`validate`.
Operations that need determinism go through :attr:`InverseGraph.table`,
which raises :class:`GraphError` on a clash.

Infinite graphs only ever appear as finite balls. Vertices whose star may be
incomplete are flagged *truncated*; for a rooted ball the smallest norm of a
truncated vertex is its trusted radius.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .alphabet import InvolutiveAlphabet, Word, WordLike, free_reduce
from .errors import FormatError, GraphError, TruncationError

Vertex = Union[int, str]


class InverseGraph:
    """Finite edge-labelled digraph over an involutive alphabet.

    Vertices are ``0..n-1``, each with a string key. ``edges`` holds every
    oriented edge ``(u, code, v)``, inverse edges included.
    """

    def __init__(
        self,
        alphabet: InvolutiveAlphabet,
        keys: Sequence[str],
        edges: Iterable[tuple[int, int, int]],
        truncated: Iterable[int] = (),
        origin: Optional[Sequence[int]] = None,
    ):
        self.alphabet = alphabet
        self.keys = tuple(str(k) for k in keys)
        self.edges = tuple(sorted(set((int(u), int(c), int(v)) for u, c, v in edges)))
        self.truncated = frozenset(int(t) for t in truncated)
        self.origin = tuple(origin) if origin is not None else None
        index = {}
        for i, k in enumerate(self.keys):
            if k in index:
                raise GraphError(f"duplicate vertex key {k!r}")
            index[k] = i
        self._index = index

    # -- vertices --------------------------------------------------------
    def __len__(self):
        return len(self.keys)

    @property
    def n_vertices(self) -> int:
        return len(self.keys)

    def vertex(self, v: Vertex) -> int:
        """Vertex id for an id or a key."""
        if isinstance(v, str):
            try:
                return self._index[v]
            except KeyError:
                raise GraphError(f"no vertex with key {v!r}") from None
        v = int(v)
        if not 0 <= v < len(self.keys):
            raise GraphError(f"vertex id {v} out of range")
        return v

    def key(self, v: int) -> str:
        return self.keys[v]

    def has_key(self, key: str) -> bool:
        return key in self._index

    # -- edges -----------------------------------------------------------
    @cached_property
    def table(self) -> np.ndarray:
        """``(n, |Ã|)`` int32 array of targets, ``-1`` where there is no edge."""
        t = np.full((len(self.keys), self.alphabet.size), -1, dtype=np.int32)
        for u, c, v in self.edges:
            if t[u, c] >= 0 and t[u, c] != v:
                raise GraphError(
                    f"not deterministic: {self.keys[u]} has two {self.alphabet.token(c)}-edges"
                )
            t[u, c] = v
        t.setflags(write=False)
        return t

    @cached_property
    def ktable(self):
        """The table in the active kernel backend's native form."""
        return kernels.prepare(self.table)

    @cached_property
    def rows(self) -> list[list[int]]:
        """The table as nested lists, for Python-level loops."""
        return self.table.tolist()

    def target(self, u: int, code: int) -> Optional[int]:
        v = int(self.table[u, code])
        return None if v < 0 else v

    def star(self, u: int) -> list[tuple[int, int]]:
        """``(code, target)`` for every edge leaving ``u``."""
        row = self.table[u]
        return [(c, int(v)) for c, v in enumerate(row) if v >= 0]

    def degree(self, u: int) -> int:
        return int(np.count_nonzero(self.table[u] >= 0))

    def positive_edges(self) -> list[tuple[int, int, int]]:
        return [e for e in self.edges if e[1] & 1 == 0]

    @property
    def n_edges(self) -> int:
        """Number of edge pairs ``{e, e^-1}``."""
        return len(self.edges) // 2

    def is_truncated(self, v: int) -> bool:
        return v in self.truncated

    def __repr__(self):
        return (
            f"InverseGraph(|V|={len(self.keys)}, |E|={len(self.edges)}, "
            f"alphabet={' '.join(self.alphabet.letters)}, truncated={len(self.truncated)})"
        )


class GraphBuilder:
    """Incremental construction by positive edges; inverses are implied."""

    def __init__(self, alphabet: InvolutiveAlphabet, strict: bool = True):
        self.alphabet = alphabet
        self.strict = strict
        self.keys: list[str] = []
        self.index: dict[str, int] = {}
        self.edges: set[tuple[int, int, int]] = set()
        self.out: dict[tuple[int, int], int] = {}
        self.truncated: set[int] = set()

    def vertex(self, key) -> int:
        key = str(key)
        v = self.index.get(key)
        if v is None:
            v = len(self.keys)
            self.keys.append(key)
            self.index[key] = v
        return v

    def add_edge(self, u, letter, v, lineno: Optional[int] = None) -> None:
        """Add ``u --letter--> v`` and its inverse. ``u``/``v`` are keys."""
        code = self.alphabet.code(letter) if isinstance(letter, str) else letter
        self.add_edge_ids(self.vertex(u), code, self.vertex(v), lineno)

    def add_edge_ids(self, u: int, code: int, v: int, lineno: Optional[int] = None) -> None:
        for a, c, b in ((u, code, v), (v, code ^ 1, u)):
            old = self.out.get((a, c))
            if old is not None and old != b:
                if self.strict:
                    raise FormatError(
                        f"determinism violated: {self.keys[a]} already has a "
                        f"{self.alphabet.token(c)}-edge to {self.keys[old]}",
                        lineno,
                    )
            else:
                self.out[(a, c)] = b
            self.edges.add((a, c, b))

    def truncate(self, key) -> None:
        self.truncated.add(self.vertex(key))

    def build(self) -> InverseGraph:
        return InverseGraph(self.alphabet, self.keys, self.edges, self.truncated)


@dataclass(frozen=True)
class Walk:
    """Consecutive edges given by visited vertices and edge labels."""

    vertices: tuple[int, ...]
    labels: Word = ()

    def __post_init__(self):
        if len(self.vertices) != len(self.labels) + 1:
            raise ValueError("a walk visits one more vertex than it has edges")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self):
        return len(self.labels)

    @property
    def is_circuit(self) -> bool:
        return self.start == self.end

    def edges(self):
        return list(zip(self.vertices, self.labels, self.vertices[1:]))


@dataclass(frozen=True)
class RootedGraph:
    """An inverse graph with a distinguished root; accepts ``L(Γ, root)``."""

    graph: InverseGraph
    root: int = 0

    def __post_init__(self):
        object.__setattr__(self, "root", self.graph.vertex(self.root))

    @property
    def alphabet(self) -> InvolutiveAlphabet:
        return self.graph.alphabet

    @cached_property
    def norms(self) -> np.ndarray:
        """Distance from the root for every vertex (``-1`` if unreachable)."""
        return kernels.bfs(self.graph.ktable, self.root)

    def norm(self, v: Vertex) -> int:
        return int(self.norms[self.graph.vertex(v)])

    @cached_property
    def radius(self) -> Optional[int]:
        """Trusted radius: every vertex of smaller norm has its complete star.

        ``None`` when nothing is truncated (the graph is complete as given).
        """
        if not self.graph.truncated:
            return None
        return int(min(self.norms[t] for t in self.graph.truncated))

    def trusts(self, length: int) -> bool:
        """Whether walks of ``length`` steps from the root are fully realized."""
        return self.radius is None or length <= self.radius

    def __len__(self):
        return len(self.graph)

    def __repr__(self):
        return f"RootedGraph({self.graph!r}, root={self.graph.key(self.root)!r})"


# -- validation ----------------------------------------------------------
@dataclass
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    subject: str = "inverse graph"

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def add(self, kind: str, detail: str) -> None:
        self.violations.append(Violation(kind, detail))

    def __str__(self):
        if self.ok:
            return f"valid {self.subject}"
        return "\n".join(str(v) for v in self.violations)


def validate(g: InverseGraph) -> ValidationReport:
    """Check involution closure, determinism and connectivity.

    Self-inverse edges cannot occur because a letter code is never equal to
    its inverse; malformed letter codes are reported under ``unknown-letter``.
    """
    report = ValidationReport()
    n = len(g.keys)
    size = g.alphabet.size
    edge_set = set(g.edges)
    out = defaultdict(set)
    adj = defaultdict(set)
    for u, c, v in g.edges:
        if not (0 <= u < n and 0 <= v < n):
            report.add("vertex-range", f"edge ({u}, {c}, {v}) uses an unknown vertex")
            continue
        if not 0 <= c < size:
            report.add("unknown-letter", f"edge {g.keys[u]} -{c}-> {g.keys[v]} has a code outside the alphabet")
            continue
        if (v, c ^ 1, u) not in edge_set:
            report.add(
                "involution",
                f"edge {g.keys[u]} -{g.alphabet.token(c)}-> {g.keys[v]} has no inverse edge",
            )
        out[(u, c)].add(v)
        adj[u].add(v)
        adj[v].add(u)
    for (u, c), targets in sorted(out.items()):
        if len(targets) > 1:
            names = ", ".join(g.keys[t] for t in sorted(targets))
            report.add("determinism", f"{g.keys[u]} has {g.alphabet.token(c)}-edges to {names}")
    for t in sorted(g.truncated):
        if not 0 <= t < n:
            report.add("vertex-range", f"truncation mark on unknown vertex {t}")
    if n == 0:
        report.add("disconnected", "graph has no vertices")
    else:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != n:
            missing = [g.keys[i] for i in range(n) if i not in seen]
            shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
            report.add("disconnected", f"{len(missing)} vertices unreachable from {g.keys[0]}: {shown}")
    return report


# -- walks ---------------------------------------------------------------
def _word(g: InverseGraph, w: WordLike) -> Word:
    return g.alphabet.parse(w)


def trace(g: InverseGraph, start: Vertex, w: WordLike) -> Optional[int]:
    """End of the unique walk from ``start`` labelled ``w``, or ``None``."""
    v = kernels.trace(g.ktable, g.vertex(start), _word(g, w))
    return None if v < 0 else v


def trace_walk(g: InverseGraph, start: Vertex, w: WordLike) -> Optional[Walk]:
    word = _word(g, w)
    v = g.vertex(start)
    seq = [v]
    table = g.table
    for c in word:
        v = int(table[v, c])
        if v < 0:
            return None
        seq.append(v)
    return Walk(tuple(seq), word)


def trace_status(g: InverseGraph, start: Vertex, w: WordLike) -> tuple[Optional[int], bool]:
    """``(end, uncertain)``: ``uncertain`` when the walk got stuck at a truncated vertex."""
    word = _word(g, w)
    v = g.vertex(start)
    table = g.table
    for c in word:
        nxt = int(table[v, c])
        if nxt < 0:
            return None, v in g.truncated
        v = nxt
    return v, False


def accepts(rg: RootedGraph, w: WordLike) -> bool:
    """Whether ``w`` labels a circuit at the root."""
    return trace(rg.graph, rg.root, w) == rg.root


def accepts_strict(rg: RootedGraph, w: WordLike) -> bool:
    """Like :func:`accepts` but raises when a truncated vertex blocks the walk."""
    end, uncertain = trace_status(rg.graph, rg.root, w)
    if uncertain:
        raise TruncationError(f"walk labelled {rg.alphabet.format(_word(rg.graph, w))!r} leaves the ball")
    return end == rg.root


def is_dyck_at(g: InverseGraph, v: Vertex, w: WordLike) -> bool:
    """Membership of ``w`` in the Dyck circuits at ``v``: reduces to 1 and traces."""
    word = _word(g, w)
    return not free_reduce(word) and trace(g, v, word) is not None


# -- subgraphs -----------------------------------------------------------
def induced_subgraph(
    g: InverseGraph, vertices: Iterable[int], truncate: Iterable[int] = ()
) -> InverseGraph:
    """Induced subgraph; keys and truncation marks carry over, ``origin`` maps back."""
    chosen = sorted(set(int(v) for v in vertices))
    new = {v: i for i, v in enumerate(chosen)}
    edges = [(new[u], c, new[v]) for u, c, v in g.edges if u in new and v in new]
    marks = {new[t] for t in g.truncated if t in new}
    marks |= {new[t] for t in truncate if t in new}
    return InverseGraph(g.alphabet, [g.keys[v] for v in chosen], edges, marks, origin=chosen)


def relabel(g: InverseGraph, alphabet: InvolutiveAlphabet, mapping: dict[int, int]) -> InverseGraph:
    """Rename positive letters: ``mapping[old_positive_code] = new_code``."""
    full = {}
    for old, new in mapping.items():
        full[old] = new
        full[old ^ 1] = new ^ 1
    edges = [(u, full[c], v) for u, c, v in g.edges]
    return InverseGraph(alphabet, g.keys, edges, g.truncated, g.origin)


# -- text format ---------------------------------------------------------
def loads(text: str, strict: bool = True, path=None) -> RootedGraph:
    """Parse the line-based graph format.

    ``alphabet a b``, ``vertex v``, ``edge u a v`` (inverse implied),
    ``root v``, ``truncated v w ...``; ``#`` starts a comment. With
    ``strict`` the graph must be a valid inverse graph.
    """
    alphabet = None
    builder = None
    root = None
    pending_vertices: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "alphabet":
                if alphabet is not None:
                    raise FormatError("alphabet given twice", lineno, path)
                alphabet = InvolutiveAlphabet(rest)
                builder = GraphBuilder(alphabet, strict=strict)
                for key, _ in pending_vertices:
                    builder.vertex(key)
                continue
            if head == "vertex":
                if not rest:
                    raise FormatError("vertex needs a name", lineno, path)
                for key in rest:
                    if builder is None:
                        pending_vertices.append((key, lineno))
                    else:
                        builder.vertex(key)
                continue
            if builder is None:
                raise FormatError(f"{head!r} before the alphabet line", lineno, path)
            if head == "edge":
                if len(rest) != 3:
                    raise FormatError("expected: edge SOURCE LETTER TARGET", lineno, path)
                builder.add_edge(rest[0], rest[1], rest[2], lineno)
            elif head == "root":
                if len(rest) != 1:
                    raise FormatError("expected: root VERTEX", lineno, path)
                root = rest[0]
                builder.vertex(root)
            elif head == "truncated":
                for key in rest:
                    builder.truncate(key)
            else:
                raise FormatError(f"unknown directive {head!r}", lineno, path)
        except FormatError as exc:
            raise FormatError(exc.message, exc.lineno or lineno, path) from None
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from None
    if builder is None:
        raise FormatError("missing alphabet line", None, path)
    if not builder.keys:
        raise FormatError("graph has no vertices", None, path)
    g = builder.build()
    if strict:
        report = validate(g)
        if not report.ok:
            raise FormatError(str(report), None, path)
    return RootedGraph(g, root if root is not None else 0)


def load(path, strict: bool = True) -> RootedGraph:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), strict=strict, path=path)


def dumps(g: Union[InverseGraph, RootedGraph]) -> str:
    """Serialize to the text format (positive edges only)."""
    root = None
    if isinstance(g, RootedGraph):
        root = g.root
        g = g.graph
    lines = ["alphabet " + " ".join(g.alphabet.letters)]
    # listing every vertex keeps ids stable across a round trip
    for key in g.keys:
        lines.append(f"vertex {key}")
    for u, c, v in g.positive_edges():
        lines.append(f"edge {g.keys[u]} {g.alphabet.token(c)} {g.keys[v]}")
    if root is not None:
        lines.append(f"root {g.keys[root]}")
    if g.truncated:
        lines.append("truncated " + " ".join(g.keys[t] for t in sorted(g.truncated)))
    return "\n".join(lines) + "\n"


def to_dot(g: Union[InverseGraph, RootedGraph], name: str = "G") -> str:
    """DOT rendering with one arrow per edge pair (positive letters)."""
    root = None
    if isinstance(g, RootedGraph):
        root = g.root
        g = g.graph
    out = [f"digraph {name} {{", "  rankdir=LR;"]
    for v, key in enumerate(g.keys):
        attrs = [f'label="{key}"']
        if v == root:
            attrs.append("shape=doublecircle")
        if v in g.truncated:
            attrs.append("style=dashed")
        out.append(f"  n{v} [{', '.join(attrs)}];")
    for u, c, v in g.positive_edges():
        out.append(f'  n{u} -> n{v} [label="{g.alphabet.token(c)}"];')
    out.append("}")
    return "\n".join(out) + "\n"
