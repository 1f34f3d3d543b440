"""Constructors for the small graph families used throughout the tests and the CLI.

Balls of infinite graphs flag their outermost layer as truncated, so every
downstream operation sees a trusted radius equal to the ball radius.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from math import isqrt
from typing import Optional, Sequence

from .alphabet import InvolutiveAlphabet
from .graph import GraphBuilder, InverseGraph, RootedGraph

FAMILIES = ("free_group", "free_abelian", "cycle", "bouquet", "bicyclic_tree", "dihedral_assembly")


def _letters(rank: int, letters: Optional[Sequence[str]]) -> InvolutiveAlphabet:
    if letters is None:
        if rank > 26:
            raise ValueError("rank above 26 needs explicit letter names")
        letters = string.ascii_lowercase[:rank]
    letters = tuple(letters)
    if len(letters) != rank:
        raise ValueError(f"expected {rank} letters, got {len(letters)}")
    return InvolutiveAlphabet(letters)


def free_group(rank: int, radius: int, letters: Optional[Sequence[str]] = None) -> RootedGraph:
    """Ball of the Cayley graph of ``F_rank``; keys are compact reduced words."""
    if rank < 1:
        raise ValueError("rank must be at least 1")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    A = _letters(rank, letters)
    keys = ["1"]
    edges = []
    layer = [(0, None)]  # (vertex id, last letter code)
    for _ in range(radius):
        nxt = []
        for v, last in layer:
            prefix = "" if v == 0 else keys[v]
            for c in A.codes:
                if last is not None and c == last ^ 1:
                    continue
                w = len(keys)
                keys.append(prefix + A.token(c))
                edges.append((v, c, w))
                edges.append((w, c ^ 1, v))
                nxt.append((w, c))
        layer = nxt
    truncated = [v for v, _ in layer]
    return RootedGraph(InverseGraph(A, keys, edges, truncated), 0)


def _point_key(p) -> str:
    return "(" + ",".join(str(x) for x in p) + ")"


def free_abelian(rank: int, radius: int, letters: Optional[Sequence[str]] = None) -> RootedGraph:
    """L1 ball of the Cayley graph of ``Z^rank``; keys look like ``(2,-1)``."""
    if rank < 1:
        raise ValueError("rank must be at least 1")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    A = _letters(rank, letters)
    points = [()]
    for _ in range(rank):
        points = [p + (x,) for p in points for x in range(-radius, radius + 1)]
    points = [p for p in points if sum(map(abs, p)) <= radius]
    points.sort(key=lambda p: (sum(map(abs, p)), p))
    index = {p: i for i, p in enumerate(points)}
    edges = []
    for p, i in index.items():
        for axis in range(rank):
            q = p[:axis] + (p[axis] + 1,) + p[axis + 1:]
            j = index.get(q)
            if j is not None:
                edges.append((i, 2 * axis, j))
                edges.append((j, 2 * axis + 1, i))
    truncated = [i for p, i in index.items() if sum(map(abs, p)) == radius]
    g = InverseGraph(A, [_point_key(p) for p in points], edges, truncated)
    return RootedGraph(g, 0)


def cycle(modulus: int, letter: str = "a") -> RootedGraph:
    """Cayley graph of ``Z/modulus``; keys ``"0"`` .. ``"n-1"``."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    A = InvolutiveAlphabet([letter])
    b = GraphBuilder(A)
    for i in range(modulus):
        b.vertex(str(i))
    for i in range(modulus):
        b.add_edge_ids(i, 0, (i + 1) % modulus)
    return RootedGraph(b.build(), 0)


def bouquet(letters: Sequence[str] = ("a",)) -> RootedGraph:
    """One vertex ``v`` with a loop per letter."""
    A = InvolutiveAlphabet(letters)
    b = GraphBuilder(A)
    b.vertex("v")
    for c in range(0, A.size, 2):
        b.add_edge_ids(0, c, 0)
    return RootedGraph(b.build(), 0)


def bicyclic_tree(n: int) -> RootedGraph:
    """Tree with a b-ray of length ``n``, an a-leaf at the root and c-leaves at squares.

    Root ``1`` has an a-edge to leaf ``a``. The ray visits ``b``, ``b^2``, ...,
    ``b^n`` and ``b^k`` carries a c-edge to leaf ``b^kc`` whenever ``k`` is a
    positive square. The end of the ray is truncated.
    """
    if n < 0:
        raise ValueError("ray length must be non-negative")
    A = InvolutiveAlphabet("abc")
    b = GraphBuilder(A)

    def ray(k):
        return "1" if k == 0 else ("b" if k == 1 else f"b^{k}")

    b.vertex("1")
    b.add_edge("1", "a", "a")
    for k in range(1, n + 1):
        b.add_edge(ray(k - 1), "b", ray(k))
    for m in range(1, isqrt(n) + 1):
        k = m * m
        b.add_edge(ray(k), "c", ray(k) + "c")
    b.truncate(ray(n))
    return RootedGraph(b.build(), 0)


def dihedral_assembly(radius: Optional[int] = None):
    """The infinite dihedral group over ``x`` (translation) and ``s`` (reflection)."""
    from .transducers import dihedral_assembly as build

    return build(radius)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family {self.name!r}; choose from {', '.join(FAMILIES)}")
        p = self.params
        if "radius" in p and p["radius"] is not None and p["radius"] < 0:
            raise ValueError("radius must be non-negative")
        if "rank" in p and p["rank"] < 1:
            raise ValueError("rank must be at least 1")
        if "modulus" in p and p["modulus"] < 2:
            raise ValueError("modulus must be at least 2")

    @classmethod
    def from_args(cls, name: str, args: Sequence[str]) -> "FamilySpec":
        """Positional CLI arguments, e.g. ``free_group 2 8`` or ``bouquet a b``."""
        args = list(args)
        try:
            if name in ("free_group", "free_abelian"):
                rank, radius = (int(a) for a in args)
                return cls(name, {"rank": rank, "radius": radius})
            if name == "cycle":
                modulus = int(args[0])
                rest = args[1:]
                if len(rest) > 1:
                    raise ValueError
                return cls(name, {"modulus": modulus, "letter": rest[0] if rest else "a"})
            if name == "bouquet":
                return cls(name, {"letters": tuple(args) or ("a",)})
            if name == "bicyclic_tree":
                (n,) = args
                return cls(name, {"n": int(n)})
            if name == "dihedral_assembly":
                if len(args) > 1:
                    raise ValueError
                return cls(name, {"radius": int(args[0]) if args else None})
        except ValueError:
            raise ValueError(f"bad arguments for {name}: {' '.join(args) or '(none)'}") from None
        return cls(name)


def make(spec: FamilySpec):
    """Build the family member described by ``spec``."""
    p = spec.params
    if spec.name == "free_group":
        return free_group(p["rank"], p["radius"], p.get("letters"))
    if spec.name == "free_abelian":
        return free_abelian(p["rank"], p["radius"], p.get("letters"))
    if spec.name == "cycle":
        return cycle(p["modulus"], p.get("letter", "a"))
    if spec.name == "bouquet":
        return bouquet(p.get("letters", ("a",)))
    if spec.name == "bicyclic_tree":
        return bicyclic_tree(p["n"])
    return dihedral_assembly(p.get("radius"))


def free_abelian_vertex(rg: RootedGraph, *coords: int) -> int:
    """Vertex id of a lattice point in a :func:`free_abelian` ball."""
    return rg.graph.vertex(_point_key(coords))

