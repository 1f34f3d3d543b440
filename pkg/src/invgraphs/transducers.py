"""Inverse transducers, their product with inverse graphs, and group assemblies.

A group assembly describes a group ``G`` through a finite-index subgroup
``H`` generated by ``X``: a transversal ``T`` (containing ``1``), a table
``t·y = h·t'`` with ``h`` a word over ``X``, and homomorphisms ``π_i`` from
``X`` to free groups. Its word problem is the intersection over ``i`` of the
preimages of the free-group word problems under the coset transducer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .alphabet import InvolutiveAlphabet, Word, WordLike, free_reduce, inverse_word
from .errors import FormatError, GraphError, MachineError, TruncationError
from .graph import InverseGraph, RootedGraph, ValidationReport, accepts, trace_status


@dataclass(frozen=True)
class InverseTransducer:
    """Deterministic letter-to-word machine with paired reverse edges.

    ``edges`` maps ``(state, input code)`` to ``(output word, target)``.
    """

    inputs: InvolutiveAlphabet
    outputs: InvolutiveAlphabet
    states: tuple
    root: str
    edges: dict

    def __post_init__(self):
        if self.root not in self.states:
            raise MachineError(f"root {self.root!r} is not a state")
        report = self.validate()
        if not report.ok:
            raise MachineError(str(report))

    def validate(self) -> ValidationReport:
        report = ValidationReport(subject="inverse transducer")
        states = set(self.states)
        for (p, y), (u, q) in sorted(self.edges.items()):
            if p not in states or q not in states:
                report.add("state", f"edge ({p}, {y}) uses an unknown state")
                continue
            self.inputs.check_code(y)
            for c in u:
                self.outputs.check_code(c)
            back = self.edges.get((q, y ^ 1))
            if back != (inverse_word(u), p):
                report.add(
                    "involution",
                    f"edge {p} -{self.inputs.token(y)}|{self.outputs.format(u, '1')}-> {q} has no matching reverse edge",
                )
        return report

    @classmethod
    def from_edges(cls, inputs, outputs, states, root, edges: Iterable[tuple]) -> "InverseTransducer":
        """Build from ``(p, y, u, q)`` edges; reverse edges are added."""
        table: dict = {}

        def put(key, val):
            old = table.get(key)
            if old is not None and old != val:
                raise MachineError(f"conflicting edges at state {key[0]} on {inputs.token(key[1])}")
            table[key] = val

        for p, y, u, q in edges:
            y = inputs.code(y) if isinstance(y, str) else y
            u = outputs.parse(u)
            put((p, y), (u, q))
            put((q, y ^ 1), (inverse_word(u), p))
        return cls(inputs, outputs, tuple(states), root, table)

    def run(self, s: WordLike) -> Optional[tuple[Word, str]]:
        """``(output, end state)`` of the path labelled ``s`` from the root."""
        word = self.inputs.parse(s)
        p = self.root
        out: list[int] = []
        for y in word:
            step = self.edges.get((p, y))
            if step is None:
                return None
            u, p = step
            out.extend(u)
        return tuple(out), p


def transduce(a: InverseTransducer, s: WordLike) -> Optional[Word]:
    """Output along ``s`` when the path is a circuit at the root, else ``None``."""
    res = a.run(s)
    if res is None or res[1] != a.root:
        return None
    return res[0]


def identity_transducer(alphabet: InvolutiveAlphabet) -> InverseTransducer:
    edges = [("p0", c, (c,), "p0") for c in range(0, alphabet.size, 2)]
    return InverseTransducer.from_edges(alphabet, alphabet, ("p0",), "p0", edges)


def product(a: InverseTransducer, rg: RootedGraph) -> RootedGraph:
    """Component of ``(root, x0)`` in the product of ``a`` with ``rg``.

    ``(p, q) -y-> (p', q')`` when ``p -y|u-> p'`` and ``u`` leads from ``q``
    to ``q'``. A product vertex is flagged truncated when an output walk is
    blocked at a truncated vertex of ``rg``.
    """
    if a.outputs != rg.alphabet:
        raise GraphError("transducer output alphabet differs from the graph alphabet")
    g = rg.graph
    start = (a.root, rg.root)
    index = {start: 0}
    order = [start]
    edges = []
    truncated = set()
    queue = deque([start])
    while queue:
        p, q = node = queue.popleft()
        u_id = index[node]
        for y in a.inputs.codes:
            step = a.edges.get((p, y))
            if step is None:
                continue
            out, p2 = step
            q2, blocked = trace_status(g, q, out)
            if q2 is None:
                if blocked:
                    truncated.add(u_id)
                continue
            nxt = (p2, q2)
            v_id = index.get(nxt)
            if v_id is None:
                v_id = index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            edges.append((u_id, y, v_id))
    keys = [f"{p}@{g.key(q)}" for p, q in order]
    return RootedGraph(InverseGraph(a.inputs, keys, edges, truncated), 0)


# -- group assemblies -----------------------------------------------------
@dataclass(frozen=True)
class GroupAssembly:
    """Coset data for a group that is virtually a subgroup of a product of free groups.

    ``table[(t, y)] = (h, t')`` encodes ``t·y = h·t'``; ``projections[i]``
    maps each positive ``X`` code to a word over ``targets[i]``.
    """

    subgroup: InvolutiveAlphabet  # X
    transversal: tuple
    table: dict
    projections: tuple
    targets: tuple
    radius: Optional[int] = None
    generators: InvolutiveAlphabet = field(init=False)

    def __post_init__(self):
        if not self.transversal or self.transversal[0] != "1":
            raise MachineError("the transversal must list 1 first")
        extra = [t for t in self.transversal[1:]]
        object.__setattr__(self, "generators", InvolutiveAlphabet(list(self.subgroup.letters) + extra))
        if len(self.projections) != len(self.targets):
            raise MachineError("one target alphabet per projection is needed")
        for i, (proj, Z) in enumerate(zip(self.projections, self.targets), 1):
            for x in range(0, self.subgroup.size, 2):
                if x not in proj:
                    raise MachineError(f"projection {i} does not map {self.subgroup.token(x)}")
                for c in proj[x]:
                    Z.check_code(c)

    def validate(self) -> ValidationReport:
        report = ValidationReport(subject="group assembly")
        Y = self.generators
        T = set(self.transversal)
        for t in self.transversal:
            for y in Y.codes:
                row = self.table.get((t, y))
                if row is None:
                    report.add("totality", f"no row for {t}·{Y.token(y)}")
                    continue
                h, t2 = row
                if t2 not in T:
                    report.add("transversal", f"row {t}·{Y.token(y)} ends at unknown {t2!r}")
                    continue
                back = self.table.get((t2, y ^ 1))
                if back is None or back[1] != t or free_reduce(back[0] + h) != ():
                    report.add("involution", f"row {t}·{Y.token(y)} has no matching reverse row {t2}·{Y.token(y ^ 1)}")
        return report

    def project(self, i: int, word: Sequence[int]) -> Word:
        """Reduced image of an ``X`` word under ``π_i``."""
        proj = self.projections[i]
        out: list[int] = []
        for c in word:
            img = proj[c & ~1]
            out.extend(inverse_word(img) if c & 1 else img)
        return free_reduce(out)


def build_group_transducer(asm: GroupAssembly) -> InverseTransducer:
    """States are the transversal, edges ``t -y|h-> t'`` per table row."""
    report = asm.validate()
    if not report.ok:
        raise MachineError(str(report))
    edges = {}
    for (t, y), (h, t2) in asm.table.items():
        edges[(t, y)] = (tuple(h), t2)
    # reverse rows must carry the exact inverse word to be an inverse transducer
    for (t, y), (h, t2) in list(edges.items()):
        back = edges[(t2, y ^ 1)]
        if back[0] != inverse_word(h):
            raise MachineError(
                f"row {t2}·{asm.generators.token(y ^ 1)} must output the inverse of row {t}·{asm.generators.token(y)}"
            )
    return InverseTransducer(asm.generators, asm.subgroup, asm.transversal, "1", edges)


_balls: dict = {}


def _free_ball(Z: InvolutiveAlphabet, radius: int) -> RootedGraph:
    key = (Z.letters, radius)
    ball = _balls.get(key)
    if ball is None:
        from .families import free_group

        ball = _balls[key] = free_group(Z.rank, radius, Z.letters)
    return ball


def _wp_tables(asm: GroupAssembly):
    """Transducer and per-projection image of every signed ``X`` code, built once per assembly."""
    cached = asm.__dict__.get("_wp_tables")
    if cached is None:
        signed = []
        for proj in asm.projections:
            table = {}
            for x, img in proj.items():
                table[x] = tuple(img)
                table[x ^ 1] = inverse_word(img)
            signed.append(table)
        cached = (build_group_transducer(asm), tuple(signed))
        # the table is treated as immutable once the assembly is built
        object.__setattr__(asm, "_wp_tables", cached)
    return cached


def wp_member(asm: GroupAssembly, w: WordLike, transducer: Optional[InverseTransducer] = None) -> bool:
    """Word-problem membership as an intersection of free-group word problems.

    Each ``π_i`` image is freely reduced and traced in a ball of the Cayley
    graph of the free group on ``targets[i]``; with ``asm.radius`` unset the
    ball is sized to the image.
    """
    cached, signed = _wp_tables(asm)
    out = transduce(transducer if transducer is not None else cached, w)
    if out is None:
        return False
    for i, Z in enumerate(asm.targets):
        table = signed[i]
        image: list[int] = []
        for c in out:
            image.extend(table[c])
        image = free_reduce(image)
        radius = asm.radius if asm.radius is not None else max(1, len(image))
        if len(image) > radius:
            raise TruncationError(
                f"image of length {len(image)} under projection {i + 1} overflows the radius-{radius} ball"
            )
        if not accepts(_free_ball(Z, radius), image):
            return False
    return True


def wp_sweep(asm: GroupAssembly, max_len: int) -> Iterator[tuple[Word, bool]]:
    """``(w, wp_member(asm, w))`` for every word with ``|w| <= max_len``.

    Walks the tree of words depth-first and carries, per prefix, the
    transducer state and the position of each projected image in its free
    group ball, so shared prefixes are processed once. Balls are sized to
    the longest possible image, so ``asm.radius`` plays no role here.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    a, signed = _wp_tables(asm)
    span = max((len(u) for u, _ in a.edges.values()), default=0)
    rows, roots, images = [], [], []
    for Z, table in zip(asm.targets, signed):
        img = max((len(v) for v in table.values()), default=0)
        ball = _free_ball(Z, max(1, max_len * span * img))
        rows.append(ball.graph.rows)
        roots.append(ball.root)
        images.append(table)
    k = len(rows)
    codes = tuple(a.inputs.codes)
    edges = a.edges
    start = (a.root, tuple(roots))
    # (word, state, ball positions)
    stack = [((), start[0], start[1])]
    while stack:
        word, p, pos = stack.pop()
        yield word, p == a.root and pos == start[1]
        if len(word) == max_len:
            continue
        for y in reversed(codes):
            step = edges.get((p, y))
            if step is None:
                continue
            out, q = step
            new = list(pos)
            for i in range(k):
                row, table, v = rows[i], images[i], new[i]
                for c in out:
                    for z in table[c]:
                        v = row[v][z]
                new[i] = v
            stack.append((word + (y,), q, tuple(new)))


def _assembly_from_rows(X, transversal, rows, projections, targets, radius=None) -> GroupAssembly:
    Y = InvolutiveAlphabet(list(X.letters) + [t for t in transversal if t != "1"])
    table = {(t, Y.code(y)): (X.parse(h), t2) for t, y, h, t2 in rows}
    projs = tuple(
        {X.code(x): Z.parse(img) for x, img in proj.items()} for proj, Z in zip(projections, targets)
    )
    return GroupAssembly(X, tuple(transversal), table, projs, tuple(targets), radius)


def dihedral_assembly(radius: Optional[int] = None) -> GroupAssembly:
    """Infinite dihedral group: ``H = <x>``, ``T = {1, s}``, ``s x s = x^-1``, ``s^2 = 1``."""
    X = InvolutiveAlphabet(["x"])
    rows = [
        ("1", "x", "x", "1"),
        ("1", "x'", "x'", "1"),
        ("1", "s", "", "s"),
        ("1", "s'", "", "s"),
        ("s", "x", "x'", "s"),
        ("s", "x'", "x", "s"),
        ("s", "s", "", "1"),
        ("s", "s'", "", "1"),
    ]
    return _assembly_from_rows(X, ("1", "s"), rows, [{"x": "x"}], [InvolutiveAlphabet(["x"])], radius)


def z2_assembly(radius: Optional[int] = None) -> GroupAssembly:
    """``Z x Z`` inside ``F_1 x F_1``: ``π_1`` kills ``y``, ``π_2`` kills ``x``."""
    X = InvolutiveAlphabet(["x", "y"])
    rows = [("1", tok, tok, "1") for tok in ("x", "x'", "y", "y'")]
    projections = [{"x": "x", "y": ""}, {"x": "", "y": "y"}]
    targets = [InvolutiveAlphabet(["x"]), InvolutiveAlphabet(["y"])]
    return _assembly_from_rows(X, ("1",), rows, projections, targets, radius)


# -- text formats ---------------------------------------------------------
def _word_tokens(tokens: Sequence[str]) -> str:
    return " ".join(t for t in tokens if t not in ("-", "1"))


def loads_assembly(text: str, path=None) -> GroupAssembly:
    """``alphabet x``, ``transversal 1 s``, ``row t y -> h... t'``, ``proj i x -> word``, ``radius R``."""
    X = None
    transversal = None
    rows = []
    proj_lines: dict[int, dict[str, tuple[str, int]]] = {}
    radius = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "alphabet":
                X = InvolutiveAlphabet(rest)
            elif head == "transversal":
                transversal = tuple(rest)
            elif head == "row":
                if len(rest) < 4 or rest[2] != "->":
                    raise FormatError("expected: row T Y -> WORD T'", lineno, path)
                rows.append((rest[0], rest[1], _word_tokens(rest[3:-1]), rest[-1], lineno))
            elif head == "proj":
                if len(rest) < 3 or rest[2] != "->":
                    raise FormatError("expected: proj I X -> WORD", lineno, path)
                i = int(rest[0])
                if i < 1:
                    raise FormatError("projections are numbered from 1", lineno, path)
                proj_lines.setdefault(i, {})[rest[1]] = (_word_tokens(rest[3:]), lineno)
            elif head == "radius":
                radius = int(rest[0])
            else:
                raise FormatError(f"unknown directive {head!r}", lineno, path)
        except FormatError:
            raise
        except (ValueError, IndexError) as exc:
            raise FormatError(str(exc) or "malformed line", lineno, path) from None
    if X is None:
        raise FormatError("missing alphabet line", None, path)
    if transversal is None:
        raise FormatError("missing transversal line", None, path)
    if sorted(proj_lines) != list(range(1, len(proj_lines) + 1)) or not proj_lines:
        raise FormatError("projections must be numbered 1..k", None, path)
    try:
        Y = InvolutiveAlphabet(list(X.letters) + [t for t in transversal if t != "1"])
    except ValueError as exc:
        raise FormatError(str(exc), None, path) from None
    table = {}
    for t, y, h, t2, lineno in rows:
        try:
            key = (t, Y.code(y))
            if key in table:
                raise FormatError(f"second row for {t}·{y}", lineno, path)
            table[key] = (X.parse(h), t2)
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from None
    projections, targets = [], []
    for i in sorted(proj_lines):
        letters: list[str] = []
        for img, _ in proj_lines[i].values():
            for tok in img.split():
                name = tok.rstrip("'")
                if name not in letters:
                    letters.append(name)
        if not letters:
            raise FormatError(f"projection {i} is trivial", None, path)
        Z = InvolutiveAlphabet(letters)
        proj = {}
        for x, (img, lineno) in proj_lines[i].items():
            try:
                proj[X.code(x)] = Z.parse(img)
            except ValueError as exc:
                raise FormatError(str(exc), lineno, path) from None
        projections.append(proj)
        targets.append(Z)
    try:
        return GroupAssembly(X, transversal, table, tuple(projections), tuple(targets), radius)
    except MachineError as exc:
        raise FormatError(str(exc), None, path) from None


def load_assembly(path) -> GroupAssembly:
    with open(path, encoding="utf-8") as fh:
        return loads_assembly(fh.read(), path=path)


def dumps_assembly(asm: GroupAssembly) -> str:
    X, Y = asm.subgroup, asm.generators
    lines = ["alphabet " + " ".join(X.letters), "transversal " + " ".join(asm.transversal)]
    for t in asm.transversal:
        for y in Y.codes:
            if (t, y) in asm.table:
                h, t2 = asm.table[(t, y)]
                lines.append(f"row {t} {Y.token(y)} -> {X.format(h, '-')} {t2}")
    for i, (proj, Z) in enumerate(zip(asm.projections, asm.targets), 1):
        for x in sorted(proj):
            lines.append(f"proj {i} {X.token(x)} -> {Z.format(proj[x], '-')}")
    if asm.radius is not None:
        lines.append(f"radius {asm.radius}")
    return "\n".join(lines) + "\n"


def loads_transducer(text: str, path=None) -> InverseTransducer:
    """``input y``, ``output a``, ``root p0``, ``state p ...``, ``edge p y -> u... p'``.

    Reverse edges are implied.
    """
    Y = Xo = None
    root = None
    states: list[str] = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "input":
                Y = InvolutiveAlphabet(rest)
            elif head == "output":
                Xo = InvolutiveAlphabet(rest)
            elif head == "root":
                root = rest[0]
                if root not in states:
                    states.append(root)
            elif head == "state":
                states.extend(s for s in rest if s not in states)
            elif head == "edge":
                if len(rest) < 4 or rest[2] != "->":
                    raise FormatError("expected: edge P Y -> WORD P'", lineno, path)
                if Y is None or Xo is None:
                    raise FormatError("edge before input/output lines", lineno, path)
                p, y, q = rest[0], rest[1], rest[-1]
                for s in (p, q):
                    if s not in states:
                        states.append(s)
                edges.append((p, Y.code(y), Xo.parse(_word_tokens(rest[3:-1])), q))
            else:
                raise FormatError(f"unknown directive {head!r}", lineno, path)
        except FormatError:
            raise
        except (ValueError, IndexError) as exc:
            raise FormatError(str(exc) or "malformed line", lineno, path) from None
    if Y is None or Xo is None:
        raise FormatError("missing input or output line", None, path)
    if root is None:
        raise FormatError("missing root line", None, path)
    try:
        return InverseTransducer.from_edges(Y, Xo, states, root, edges)
    except MachineError as exc:
        raise FormatError(str(exc), None, path) from None


def load_transducer(path) -> InverseTransducer:
    with open(path, encoding="utf-8") as fh:
        return loads_transducer(fh.read(), path=path)


def dumps_transducer(a: InverseTransducer) -> str:
    lines = [
        "input " + " ".join(a.inputs.letters),
        "output " + " ".join(a.outputs.letters),
        f"root {a.root}",
        "state " + " ".join(a.states),
    ]
    for (p, y), (u, q) in sorted(a.edges.items()):
        if y & 1 == 0:
            lines.append(f"edge {p} {a.inputs.token(y)} -> {a.outputs.format(u, '-')} {q}")
    return "\n".join(lines) + "\n"
