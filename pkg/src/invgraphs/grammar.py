"""Context-free grammars in Chomsky normal form over an involutive alphabet."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .alphabet import InvolutiveAlphabet, Word, WordLike
from .errors import FormatError, GrammarError
from .graph import Walk

_VAR = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class CnfGrammar:
    """Productions ``X -> Y Z`` (``Y, Z`` not the start) and ``X -> a``.

    ``binary`` maps a variable to its ``(Y, Z)`` pairs, ``terminal`` to its
    letter codes; ``epsilon`` adds ``S -> 1``. Construction validates the
    form and that every variable is useful.
    """

    alphabet: InvolutiveAlphabet
    start: str
    binary: dict
    terminal: dict
    epsilon: bool = False

    def __post_init__(self):
        binary = {x: tuple(sorted(set(map(tuple, rules)))) for x, rules in self.binary.items() if rules}
        terminal = {x: tuple(sorted(set(rules))) for x, rules in self.terminal.items() if rules}
        object.__setattr__(self, "binary", binary)
        object.__setattr__(self, "terminal", terminal)
        self._validate()

    @property
    def variables(self) -> tuple[str, ...]:
        names = {self.start} | set(self.binary) | set(self.terminal)
        for rules in self.binary.values():
            for y, z in rules:
                names.update((y, z))
        return tuple([self.start] + sorted(names - {self.start}))

    def rules(self):
        """All productions as ``(X, rhs)`` with ``rhs`` a pair of names or a code."""
        for x in self.variables:
            for yz in self.binary.get(x, ()):
                yield x, yz
            for c in self.terminal.get(x, ()):
                yield x, c

    def _validate(self) -> None:
        letters = set(self.alphabet._index)
        for x in self.variables:
            if not _VAR.match(x):
                raise GrammarError(f"invalid variable name {x!r}")
            if x in letters:
                raise GrammarError(f"variable {x!r} clashes with a terminal letter")
        for x, rules in self.binary.items():
            for y, z in rules:
                if self.start in (y, z):
                    raise GrammarError(f"start symbol {self.start} on a right-hand side ({x} -> {y} {z})")
        for x, codes in self.terminal.items():
            for c in codes:
                self.alphabet.check_code(c)
        productive = self._productive()
        dead = [x for x in self.variables if x not in productive]
        if self.start in dead and self.epsilon:
            dead.remove(self.start)
        if dead:
            raise GrammarError(f"unproductive variables: {', '.join(dead)}")
        reach = {self.start}
        stack = [self.start]
        while stack:
            x = stack.pop()
            for y, z in self.binary.get(x, ()):
                for v in (y, z):
                    if v not in reach:
                        reach.add(v)
                        stack.append(v)
        unreachable = [x for x in self.variables if x not in reach]
        if unreachable:
            raise GrammarError(f"unreachable variables: {', '.join(unreachable)}")

    def _productive(self) -> set[str]:
        prod = set(self.terminal)
        changed = True
        while changed:
            changed = False
            for x, rules in self.binary.items():
                if x not in prod and any(y in prod and z in prod for y, z in rules):
                    prod.add(x)
                    changed = True
        return prod


@dataclass(frozen=True)
class ParseTree:
    """Derivation of ``w[i:j]`` from ``var``; ``children`` empty for terminal or epsilon."""

    var: str
    i: int
    j: int
    children: tuple = ()
    letter: Optional[int] = None

    def nodes(self):
        yield self
        for ch in self.children:
            yield from ch.nodes()

    def leaves(self) -> Word:
        if self.letter is not None:
            return (self.letter,)
        out: tuple = ()
        for ch in self.children:
            out += ch.leaves()
        return out


def cyk_member(g: CnfGrammar, w: WordLike) -> Optional[ParseTree]:
    """Parse tree for ``w`` from the start symbol, or ``None``."""
    word = g.alphabet.parse(w)
    n = len(word)
    if n == 0:
        return ParseTree(g.start, 0, 0) if g.epsilon else None
    by_letter: dict[int, list[str]] = {}
    for x, codes in g.terminal.items():
        for c in codes:
            by_letter.setdefault(c, []).append(x)
    pairs: list[tuple[str, str, str]] = [(x, y, z) for x, rules in g.binary.items() for y, z in rules]
    # cell[i][l] maps a variable to its split point for word[i:i+l]
    cell = [[None] * (n + 1) for _ in range(n)]
    for i, c in enumerate(word):
        cell[i][1] = {x: None for x in by_letter.get(c, ())}
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            found: dict[str, tuple] = {}
            for k in range(1, length):
                left = cell[i][k]
                right = cell[i + k][length - k]
                if not left or not right:
                    continue
                for x, y, z in pairs:
                    if x not in found and y in left and z in right:
                        found[x] = (k, y, z)
            cell[i][length] = found
    if g.start not in cell[0][n]:
        return None

    def build(x, i, length):
        back = cell[i][length][x]
        if back is None:
            return ParseTree(x, i, i + 1, letter=word[i])
        k, y, z = back
        return ParseTree(x, i, i + length, (build(y, i, k), build(z, i + k, length - k)))

    return build(g.start, 0, n)


def shortest_words(g: CnfGrammar) -> tuple[dict[str, int], int]:
    """Length of a shortest word of every ``L(X)``, and ``K``, their maximum.

    The epsilon rule is ignored: ``K`` is taken over nonempty derivations.
    """
    best = {x: 1 for x in g.terminal}
    changed = True
    while changed:
        changed = False
        for x, rules in g.binary.items():
            for y, z in rules:
                if y in best and z in best:
                    cand = best[y] + best[z]
                    if cand < best.get(x, cand + 1):
                        best[x] = cand
                        changed = True
    missing = [x for x in g.variables if x not in best and not (x == g.start and g.epsilon)]
    if missing:
        raise GrammarError(f"unproductive variables: {', '.join(missing)}")
    return best, max(best.values(), default=0)


@dataclass(frozen=True)
class TriangulationEdge:
    """A variable-labelled edge spanning circuit positions ``i < j``."""

    i: int
    j: int
    label: str
    parent: Optional[int]
    source: int
    target: int


def triangulate_circuit(g: CnfGrammar, tree: Optional[ParseTree], circuit: Walk) -> list[TriangulationEdge]:
    """One variable edge per node of the derivation, parents listed first."""
    if tree is None:
        raise GrammarError("no derivation given")
    if not circuit.is_circuit:
        raise GrammarError("the walk is not a circuit")
    if len(circuit) == 0:
        if tree.children or tree.letter is not None:
            raise GrammarError("derivation does not match the empty circuit")
        return []
    if tree.leaves() != tuple(circuit.labels) or (tree.i, tree.j) != (0, len(circuit)):
        raise GrammarError("derivation does not yield the circuit label")
    out: list[TriangulationEdge] = []
    todo: list[tuple[ParseTree, Optional[int]]] = [(tree, None)]
    while todo:
        node, parent = todo.pop(0)
        idx = len(out)
        out.append(
            TriangulationEdge(
                node.i, node.j, node.var, parent, circuit.vertices[node.i], circuit.vertices[node.j]
            )
        )
        for ch in node.children:
            todo.append((ch, idx))
    return out


def _code_name(A: InvolutiveAlphabet, c: int) -> str:
    name = A.letters[c >> 1]
    return name + "_inv" if c & 1 else name


def dyck_grammar(alphabet: InvolutiveAlphabet, start: str = "S") -> CnfGrammar:
    """Grammar of the words that freely reduce to 1 (with ``S -> 1``).

    ``D`` generates the nonempty ones as products of primes ``c u c^-1``:
    ``D -> D D | P_c X_c'``, ``P_c -> c | P_c D``, ``X_c -> c``.
    Every variable derives a word of length at most 2.
    """
    binary: dict[str, list] = {start: [], "D": []}
    terminal: dict[str, list] = {}
    for c in alphabet.codes:
        p = "P_" + _code_name(alphabet, c)
        x_inv = "X_" + _code_name(alphabet, c ^ 1)
        for head in (start, "D"):
            binary[head].append((p, x_inv))
        binary[p] = [(p, "D")]
        terminal[p] = [c]
        terminal["X_" + _code_name(alphabet, c)] = [c]
    for head in (start, "D"):
        binary[head].append(("D", "D"))
    return CnfGrammar(alphabet, start, binary, terminal, epsilon=True)


# -- text format ---------------------------------------------------------
def loads(text: str, alphabet: Optional[InvolutiveAlphabet] = None, path=None) -> CnfGrammar:
    """``alphabet a b``, ``start S``, ``rule X -> Y Z``, ``rule X -> a``, ``epsilon``."""
    start = None
    eps = False
    binary: dict[str, list] = {}
    terminal_tokens: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "alphabet":
                alphabet = InvolutiveAlphabet(rest)
            elif head == "start":
                if len(rest) != 1:
                    raise FormatError("expected: start VARIABLE", lineno, path)
                start = rest[0]
            elif head == "epsilon":
                eps = True
            elif head == "rule":
                if len(rest) not in (3, 4) or rest[1] != "->":
                    raise FormatError("expected: rule X -> Y Z  or  rule X -> a", lineno, path)
                if len(rest) == 4:
                    binary.setdefault(rest[0], []).append((rest[2], rest[3]))
                else:
                    terminal_tokens.setdefault(rest[0], []).append((rest[2], lineno))
            else:
                raise FormatError(f"unknown directive {head!r}", lineno, path)
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from None
    if alphabet is None:
        raise FormatError("missing alphabet line", None, path)
    if start is None:
        raise FormatError("missing start line", None, path)
    terminal: dict[str, list] = {}
    for x, toks in terminal_tokens.items():
        for tok, lineno in toks:
            try:
                terminal.setdefault(x, []).append(alphabet.code(tok))
            except ValueError as exc:
                raise FormatError(str(exc), lineno, path) from None
    try:
        return CnfGrammar(alphabet, start, binary, terminal, eps)
    except GrammarError as exc:
        raise FormatError(str(exc), None, path) from None


def load(path) -> CnfGrammar:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), path=path)


def dumps(g: CnfGrammar) -> str:
    lines = ["alphabet " + " ".join(g.alphabet.letters), f"start {g.start}"]
    if g.epsilon:
        lines.append("epsilon")
    for x, rhs in g.rules():
        if isinstance(rhs, tuple):
            lines.append(f"rule {x} -> {rhs[0]} {rhs[1]}")
        else:
            lines.append(f"rule {x} -> {g.alphabet.token(rhs)}")
    return "\n".join(lines) + "\n"
