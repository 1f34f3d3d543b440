"""Pushdown automata over involutive alphabets, inverse PDAs and derivability.

A configuration is ``(state, stack)`` with the stack a tuple of symbols, top
last. A transition ``(q, a, x) -> (p, gamma)`` replaces the top ``x`` by
``gamma``; ``a is None`` marks a 1-move.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .alphabet import InvolutiveAlphabet, Word, WordLike, free_reduce
from .errors import FormatError, GraphError, MachineError
from .graph import InverseGraph, RootedGraph, ValidationReport, Vertex, trace

BOTTOM = "⊥"
ACCEPT_MODES = ("final", "stack", "final+stack")

Config = tuple  # (state, stack tuple)


@dataclass(frozen=True)
class Pda:
    alphabet: InvolutiveAlphabet
    states: tuple
    initial: str
    finals: frozenset
    transitions: dict  # (q, code | None, x) -> tuple of (p, gamma)
    bottom: str = BOTTOM
    accept: str = "final"
    stack_symbols: tuple = field(default=())

    def __post_init__(self):
        if self.accept not in ACCEPT_MODES:
            raise MachineError(f"unknown acceptance mode {self.accept!r}")
        trans = {}
        symbols = {self.bottom, *self.stack_symbols}
        states = set(self.states)
        for (q, a, x), moves in self.transitions.items():
            if a is not None:
                self.alphabet.check_code(a)
            moves = tuple(dict.fromkeys((p, tuple(g)) for p, g in moves))
            if moves:
                trans[(q, a, x)] = moves
            symbols.add(x)
            states.add(q)
            for p, g in moves:
                states.add(p)
                symbols.update(g)
        if self.initial not in states:
            raise MachineError(f"initial state {self.initial!r} is not a state")
        unknown = set(self.finals) - states
        if unknown:
            raise MachineError(f"final states not declared: {', '.join(sorted(unknown))}")
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "states", tuple(dict.fromkeys((*self.states, *sorted(states - set(self.states))))))
        object.__setattr__(self, "stack_symbols", tuple(sorted(symbols)))
        object.__setattr__(self, "finals", frozenset(self.finals))

    @property
    def start(self) -> Config:
        return (self.initial, (self.bottom,))

    def is_deterministic(self) -> bool:
        return self._deterministic

    @cached_property
    def _deterministic(self) -> bool:
        if any(len(m) > 1 for m in self.transitions.values()):
            return False
        eps = {(q, x) for q, a, x in self.transitions if a is None}
        return not any((q, x) in eps for q, a, x in self.transitions if a is not None)

    def is_real_time(self) -> bool:
        return all(a is not None for _, a, _ in self.transitions)

    def step(self, config: Config, a: Optional[int]) -> list[Config]:
        q, stack = config
        if not stack:
            return []
        moves = self.transitions.get((q, a, stack[-1]), ())
        return [(p, stack[:-1] + g) for p, g in moves]

    def is_accepting(self, config: Config) -> bool:
        q, stack = config
        final = q in self.finals
        bottom = stack == (self.bottom,)
        if self.accept == "final":
            return final
        if self.accept == "stack":
            return bottom
        return final and bottom


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    config: Optional[Config]
    steps: int


def run_pda(m: Pda, w: WordLike, max_epsilon: int = 10000) -> RunResult:
    """Run a deterministic machine; ``config`` is ``None`` when it blocks."""
    if not m.is_deterministic():
        raise MachineError("run needs a deterministic machine")
    word = m.alphabet.parse(w)
    config = m.start
    steps = 0

    def closure(cfg):
        nonlocal steps
        for _ in range(max_epsilon):
            nxt = m.step(cfg, None)
            if not nxt:
                return cfg
            cfg = nxt[0]
            steps += 1
        raise MachineError("1-moves do not terminate")

    config = closure(config)
    for c in word:
        nxt = m.step(config, c)
        if not nxt:
            return RunResult(False, None, steps)
        config = closure(nxt[0])
        steps += 1
    return RunResult(m.is_accepting(config), config, steps)


def pda_accepts(m: Pda, w: WordLike) -> bool:
    return run_pda(m, w).accepted


def _height(stack) -> int:
    return len(stack) - 1


def config_key(m: Pda, config: Config) -> str:
    q, stack = config
    # "." cannot occur in a symbol name, and keys must stay single tokens
    return f"{q}:{'.'.join(stack)}"


def config_graph(m: Pda, height: int) -> RootedGraph:
    """Configurations reachable with at most ``height`` symbols above the bottom.

    Edges are the machine's steps, labelled by input letters; no inverse
    edges are added, so the result validates exactly when the machine is
    inverse. Configurations with a step beyond the bound are truncated.
    """
    if height < 0:
        raise ValueError("height must be non-negative")
    if not m.is_real_time():
        raise MachineError("configuration graphs need a real-time machine")
    index = {m.start: 0}
    order = [m.start]
    edges = []
    truncated = set()
    queue = deque([m.start])
    while queue:
        cfg = queue.popleft()
        u = index[cfg]
        for c in m.alphabet.codes:
            for nxt in m.step(cfg, c):
                if _height(nxt[1]) > height:
                    truncated.add(u)
                    continue
                v = index.get(nxt)
                if v is None:
                    v = index[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                edges.append((u, c, v))
    g = InverseGraph(m.alphabet, [config_key(m, c) for c in order], edges, truncated)
    return RootedGraph(g, 0)


def validate_inverse_pda(m: Pda, height: int = 6) -> ValidationReport:
    """Check the inverse-PDA conditions.

    Transition-level: determinism, no 1-moves, at most one symbol pushed,
    pushes and replacements paired with their reverse. Configuration-level
    (stack height up to ``height``): every step is undone by the inverse
    letter and no reachable configuration has an empty stack.
    """
    report = ValidationReport(subject="inverse PDA")
    A = m.alphabet
    for (q, a, x), moves in sorted(m.transitions.items(), key=repr):
        where = f"({q}, {'1' if a is None else A.token(a)}, {x})"
        if len(moves) > 1:
            report.add("determinism", f"{where} has {len(moves)} moves")
        if a is None:
            report.add("real-time", f"{where} is a 1-move")
            continue
        for p, g in moves:
            if len(g) > 2:
                report.add("stack-height", f"{where} -> ({p}, {' '.join(g)}) pushes {len(g) - 1} symbols")
            elif len(g) == 2:
                if g[0] != x:
                    report.add("stack-height", f"{where} -> ({p}, {' '.join(g)}) rewrites below the top")
                elif (q, ()) not in m.transitions.get((p, a ^ 1, g[1]), ()):
                    report.add("pairing", f"push {where} -> ({p}, {' '.join(g)}) has no reverse pop")
            elif len(g) == 1:
                if (q, (x,)) not in m.transitions.get((p, a ^ 1, g[0]), ()):
                    report.add("pairing", f"{where} -> ({p}, {g[0]}) has no reverse")
            if x == m.bottom and g[:1] != (m.bottom,):
                report.add("empty-stack", f"{where} -> ({p}, {' '.join(g) or '1'}) removes the bottom")
    seen = {m.start}
    queue = deque([m.start])
    while queue:
        cfg = queue.popleft()
        if not cfg[1]:
            report.add("empty-stack", f"configuration {config_key(m, cfg)} is reachable")
            continue
        for c in A.codes:
            for nxt in m.step(cfg, c):
                back = m.step(nxt, c ^ 1) if nxt[1] else []
                if back != [cfg]:
                    report.add(
                        "pairing",
                        f"{config_key(m, cfg)} -{A.token(c)}-> {config_key(m, nxt)} is not undone by {A.token(c ^ 1)}",
                    )
                if _height(nxt[1]) <= height and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return report


def dyck_checker_pda(lam: InverseGraph, y: Vertex) -> Pda:
    """Machine accepting the words that reduce to 1 and trace a walk from ``y``.

    States are the vertices of ``lam`` (by key). Reading ``b`` along an edge
    pops when the top is ``b^-1`` and pushes ``b`` otherwise; acceptance is
    at ``y`` with only the bottom symbol left.
    """
    A = lam.alphabet
    y = lam.vertex(y)
    bottom = BOTTOM + "_" + lam.key(y)
    tokens = [A.token(c) for c in A.codes]
    symbols = tokens + [bottom]
    trans = {}
    for u, b, v in lam.edges:
        for top in symbols:
            if top == A.token(b ^ 1):
                trans[(lam.key(u), b, top)] = [(lam.key(v), ())]
            else:
                trans[(lam.key(u), b, top)] = [(lam.key(v), (top, A.token(b)))]
    return Pda(
        alphabet=A,
        states=tuple(lam.keys),
        initial=lam.key(y),
        finals=frozenset([lam.key(y)]),
        transitions=trans,
        bottom=bottom,
        accept="final+stack",
        stack_symbols=tuple(symbols),
    )


def positive_part(m: Pda) -> Pda:
    """The machine restricted to transitions on positive letters."""
    trans = {k: v for k, v in m.transitions.items() if k[1] is not None and k[1] & 1 == 0}
    return Pda(m.alphabet, m.states, m.initial, m.finals, trans, m.bottom, m.accept, m.stack_symbols)


def reversible_extension(n: Pda) -> Pda:
    """Add, for every positive transition, its reverse on the inverse letter.

    ``(q,a,x) -> (p, x y)`` gives ``(p,a',y) -> (q, 1)``; ``(q,a,x) -> (p, z)``
    gives ``(p,a',z) -> (q, x)``; a pop ``(q,a,x) -> (p, 1)`` gives
    ``(p,a',z) -> (q, z x)`` for every stack symbol ``z`` not already claimed
    by the reverse of a push.
    """
    trans: dict = {k: list(v) for k, v in n.transitions.items()}
    pops = []
    for (q, a, x), moves in n.transitions.items():
        if a is None or a & 1:
            raise MachineError("reversible_extension expects a machine on positive letters")
        for p, g in moves:
            if len(g) == 2:
                trans.setdefault((p, a ^ 1, g[1]), []).append((q, ()))
            elif len(g) == 1:
                trans.setdefault((p, a ^ 1, g[0]), []).append((q, (x,)))
            elif len(g) == 0:
                pops.append((q, a, x, p))
            else:
                raise MachineError("reversible machines change the stack height by at most one")
    for q, a, x, p in pops:
        for z in n.stack_symbols:
            if (p, a ^ 1, z) not in trans:
                trans[(p, a ^ 1, z)] = [(q, (z, x))]
    return Pda(n.alphabet, n.states, n.initial, n.finals, trans, n.bottom, n.accept, n.stack_symbols)


# -- derivability ---------------------------------------------------------
def derivable(lam: InverseGraph, y0: Vertex, w: WordLike, s: WordLike) -> bool:
    """Whether ``w = u_1 s_1 u_2 ... s_k u_{k+1}`` with ``s = s_1...s_k``.

    Each ``u_i`` must reduce to 1 and trace a walk from the vertex reached
    by ``s_1...s_{i-1}`` from ``y0``. Decided by a search over
    ``(position in w, position in s, reduced current segment)``.
    """
    A = lam.alphabet
    word = A.parse(w)
    base = A.parse(s)
    y0 = lam.vertex(y0)
    ys = [y0]
    for c in base:
        nxt = lam.target(ys[-1], c)
        if nxt is None:
            raise GraphError("the base word does not label a walk")
        ys.append(nxt)
    return bool(_derivations(lam, ys, word, base, collect=False))


def _derivations(lam: InverseGraph, ys, word, base, collect: bool):
    table = lam.table
    n, k = len(word), len(base)
    seen = set()
    stack = [(0, 0, (), ys[0])]
    while stack:
        state = stack.pop()
        if state[:3] in seen:
            continue
        seen.add(state[:3])
        i, j, seg, v = state
        if i == n:
            if j == k and not seg:
                return True
            continue
        c = word[i]
        if not seg and j < k and base[j] == c:
            stack.append((i + 1, j + 1, (), ys[j + 1]))
        nv = int(table[v, c])
        if nv >= 0:
            nseg = seg[:-1] if seg and seg[-1] == c ^ 1 else seg + (c,)
            stack.append((i + 1, j, nseg, nv))
    return False


def derivation_bases(lam: InverseGraph, y0: Vertex, w: WordLike) -> set[Word]:
    """Every ``s`` (tracing from ``y0``) from which ``w`` is derivable."""
    A = lam.alphabet
    word = A.parse(w)
    table = lam.table
    n = len(word)
    out: set[Word] = set()
    seen = set()
    # (i, reduced segment, vertex at segment start, s so far)
    stack = [(0, (), lam.vertex(y0), ())]
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        i, seg, y, s = state
        if i == n:
            if not seg:
                out.add(s)
            continue
        c = word[i]
        v = trace(lam, y, seg)
        if not seg:
            ny = int(table[y, c])
            if ny >= 0:
                stack.append((i + 1, (), ny, s + (c,)))
        if v is not None and int(table[v, c]) >= 0:
            nseg = seg[:-1] if seg and seg[-1] == c ^ 1 else seg + (c,)
            stack.append((i + 1, nseg, y, s))
    return out


def derived_member(grammar, lam: InverseGraph, y0: Vertex, w: WordLike) -> bool:
    """Whether ``w`` is derivable in ``lam`` from some word of the grammar."""
    from .grammar import cyk_member

    return any(cyk_member(grammar, s) is not None for s in derivation_bases(lam, y0, w))


def spanning_basis(rg: RootedGraph) -> list[Word]:
    """Free basis of the circuit group at the root: one word per non-tree edge pair."""
    g = rg.graph
    table = g.table
    parent: dict[int, tuple[int, int]] = {rg.root: (-1, -1)}
    path: dict[int, Word] = {rg.root: ()}
    queue = deque([rg.root])
    while queue:
        u = queue.popleft()
        for c, v in enumerate(table[u]):
            v = int(v)
            if v >= 0 and v not in parent:
                parent[v] = (u, c)
                path[v] = path[u] + (c,)
                queue.append(v)
    tree = {(u, c) for v, (u, c) in parent.items() if u >= 0}
    tree |= {(v, c ^ 1) for v, (u, c) in parent.items() if u >= 0}
    basis = []
    for u, c, v in g.positive_edges():
        if (u, c) in tree:
            continue
        back = tuple(x ^ 1 for x in reversed(path[v]))
        basis.append(free_reduce(path[u] + (c,) + back))
    return basis


# -- text format ---------------------------------------------------------
def loads(text: str, path=None) -> Pda:
    """Line format.

    ``alphabet a b``; ``state q0 initial``; ``state q1``; ``final q1``;
    ``bottom Z``; ``stack x y``; ``accept final|stack|final+stack``;
    ``trans q a x -> p y z`` with ``-`` for an empty push (and ``-`` as the
    input letter for a 1-move).
    """
    alphabet = None
    states: list[str] = []
    initial = None
    finals: list[str] = []
    bottom = BOTTOM
    accept = "final"
    symbols: list[str] = []
    raw_trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "alphabet":
                alphabet = InvolutiveAlphabet(rest)
            elif head == "state":
                if not rest or len(rest) > 2 or (len(rest) == 2 and rest[1] != "initial"):
                    raise FormatError("expected: state NAME [initial]", lineno, path)
                states.append(rest[0])
                if len(rest) == 2:
                    if initial is not None:
                        raise FormatError("two initial states", lineno, path)
                    initial = rest[0]
            elif head == "final":
                finals.extend(rest)
            elif head == "bottom":
                if len(rest) != 1:
                    raise FormatError("expected: bottom SYMBOL", lineno, path)
                bottom = rest[0]
            elif head == "stack":
                symbols.extend(rest)
            elif head == "accept":
                if len(rest) != 1 or rest[0] not in ACCEPT_MODES:
                    raise FormatError(f"accept must be one of {', '.join(ACCEPT_MODES)}", lineno, path)
                accept = rest[0]
            elif head == "trans":
                if len(rest) < 5 or rest[3] != "->":
                    raise FormatError("expected: trans Q LETTER TOP -> P PUSH...", lineno, path)
                gamma = tuple(t for t in rest[5:] if t != "-")
                raw_trans.append((rest[0], rest[1], rest[2], rest[4], gamma, lineno))
            else:
                raise FormatError(f"unknown directive {head!r}", lineno, path)
        except FormatError:
            raise
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from None
    if alphabet is None:
        raise FormatError("missing alphabet line", None, path)
    if initial is None:
        raise FormatError("no initial state", None, path)
    trans: dict = {}
    for q, a, x, p, gamma, lineno in raw_trans:
        try:
            code = None if a == "-" else alphabet.code(a)
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from None
        trans.setdefault((q, code, x), []).append((p, gamma))
    try:
        return Pda(alphabet, tuple(states), initial, frozenset(finals), trans, bottom, accept, tuple(symbols))
    except MachineError as exc:
        raise FormatError(str(exc), None, path) from None


def load(path) -> Pda:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), path=path)


def dumps(m: Pda) -> str:
    A = m.alphabet
    lines = ["alphabet " + " ".join(A.letters)]
    for q in m.states:
        lines.append(f"state {q}" + (" initial" if q == m.initial else ""))
    if m.finals:
        lines.append("final " + " ".join(sorted(m.finals)))
    lines.append(f"bottom {m.bottom}")
    lines.append("stack " + " ".join(m.stack_symbols))
    lines.append(f"accept {m.accept}")
    for (q, a, x), moves in sorted(m.transitions.items(), key=lambda kv: (kv[0][0], -1 if kv[0][1] is None else kv[0][1], kv[0][2])):
        letter = "-" if a is None else A.token(a)
        for p, g in moves:
            lines.append(f"trans {q} {letter} {x} -> {p} {' '.join(g) or '-'}")
    return "\n".join(lines) + "\n"
