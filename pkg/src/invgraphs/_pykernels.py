"""Pure-Python versions of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same results; ``invgraphs.kernels`` picks one at import time.

Letters are integer codes with ``inverse(c) == c ^ 1``. A transition table
has one row per vertex and one column per letter code, ``-1`` meaning "no
edge". This backend works on the table as a list of lists (see ``prepare``).
"""

from collections import deque

import numpy as np

BACKEND = "python"


def prepare(table):
    return np.asarray(table).tolist()


def free_reduce(word):
    out = []
    for c in word:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def trace(table, start, word):
    v = start
    for c in word:
        v = table[v][c]
        if v < 0:
            return -1
    return v


def bfs(table, src, allowed=None):
    n = len(table)
    dist = np.full(n, -1, dtype=np.int32)
    if allowed is not None and not allowed[src]:
        return dist
    dist_l = [-1] * n
    dist_l[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        du = dist_l[u] + 1
        for v in table[u]:
            if v >= 0 and dist_l[v] < 0 and (allowed is None or allowed[v]):
                dist_l[v] = du
                queue.append(v)
    dist[:] = dist_l
    return dist


def canonical_code(table, anchor, allowed, flags, order):
    """Adjacency code of the component of ``anchor`` inside ``allowed``.

    Vertices are renumbered in BFS order from ``anchor`` visiting letters in
    ``order``; the code lists, per renumbered vertex, its flag followed by the
    new number of each neighbour (``-1`` when absent or outside ``allowed``).
    """
    newid = {anchor: 0}
    seq = [anchor]
    code = []
    i = 0
    while i < len(seq):
        u = seq[i]
        i += 1
        code.append(int(flags[u]))
        row = table[u]
        for c in order:
            v = row[c]
            if v < 0 or not allowed[v]:
                code.append(-1)
                continue
            j = newid.get(v)
            if j is None:
                j = len(seq)
                newid[v] = j
                seq.append(v)
            code.append(j)
    return tuple(code)
