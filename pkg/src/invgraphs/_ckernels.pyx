# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels. Same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def prepare(table):
    return np.ascontiguousarray(table, dtype=np.int32)


def free_reduce(word):
    cdef Py_ssize_t n = len(word)
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t i
    cdef int c
    if n == 0:
        return ()
    cdef int[::1] buf = np.empty(n, dtype=np.int32)
    for i in range(n):
        c = word[i]
        if top > 0 and buf[top - 1] == (c ^ 1):
            top -= 1
        else:
            buf[top] = c
            top += 1
    return tuple([buf[i] for i in range(top)])


def trace(const int[:, ::1] table, int start, word):
    cdef int v = start
    cdef int c
    for c in word:
        v = table[v, c]
        if v < 0:
            return -1
    return v


def bfs(const int[:, ::1] table, int src, allowed=None):
    cdef Py_ssize_t n = table.shape[0]
    cdef Py_ssize_t k = table.shape[1]
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef int[::1] dist = dist_arr
    cdef const unsigned char[::1] ok
    cdef bint masked = allowed is not None
    if masked:
        ok = np.ascontiguousarray(allowed, dtype=np.uint8)
        if not ok[src]:
            return dist_arr
    cdef int[::1] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, j
    cdef int u, v
    dist[src] = 0
    queue[tail] = src
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for j in range(k):
            v = table[u, j]
            if v >= 0 and dist[v] < 0 and (not masked or ok[v]):
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1
    return dist_arr


def canonical_code(const int[:, ::1] table, int anchor, allowed, flags, order):
    cdef Py_ssize_t n = table.shape[0]
    cdef const unsigned char[::1] ok = np.ascontiguousarray(allowed, dtype=np.uint8)
    cdef const unsigned char[::1] fl = np.ascontiguousarray(flags, dtype=np.uint8)
    cdef int[::1] ordv = np.ascontiguousarray(order, dtype=np.int32)
    cdef Py_ssize_t k = ordv.shape[0]
    cdef int[::1] newid = np.full(n, -1, dtype=np.int32)
    cdef int[::1] seq = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, j
    cdef int u, v
    code = []
    newid[anchor] = 0
    seq[tail] = anchor
    tail += 1
    while head < tail:
        u = seq[head]
        head += 1
        code.append(fl[u])
        for j in range(k):
            v = table[u, ordv[j]]
            if v < 0 or not ok[v]:
                code.append(-1)
                continue
            if newid[v] < 0:
                newid[v] = tail
                seq[tail] = v
                tail += 1
            code.append(newid[v])
    return tuple(code)
