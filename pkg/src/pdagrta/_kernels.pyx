# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled longest-path kernels. Mirrors ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.map cimport map

cnp.import_array()


def longest_suffix(const int[::1] topo, const int[::1] succ_ptr, const int[::1] succ_idx,
                   const double[::1] wcet, const unsigned char[::1] active):
    """best[v]: longest active path starting at v; nxt[v]: smallest-id successor on it."""
    cdef Py_ssize_t n = wcet.shape[0]
    best_arr = np.full(n, -INFINITY, dtype=np.float64)
    nxt_arr = np.full(n, -1, dtype=np.int32)
    cdef double[::1] best = best_arr
    cdef int[::1] nxt = nxt_arr
    cdef Py_ssize_t t, k
    cdef int v, w, arg
    cdef double top, cand
    for t in range(n - 1, -1, -1):
        v = topo[t]
        if not active[v]:
            continue
        top = 0.0
        arg = -1
        for k in range(succ_ptr[v], succ_ptr[v + 1]):
            w = succ_idx[k]
            if active[w]:
                cand = best[w]
                if arg < 0 or cand > top:
                    top = cand
                    arg = w
        best[v] = wcet[v] + top
        nxt[v] = arg
    return best_arr, nxt_arr


def enumerate_paths(const int[::1] succ_ptr, const int[::1] succ_idx, const double[::1] wcet,
                    const unsigned char[::1] active, const double[::1] potential,
                    int source, int sink, double threshold, long limit=-1):
    """All active source->sink paths whose length can reach ``threshold``.

    A prefix ending before v is extended into v only if prefix + potential[v]
    >= threshold. Paths are produced in lexicographic order of positions.
    """
    cdef Py_ssize_t n = wcet.shape[0]
    out = []
    if source < 0 or not active[source] or potential[source] < threshold:
        return out
    stack_arr = np.empty(n + 1, dtype=np.int32)
    cursor_arr = np.empty(n + 1, dtype=np.int32)
    prefix_arr = np.empty(n + 2, dtype=np.float64)
    cdef int[::1] stack = stack_arr
    cdef int[::1] cursor = cursor_arr
    cdef double[::1] prefix = prefix_arr
    cdef Py_ssize_t depth = 0
    cdef int v, w, k
    cdef long found = 0
    stack[0] = source
    cursor[0] = succ_ptr[source]
    prefix[0] = 0.0
    prefix[1] = wcet[source]
    while depth >= 0:
        v = stack[depth]
        if v == sink:
            out.append([stack[i] for i in range(depth + 1)])
            found += 1
            if limit >= 0 and found > limit:
                raise OverflowError("path enumeration limit exceeded")
            depth -= 1
            continue
        k = cursor[depth]
        while k < succ_ptr[v + 1]:
            w = succ_idx[k]
            k += 1
            if active[w] and prefix[depth + 1] + potential[w] >= threshold:
                break
        else:
            depth -= 1
            continue
        cursor[depth] = k
        depth += 1
        stack[depth] = w
        cursor[depth] = succ_ptr[w]
        prefix[depth + 1] = prefix[depth] + wcet[w]
    return out


cdef vector[int] _trace(const vector[int]& pred, const vector[int]& where, int lab):
    cdef vector[int] seq
    while lab >= 0:
        seq.push_back(where[lab])
        lab = pred[lab]
    return seq


cdef bint _lex_less(const vector[int]& pred, const vector[int]& where, int a, int b):
    """Is the prefix of label a lexicographically smaller than that of label b?"""
    cdef vector[int] x = _trace(pred, where, a)
    cdef vector[int] y = _trace(pred, where, b)
    cdef Py_ssize_t i = <Py_ssize_t>x.size() - 1, j = <Py_ssize_t>y.size() - 1
    while i >= 0 and j >= 0:
        if x[i] != y[j]:
            return x[i] < y[j]
        i -= 1
        j -= 1
    return i < 0 and j >= 0


def enumerate_dominant(const int[::1] topo, const int[::1] succ_ptr, const int[::1] succ_idx,
                       const double[::1] wcet, const double[::1] potential, const int[::1] node_branch,
                       int source, int sink, double threshold):
    """For every set of branches some source-to-sink path takes, the longest
    such path (lexicographically smallest on ties), if it can reach ``threshold``.

    Forward label DP in topological order; a label is (node, branch set) and
    keeps the best prefix. Returns (paths, state ids, lengths).
    """
    cdef Py_ssize_t n = wcet.shape[0]
    out = []
    states = []
    lengths = []
    if source < 0 or potential[source] < threshold:
        return out, states, lengths
    cdef long long nb_span = 1
    cdef unordered_map[long long, long long] intern
    cdef unordered_map[long long, int] at  # state * n + node -> label
    cdef vector[vector[int]] node_labels
    cdef vector[int] pred, where
    cdef vector[long long] lstate
    cdef vector[double] llen
    cdef Py_ssize_t t, q
    cdef int v, w, k, bw, lab, cur
    cdef long long s, key
    cdef double reach, cand
    node_labels.resize(n)
    for q in range(n):
        if node_branch[q] + 1 > nb_span:
            nb_span = node_branch[q] + 1
    s = 0
    if node_branch[source] >= 0:
        intern[node_branch[source]] = 1
        s = 1
    pred.push_back(-1)
    where.push_back(source)
    lstate.push_back(s)
    llen.push_back(wcet[source])
    node_labels[source].push_back(0)
    for t in range(n):
        v = topo[t]
        for q in range(<Py_ssize_t>node_labels[v].size()):
            lab = node_labels[v][q]
            reach = llen[lab]
            for k in range(succ_ptr[v], succ_ptr[v + 1]):
                w = succ_idx[k]
                if reach + potential[w] < threshold:
                    continue
                s = lstate[lab]
                bw = node_branch[w]
                if bw >= 0 and bw != node_branch[v]:
                    key = s * nb_span + bw
                    if intern.count(key):
                        s = intern[key]
                    else:
                        s = <long long>intern.size() + 1
                        intern[key] = s
                cand = reach + wcet[w]
                key = s * n + w
                if at.count(key) == 0:
                    at[key] = <int>pred.size()
                    node_labels[w].push_back(<int>pred.size())
                    pred.push_back(lab)
                    where.push_back(w)
                    lstate.push_back(s)
                    llen.push_back(cand)
                    continue
                cur = at[key]
                if cand > llen[cur] or (cand == llen[cur] and _lex_less(pred, where, lab, pred[cur])):
                    pred[cur] = lab
                    llen[cur] = cand
    for q in range(<Py_ssize_t>node_labels[sink].size()):
        lab = node_labels[sink][q]
        seq = _trace(pred, where, lab)
        out.append([seq[t] for t in range(<Py_ssize_t>seq.size() - 1, -1, -1)])
        states.append(lstate[lab])
        lengths.append(llen[lab])
    return out, states, lengths


def eliminate(const int[:, ::1] choice, const double[::1] lengths,
              const int[::1] path_ptr, const int[::1] path_idx,
              const int[::1] ext_ptr, const int[::1] ext_idx,
              const int[::1] drop_ptr, const int[::1] drop_idx,
              const int[::1] topo, const int[::1] succ_ptr, const int[::1] succ_idx,
              const double[::1] wcet):
    """Pairwise elimination over paths sorted by the ordering key.

    ``choice[i, s]`` is the branch index path i takes in structure s (0 when
    it avoids s). A path is dropped when an earlier survivor takes the same
    branches, or when it shares no conflicting branch with an earlier
    survivor whose sub-structure lower bound exceeds its length. That bound
    is the longest path over the survivor's nodes plus, for each structure
    only the survivor crosses, its extent (``ext``) minus all but its
    shortest branch (``drop``).
    """
    cdef Py_ssize_t count = choice.shape[0]
    cdef Py_ssize_t ns = choice.shape[1]
    cdef Py_ssize_t n = wcet.shape[0]
    alive_arr = np.zeros(count, dtype=np.uint8)
    cdef unsigned char[::1] alive = alive_arr
    cdef vector[int] surv
    cdef vector[unsigned char] mask
    cdef vector[double] best
    mask.assign(n, 0)
    best.assign(n, 0.0)
    cdef map[vector[int], double] cache
    cdef vector[int] key
    cdef Py_ssize_t i, j, t, t2, s, q, k
    cdef bint same, conflict, removed
    cdef int ca, cb, v, w
    cdef double val, top
    for j in range(count):
        removed = False
        for t in range(<Py_ssize_t>surv.size()):
            i = surv[t]
            same = True
            conflict = False
            for s in range(ns):
                ca = choice[i, s]
                cb = choice[j, s]
                if ca != cb:
                    same = False
                    if ca != 0 and cb != 0:
                        conflict = True
                        break
            if same:
                removed = True
            elif not conflict:
                key.clear()
                key.push_back(<int>i)
                for s in range(ns):
                    if choice[i, s] != 0 and choice[j, s] == 0:
                        key.push_back(<int>s)
                if cache.count(key):
                    val = cache[key]
                else:
                    for q in range(n):
                        mask[q] = 0
                    for q in range(path_ptr[i], path_ptr[i + 1]):
                        mask[path_idx[q]] = 1
                    for t2 in range(1, <Py_ssize_t>key.size()):
                        for q in range(ext_ptr[key[t2]], ext_ptr[key[t2] + 1]):
                            mask[ext_idx[q]] = 1
                    for t2 in range(1, <Py_ssize_t>key.size()):
                        for q in range(drop_ptr[key[t2]], drop_ptr[key[t2] + 1]):
                            mask[drop_idx[q]] = 0
                    val = 0.0
                    for q in range(n - 1, -1, -1):
                        v = topo[q]
                        if not mask[v]:
                            continue
                        top = 0.0
                        for k in range(succ_ptr[v], succ_ptr[v + 1]):
                            w = succ_idx[k]
                            if mask[w] and best[w] > top:
                                top = best[w]
                        best[v] = wcet[v] + top
                        if best[v] > val:
                            val = best[v]
                    cache[key] = val
                removed = val > lengths[j]
            if removed:
                break
        if not removed:
            alive[j] = 1
            surv.push_back(<int>j)
    return alive_arr


def miss_matrix(const int[:, ::1] choice, const double[:, ::1] prob, bint conditional):
    """M[l, h] = 1 - P(every branch h takes and l does not all execute), for l < h.

    A branch of h in a structure where l takes another branch makes the
    product 0 when ``conditional``. Factors multiply in column order.
    """
    cdef Py_ssize_t count = choice.shape[0], ns = choice.shape[1], l, h, s
    out_arr = np.zeros((count, count), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double f
    cdef int cl, ch
    for h in range(count):
        for l in range(h):
            f = 1.0
            for s in range(ns):
                ch = choice[h, s]
                cl = choice[l, s]
                if ch == 0 or ch == cl:
                    continue
                if conditional and cl != 0:
                    f = 0.0
                    break
                f *= prob[s, ch]
            out[l, h] = 1.0 - f
    return out_arr
