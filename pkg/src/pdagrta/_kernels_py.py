"""Pure-Python kernels; used when the compiled extension is unavailable."""

import math

import numpy as np


def longest_suffix(topo, succ_ptr, succ_idx, wcet, active):
    n = len(wcet)
    best = [-math.inf] * n
    nxt = [-1] * n
    ptr = succ_ptr.tolist()
    idx = succ_idx.tolist()
    c = wcet.tolist()
    act = active.tolist()
    for v in reversed(topo.tolist()):
        if not act[v]:
            continue
        top = 0.0
        arg = -1
        for k in range(ptr[v], ptr[v + 1]):
            w = idx[k]
            if act[w] and (arg < 0 or best[w] > top):
                top = best[w]
                arg = w
        best[v] = c[v] + top
        nxt[v] = arg
    return np.array(best, dtype=np.float64), np.array(nxt, dtype=np.int32)


def enumerate_paths(succ_ptr, succ_idx, wcet, active, potential, source, sink, threshold, limit=-1):
    out = []
    if source < 0 or not active[source] or potential[source] < threshold:
        return out
    ptr = succ_ptr.tolist()
    idx = succ_idx.tolist()
    c = wcet.tolist()
    act = active.tolist()
    pot = potential.tolist()

    path = [source]
    prefix = [0.0, c[source]]
    cursor = [ptr[source]]
    while path:
        v = path[-1]
        if v == sink:
            out.append(list(path))
            if 0 <= limit < len(out):
                raise OverflowError("path enumeration limit exceeded")
            path.pop()
            prefix.pop()
            cursor.pop()
            continue
        k = cursor[-1]
        end = ptr[v + 1]
        reach = prefix[-1]
        while k < end:
            w = idx[k]
            k += 1
            if act[w] and reach + pot[w] >= threshold:
                break
        else:
            path.pop()
            prefix.pop()
            cursor.pop()
            continue
        cursor[-1] = k
        path.append(w)
        prefix.append(reach + c[w])
        cursor.append(ptr[w])
    return out


def _trace(pred, where, lab):
    seq = []
    while lab >= 0:
        seq.append(where[lab])
        lab = pred[lab]
    return seq[::-1]


def enumerate_dominant(topo, succ_ptr, succ_idx, wcet, potential, node_branch, source, sink, threshold):
    out, states, lengths = [], [], []
    if source < 0 or potential[source] < threshold:
        return out, states, lengths
    ptr = succ_ptr.tolist()
    idx = succ_idx.tolist()
    c = wcet.tolist()
    pot = potential.tolist()
    nb = node_branch.tolist()
    intern = {}
    at = {}
    node_labels = [[] for _ in c]
    s0 = intern.setdefault((0, nb[source]), len(intern) + 1) if nb[source] >= 0 else 0
    pred, where, lstate, llen = [-1], [source], [s0], [c[source]]
    node_labels[source].append(0)
    for v in topo.tolist():
        for lab in node_labels[v]:
            reach = llen[lab]
            for k in range(ptr[v], ptr[v + 1]):
                w = idx[k]
                if reach + pot[w] < threshold:
                    continue
                s = lstate[lab]
                if nb[w] >= 0 and nb[w] != nb[v]:
                    s = intern.setdefault((s, nb[w]), len(intern) + 1)
                cand = reach + c[w]
                cur = at.get((s, w))
                if cur is None:
                    at[(s, w)] = len(pred)
                    node_labels[w].append(len(pred))
                    pred.append(lab)
                    where.append(w)
                    lstate.append(s)
                    llen.append(cand)
                elif cand > llen[cur] or (
                    cand == llen[cur] and _trace(pred, where, lab) < _trace(pred, where, pred[cur])
                ):
                    pred[cur] = lab
                    llen[cur] = cand
    for lab in node_labels[sink]:
        out.append(_trace(pred, where, lab))
        states.append(lstate[lab])
        lengths.append(llen[lab])
    return out, states, lengths


def eliminate(choice, lengths, path_ptr, path_idx, ext_ptr, ext_idx, drop_ptr, drop_idx,
              topo, succ_ptr, succ_idx, wcet):
    rows = [tuple(r) for r in choice.tolist()]
    lens = lengths.tolist()
    pp, pi = path_ptr.tolist(), path_idx.tolist()
    ep, ei = ext_ptr.tolist(), ext_idx.tolist()
    dp, di = drop_ptr.tolist(), drop_idx.tolist()
    n = len(wcet)
    alive = np.zeros(len(rows), dtype=np.uint8)
    survivors = []
    cache = {}
    for j, b in enumerate(rows):
        removed = False
        for i in survivors:
            a = rows[i]
            if a == b:
                removed = True
            elif not any(x != y and x and y for x, y in zip(a, b)):
                only = tuple(s for s, (x, y) in enumerate(zip(a, b)) if x and not y)
                key = (i, only)
                if key not in cache:
                    mask = np.zeros(n, dtype=np.uint8)
                    mask[pi[pp[i]:pp[i + 1]]] = 1
                    for s in only:
                        mask[ei[ep[s]:ep[s + 1]]] = 1
                    for s in only:
                        mask[di[dp[s]:dp[s + 1]]] = 0
                    best, _ = longest_suffix(topo, succ_ptr, succ_idx, wcet, mask)
                    cache[key] = max(0.0, float(best.max()))
                removed = cache[key] > lens[j]
            if removed:
                break
        if not removed:
            alive[j] = 1
            survivors.append(j)
    return alive


def miss_matrix(choice, prob, conditional):
    rows = choice.tolist()
    p = prob.tolist()
    count = len(rows)
    out = np.zeros((count, count), dtype=np.float64)
    for h in range(count):
        b = rows[h]
        for l in range(h):
            a = rows[l]
            f = 1.0
            for s, (ch, cl) in enumerate(zip(b, a)):
                if ch == 0 or ch == cl:
                    continue
                if conditional and cl != 0:
                    f = 0.0
                    break
                f *= p[s][ch]
            out[l, h] = 1.0 - f
    return out
