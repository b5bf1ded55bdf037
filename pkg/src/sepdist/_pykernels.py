"""Pure-Python separation kernels (fallback for the compiled ``_ckernels``).

All functions take the graph in the compressed form produced by
``MixedGraph.csr``: ``(indptr, nbr, mark_self, mark_nbr)`` with mark codes
0 = tail, 1 = arrow. Reachability is a Bayes-ball style traversal over
``(node, entered-with-arrowhead)`` states: a node entered with a tail (or the
source) passes the ball to every neighbour unless it is conditioned on; a
node entered with an arrowhead passes it along its tail-marked edges when
not conditioned on, and along its arrow-marked edges when conditioned on.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _lists(csr):
    indptr, nbr, mself, mnbr = csr
    n = len(indptr) - 1
    ip = indptr.tolist()
    nb = nbr.tolist()
    ms = mself.tolist()
    mn = mnbr.tolist()
    adj = [
        list(zip(nb[ip[v]:ip[v + 1]], ms[ip[v]:ip[v + 1]], mn[ip[v]:ip[v + 1]]))
        for v in range(n)
    ]
    return n, adj


_cache: dict[int, tuple] = {}


def _adj(csr):
    # csr tuples are cached per graph, so identity is a stable key
    key = id(csr[0])
    hit = _cache.get(key)
    if hit is not None and hit[0] is csr[0]:
        return hit[1], hit[2]
    n, adj = _lists(csr)
    if len(_cache) > 64:
        _cache.clear()
    _cache[key] = (csr[0], n, adj)
    return n, adj


def _ball(n, adj, x, in_s, target):
    """Run the traversal from ``x``; returns (hit_target, visited_flags)."""
    seen = bytearray(2 * n)
    reached = bytearray(n)
    seen[2 * x] = 1
    stack = [(x, 0)]
    while stack:
        v, a = stack.pop()
        if a == 0:
            if in_s[v]:
                continue
            moves = adj[v]
        elif in_s[v]:
            moves = [e for e in adj[v] if e[1] == 1]
        else:
            moves = [e for e in adj[v] if e[1] == 0]
        for w, _, mw in moves:
            st = 2 * w + mw
            if seen[st]:
                continue
            seen[st] = 1
            if not in_s[w] and w != x:
                if w == target:
                    return True, reached
                reached[w] = 1
            stack.append((w, mw))
    return False, reached


def reachable(csr, x, s_nodes):
    """Boolean mask of nodes m-connected to ``x`` given ``s_nodes`` (excludes x and S)."""
    n, adj = _adj(csr)
    in_s = bytearray(n)
    for s in s_nodes:
        in_s[s] = 1
    _, reached = _ball(n, adj, int(x), in_s, -1)
    return np.frombuffer(bytes(reached), dtype=np.uint8).astype(bool)


def connected(csr, x, y, s_nodes):
    n, adj = _adj(csr)
    in_s = bytearray(n)
    for s in s_nodes:
        in_s[s] = 1
    hit, _ = _ball(n, adj, int(x), in_s, int(y))
    return hit


def _sets(indptr, idx):
    ip = indptr.tolist()
    ix = idx.tolist()
    return [ix[ip[v]:ip[v + 1]] for v in range(len(ip) - 1)]


def pair_failures(csr, xs, ys, sep_indptr, sep_idx, threads=1):
    """For each pair i, True if ``sep_i`` fails to separate ``xs[i]``, ``ys[i]``."""
    n, adj = _adj(csr)
    seps = _sets(sep_indptr, sep_idx)
    out = np.zeros(len(xs), dtype=bool)
    for i, (x, y) in enumerate(zip(xs.tolist(), ys.tolist())):
        in_s = bytearray(n)
        for s in seps[i]:
            in_s[s] = 1
        out[i] = _ball(n, adj, x, in_s, y)[0]
    return out


def union_failures(csr, basis_indptr, basis_idx, h_indptr, h_idx, threads=1, collect=False):
    """Count ordered pairs non-adjacent in H whose union separator fails in G.

    The separator of (x, y) is ``basis[x] | basis[y]`` minus ``{x, y}``.
    Returns ``(count, failures)`` where failures is an (k, 2) array when
    ``collect`` is set, else None.
    """
    n, adj = _adj(csr)
    basis = _sets(basis_indptr, basis_idx)
    hadj = [set(s) for s in _sets(h_indptr, h_idx)]
    count = 0
    fails = []
    for x in range(n):
        for y in range(n):
            if y == x or y in hadj[x]:
                continue
            in_s = bytearray(n)
            for s in basis[x]:
                in_s[s] = 1
            for s in basis[y]:
                in_s[s] = 1
            in_s[x] = 0
            in_s[y] = 0
            if _ball(n, adj, x, in_s, y)[0]:
                count += 1
                if collect:
                    fails.append((x, y))
    arr = np.array(fails, dtype=np.int64).reshape(-1, 2) if collect else None
    return count, arr


def mb_outside_counts(csr, mb_indptr, mb_idx, threads=1):
    """Per source x: number of nodes outside MB_H(x) m-connected to x given MB_H(x)."""
    n, adj = _adj(csr)
    mbs = _sets(mb_indptr, mb_idx)
    out = np.zeros(n, dtype=np.int64)
    for x in range(n):
        in_s = bytearray(n)
        for s in mbs[x]:
            in_s[s] = 1
        _, reached = _ball(n, adj, x, in_s, -1)
        out[x] = sum(reached)
    return out


def mb_fast_failures(csr, mb_indptr, mb_idx, h_indptr, h_idx, basis_indptr, basis_idx, threads=1):
    """Failures of the MB-enhanced union strategy: one traversal per source node,
    plus one pair check per exceptional y in MB_H(x) not adjacent to x."""
    n, adj = _adj(csr)
    mbs = _sets(mb_indptr, mb_idx)
    hadj = [set(s) for s in _sets(h_indptr, h_idx)]
    basis = _sets(basis_indptr, basis_idx)
    count = 0
    for x in range(n):
        in_s = bytearray(n)
        for s in mbs[x]:
            in_s[s] = 1
        _, reached = _ball(n, adj, x, in_s, -1)
        count += sum(reached)
        for y in mbs[x]:
            if y in hadj[x]:
                continue
            in_s = bytearray(n)
            for s in basis[x]:
                in_s[s] = 1
            for s in basis[y]:
                in_s[s] = 1
            in_s[x] = 0
            in_s[y] = 0
            if _ball(n, adj, x, in_s, y)[0]:
                count += 1
    return count


def collider_neighbors(csr, threads=1):
    """Per node, the sorted nodes joined to it by a collider path (its blanket)."""
    n, adj = _adj(csr)
    out = []
    for x in range(n):
        reach = set()
        entered = set()
        frontier = []
        for b, _, mb in adj[x]:
            reach.add(b)
            if mb == 1 and b not in entered:
                entered.add(b)
                frontier.append(b)
        while frontier:
            b = frontier.pop()
            for c, mself, mc in adj[b]:
                if mself != 1 or c == x:
                    continue
                reach.add(c)
                if mc == 1 and c not in entered:
                    entered.add(c)
                    frontier.append(c)
        out.append(sorted(reach))
    indptr = np.zeros(n + 1, dtype=np.int32)
    indptr[1:] = np.cumsum([len(s) for s in out])
    idx = np.array([v for s in out for v in s], dtype=np.int32)
    return indptr, idx


def _collider_reach_within(adj, a, keep):
    reach = set()
    entered = set()
    frontier = []
    for b, _, mb in adj[a]:
        if not keep[b]:
            continue
        reach.add(b)
        if mb == 1 and b not in entered:
            entered.add(b)
            frontier.append(b)
    while frontier:
        b = frontier.pop()
        for c, mself, mc in adj[b]:
            if mself != 1 or c == a or not keep[c]:
                continue
            reach.add(c)
            if mc == 1 and c not in entered:
                entered.add(c)
                frontier.append(c)
    return reach


def zl_separators(csr, xs, ys, threads=1):
    """Minimal separator nearest to ``xs[i]`` for each pair, or none.

    Returns ``(found, indptr, idx)``: ``found[i]`` is False when the pair is
    joined by an inducing path; otherwise the sorted separator of pair ``i``
    is ``idx[indptr[i]:indptr[i + 1]]``.
    """
    n, adj = _adj(csr)
    parents = [[w for w, ms, mw in adj[v] if ms == 1 and mw == 0] for v in range(n)]
    found = np.zeros(len(xs), dtype=bool)
    seps = []
    for i, (x, y) in enumerate(zip(np.asarray(xs).tolist(), np.asarray(ys).tolist())):
        keep = bytearray(n)
        keep[x] = keep[y] = 1
        stack = [x, y]
        while stack:
            for w in parents[stack.pop()]:
                if not keep[w]:
                    keep[w] = 1
                    stack.append(w)
        near = _collider_reach_within(adj, x, keep)
        if y in near:
            seps.append(())
            continue
        found[i] = True
        out = []
        seen = {y}
        queue = [y]
        while queue:
            v = queue.pop()
            for w in _collider_reach_within(adj, v, keep):
                if w in seen:
                    continue
                seen.add(w)
                if w in near:
                    out.append(w)
                else:
                    queue.append(w)
        seps.append(sorted(out))
    indptr = np.zeros(len(seps) + 1, dtype=np.int32)
    indptr[1:] = np.cumsum([len(s) for s in seps])
    idx = np.array([v for s in seps for v in s], dtype=np.int32)
    return found, indptr, idx
