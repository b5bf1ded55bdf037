# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled separation kernels. Mirrors ``_pykernels`` function for function."""

import numpy as np

from cython.parallel cimport prange, threadid
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy

BACKEND = "cython"

ctypedef signed char i8


cdef int _ball(const int* indptr, const int* nbr, const i8* mself, const i8* mnbr,
               int x, int target, const int* smark, int sval,
               int* seen, int* rmark, int stamp, int* stack) noexcept nogil:
    # target >= 0: return 1 iff target is m-connected to x. target < 0: return
    # the number of connected nodes and leave them stamped in rmark.
    cdef int top, st, v, a, k, w, count = 0
    cdef bint v_in_s
    seen[2 * x] = stamp
    stack[0] = 2 * x
    top = 1
    while top > 0:
        top -= 1
        st = stack[top]
        v = st >> 1
        a = st & 1
        v_in_s = smark[v] == sval
        if a == 0 and v_in_s:
            continue
        for k in range(indptr[v], indptr[v + 1]):
            if a == 1:
                if v_in_s:
                    if mself[k] != 1:
                        continue
                elif mself[k] != 0:
                    continue
            w = nbr[k]
            st = 2 * w + mnbr[k]
            if seen[st] == stamp:
                continue
            seen[st] = stamp
            if smark[w] != sval and w != x:
                if w == target:
                    return 1
                if rmark[w] != stamp:
                    rmark[w] = stamp
                    count += 1
            stack[top] = st
            top += 1
    if target >= 0:
        return 0
    return count


cdef inline bint _compatible(int w, int a, const int* smark, int sval,
                             const int* other, int stamp) noexcept nogil:
    # can a walk arriving at w with mark a be glued to one from the other side?
    if a == 0:
        return smark[w] != sval and (other[2 * w] == stamp or other[2 * w + 1] == stamp)
    if smark[w] == sval:
        return other[2 * w + 1] == stamp
    return other[2 * w] == stamp


cdef int _meet(const int* indptr, const int* nbr, const i8* mself, const i8* mnbr,
               int x, int y, const int* smark, int sval,
               int* fseen, int* bseen, int stamp, int* fq, int* bq) noexcept nogil:
    # bidirectional search: 1 iff x and y are m-connected given the marked set
    cdef int fh = 0, ft = 1, bh = 0, bt = 1, end, st, ns, v, a, k, w
    cdef int* seen
    cdef int* other
    cdef int* q
    cdef int* h
    cdef int* t
    cdef bint v_in_s
    fseen[2 * x] = stamp
    bseen[2 * y] = stamp
    fq[0] = 2 * x
    bq[0] = 2 * y
    while fh < ft and bh < bt:
        if ft - fh <= bt - bh:
            seen = fseen
            other = bseen
            q = fq
            h = &fh
            t = &ft
        else:
            seen = bseen
            other = fseen
            q = bq
            h = &bh
            t = &bt
        end = t[0]
        while h[0] < end:
            st = q[h[0]]
            h[0] += 1
            v = st >> 1
            a = st & 1
            v_in_s = smark[v] == sval
            if a == 0 and v_in_s:
                continue
            for k in range(indptr[v], indptr[v + 1]):
                if a == 1:
                    if v_in_s:
                        if mself[k] != 1:
                            continue
                    elif mself[k] != 0:
                        continue
                w = nbr[k]
                ns = 2 * w + mnbr[k]
                if seen[ns] == stamp:
                    continue
                seen[ns] = stamp
                if _compatible(w, mnbr[k], smark, sval, other, stamp):
                    return 1
                q[t[0]] = ns
                t[0] += 1
    return 0


cdef class _Scratch:
    cdef int n, nt
    cdef int* smark
    cdef int* seen
    cdef int* rmark
    cdef int* stack
    cdef int* hmark
    cdef int* bseen
    cdef int* bstack
    cdef int* ctr

    def __cinit__(self, int n, int nt):
        self.n = n
        self.nt = nt
        self.smark = <int*> calloc(<size_t> nt * n + 1, sizeof(int))
        self.seen = <int*> calloc(<size_t> nt * 2 * n + 1, sizeof(int))
        self.rmark = <int*> calloc(<size_t> nt * n + 1, sizeof(int))
        self.stack = <int*> calloc(<size_t> nt * 2 * n + 1, sizeof(int))
        self.hmark = <int*> calloc(<size_t> nt * n + 1, sizeof(int))
        self.bseen = <int*> calloc(<size_t> nt * 2 * n + 1, sizeof(int))
        self.bstack = <int*> calloc(<size_t> nt * 2 * n + 1, sizeof(int))
        self.ctr = <int*> calloc(<size_t> nt + 1, sizeof(int))
        if not (self.smark and self.seen and self.rmark and self.stack and self.hmark
                and self.bseen and self.bstack and self.ctr):
            raise MemoryError()

    def __dealloc__(self):
        free(self.smark)
        free(self.seen)
        free(self.rmark)
        free(self.stack)
        free(self.hmark)
        free(self.bseen)
        free(self.bstack)
        free(self.ctr)


def _views(csr):
    indptr, nbr, mself, mnbr = csr
    return (np.ascontiguousarray(indptr, dtype=np.int32),
            np.ascontiguousarray(nbr, dtype=np.int32),
            np.ascontiguousarray(mself, dtype=np.int8),
            np.ascontiguousarray(mnbr, dtype=np.int8))


def _i32(a):
    return np.ascontiguousarray(a, dtype=np.int32)


def reachable(csr, int x, s_nodes):
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef int n = ip.shape[0] - 1
    cdef _Scratch sc = _Scratch(n, 1)
    cdef int s
    for s in s_nodes:
        sc.smark[s] = 1
    _ball(_ptr_i(ip), _ptr_i(nb), _ptr_b(ms), _ptr_b(mn), x, -1, sc.smark, 1,
          sc.seen, sc.rmark, 1, sc.stack)
    out = np.zeros(n, dtype=bool)
    cdef int v
    for v in range(n):
        if sc.rmark[v] == 1:
            out[v] = True
    return out


def connected(csr, int x, int y, s_nodes):
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef int n = ip.shape[0] - 1
    cdef _Scratch sc = _Scratch(n, 1)
    cdef int s
    for s in s_nodes:
        sc.smark[s] = 1
    return bool(_meet(_ptr_i(ip), _ptr_i(nb), _ptr_b(ms), _ptr_b(mn), x, y, sc.smark, 1,
                      sc.seen, sc.bseen, 1, sc.stack, sc.bstack))


# Empty edge arrays have no element 0; point at a dummy instead.
cdef int _dummy_i = 0
cdef i8 _dummy_b = 0


cdef inline const int* _ptr_i(const int[::1] a) noexcept:
    return &a[0] if a.shape[0] else &_dummy_i


cdef inline const i8* _ptr_b(const i8[::1] a) noexcept:
    return &a[0] if a.shape[0] else &_dummy_b


def pair_failures(csr, xs, ys, sep_indptr, sep_idx, int threads=1):
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef const int[::1] vx = _i32(xs)
    cdef const int[::1] vy = _i32(ys)
    cdef const int[::1] sp = _i32(sep_indptr)
    cdef const int[::1] si = _i32(sep_idx)
    cdef int n = ip.shape[0] - 1
    cdef Py_ssize_t m = vx.shape[0]
    cdef int nt = max(1, threads)
    cdef _Scratch sc = _Scratch(n, nt)
    out_arr = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef const int* pip = _ptr_i(ip)
    cdef const int* pnb = _ptr_i(nb)
    cdef const i8* pms = _ptr_b(ms)
    cdef const i8* pmn = _ptr_b(mn)
    cdef const int* psi = _ptr_i(si)
    cdef Py_ssize_t i
    cdef int tid, stamp, k
    cdef int* smark
    cdef int* seen
    cdef int* rmark
    cdef int* stack
    cdef int* b_smark = sc.smark
    cdef int* b_seen = sc.seen
    cdef int* b_rmark = sc.rmark
    cdef int* b_stack = sc.stack
    cdef int* ctr = sc.ctr
    cdef int* b_bseen = sc.bseen
    cdef int* b_bstack = sc.bstack
    cdef int* bseen
    cdef int* bstack
    if m == 0:
        return out_arr.astype(bool)
    for i in prange(m, nogil=True, schedule='dynamic', num_threads=nt):
        tid = threadid()
        smark = b_smark + tid * n
        seen = b_seen + tid * 2 * n
        rmark = b_rmark + tid * n
        stack = b_stack + tid * 2 * n
        bseen = b_bseen + tid * 2 * n
        bstack = b_bstack + tid * 2 * n
        ctr[tid] += 1
        stamp = ctr[tid]
        for k in range(sp[i], sp[i + 1]):
            smark[psi[k]] = stamp
        out[i] = _meet(pip, pnb, pms, pmn, vx[i], vy[i], smark, stamp, seen, bseen, stamp, stack, bstack)
    return out_arr.astype(bool)


def union_failures(csr, basis_indptr, basis_idx, h_indptr, h_idx, int threads=1, bint collect=False):
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef const int[::1] bp = _i32(basis_indptr)
    cdef const int[::1] bi = _i32(basis_idx)
    cdef const int[::1] hp = _i32(h_indptr)
    cdef const int[::1] hi = _i32(h_idx)
    cdef int n = ip.shape[0] - 1
    cdef int nt = max(1, threads)
    cdef _Scratch sc = _Scratch(n, nt)
    cnt_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] cnt = cnt_arr
    flags_arr = np.zeros((n * n) if collect else 1, dtype=np.uint8)
    cdef unsigned char[::1] flags = flags_arr
    cdef const int* pip = _ptr_i(ip)
    cdef const int* pnb = _ptr_i(nb)
    cdef const i8* pms = _ptr_b(ms)
    cdef const i8* pmn = _ptr_b(mn)
    cdef const int* pbi = _ptr_i(bi)
    cdef const int* phi = _ptr_i(hi)
    cdef int x, y, k, tid, stamp, hstamp
    cdef int* smark
    cdef int* seen
    cdef int* rmark
    cdef int* stack
    cdef int* hmark
    cdef int* b_smark = sc.smark
    cdef int* b_seen = sc.seen
    cdef int* b_rmark = sc.rmark
    cdef int* b_stack = sc.stack
    cdef int* b_hmark = sc.hmark
    cdef int* ctr = sc.ctr
    cdef int* b_bseen = sc.bseen
    cdef int* b_bstack = sc.bstack
    cdef int* bseen
    cdef int* bstack
    if n == 0:
        return 0, (np.zeros((0, 2), dtype=np.int64) if collect else None)
    for x in prange(n, nogil=True, schedule='dynamic', num_threads=nt):
        tid = threadid()
        smark = b_smark + tid * n
        seen = b_seen + tid * 2 * n
        rmark = b_rmark + tid * n
        stack = b_stack + tid * 2 * n
        bseen = b_bseen + tid * 2 * n
        bstack = b_bstack + tid * 2 * n
        hmark = b_hmark + tid * n
        ctr[tid] += 1
        hstamp = ctr[tid]
        for k in range(hp[x], hp[x + 1]):
            hmark[phi[k]] = hstamp
        for y in range(n):
            if y == x or hmark[y] == hstamp:
                continue
            ctr[tid] += 1
            stamp = ctr[tid]
            for k in range(bp[x], bp[x + 1]):
                smark[pbi[k]] = stamp
            for k in range(bp[y], bp[y + 1]):
                smark[pbi[k]] = stamp
            smark[x] = 0
            smark[y] = 0
            if _meet(pip, pnb, pms, pmn, x, y, smark, stamp, seen, bseen, stamp, stack, bstack):
                cnt[x] += 1
                if collect:
                    flags[x * n + y] = 1
    total = int(cnt_arr.sum())
    if not collect:
        return total, None
    idx = np.flatnonzero(flags_arr)
    return total, np.stack([idx // n, idx % n], axis=1).astype(np.int64)


def mb_outside_counts(csr, mb_indptr, mb_idx, int threads=1):
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef const int[::1] bp = _i32(mb_indptr)
    cdef const int[::1] bi = _i32(mb_idx)
    cdef int n = ip.shape[0] - 1
    cdef int nt = max(1, threads)
    cdef _Scratch sc = _Scratch(n, nt)
    cnt_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] cnt = cnt_arr
    cdef const int* pip = _ptr_i(ip)
    cdef const int* pnb = _ptr_i(nb)
    cdef const i8* pms = _ptr_b(ms)
    cdef const i8* pmn = _ptr_b(mn)
    cdef const int* pbi = _ptr_i(bi)
    cdef int x, k, tid, stamp
    cdef int* smark
    cdef int* seen
    cdef int* rmark
    cdef int* stack
    cdef int* b_smark = sc.smark
    cdef int* b_seen = sc.seen
    cdef int* b_rmark = sc.rmark
    cdef int* b_stack = sc.stack
    cdef int* ctr = sc.ctr
    cdef int* b_bseen = sc.bseen
    cdef int* b_bstack = sc.bstack
    cdef int* bseen
    cdef int* bstack
    if n == 0:
        return cnt_arr
    for x in prange(n, nogil=True, schedule='dynamic', num_threads=nt):
        tid = threadid()
        smark = b_smark + tid * n
        seen = b_seen + tid * 2 * n
        rmark = b_rmark + tid * n
        stack = b_stack + tid * 2 * n
        bseen = b_bseen + tid * 2 * n
        bstack = b_bstack + tid * 2 * n
        ctr[tid] += 1
        stamp = ctr[tid]
        for k in range(bp[x], bp[x + 1]):
            smark[pbi[k]] = stamp
        cnt[x] = _ball(pip, pnb, pms, pmn, x, -1, smark, stamp, seen, rmark, stamp, stack)
    return cnt_arr


def mb_fast_failures(csr, mb_indptr, mb_idx, h_indptr, h_idx, basis_indptr, basis_idx, int threads=1):
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef const int[::1] mp = _i32(mb_indptr)
    cdef const int[::1] mi = _i32(mb_idx)
    cdef const int[::1] hp = _i32(h_indptr)
    cdef const int[::1] hi = _i32(h_idx)
    cdef const int[::1] bp = _i32(basis_indptr)
    cdef const int[::1] bi = _i32(basis_idx)
    cdef int n = ip.shape[0] - 1
    cdef int nt = max(1, threads)
    cdef _Scratch sc = _Scratch(n, nt)
    cnt_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] cnt = cnt_arr
    cdef const int* pip = _ptr_i(ip)
    cdef const int* pnb = _ptr_i(nb)
    cdef const i8* pms = _ptr_b(ms)
    cdef const i8* pmn = _ptr_b(mn)
    cdef const int* pmi = _ptr_i(mi)
    cdef const int* phi = _ptr_i(hi)
    cdef const int* pbi = _ptr_i(bi)
    cdef int x, y, j, k, tid, stamp, hstamp
    cdef long long c
    cdef int* smark
    cdef int* seen
    cdef int* rmark
    cdef int* stack
    cdef int* hmark
    cdef int* b_smark = sc.smark
    cdef int* b_seen = sc.seen
    cdef int* b_rmark = sc.rmark
    cdef int* b_stack = sc.stack
    cdef int* b_hmark = sc.hmark
    cdef int* ctr = sc.ctr
    cdef int* b_bseen = sc.bseen
    cdef int* b_bstack = sc.bstack
    cdef int* bseen
    cdef int* bstack
    if n == 0:
        return 0
    for x in prange(n, nogil=True, schedule='dynamic', num_threads=nt):
        tid = threadid()
        smark = b_smark + tid * n
        seen = b_seen + tid * 2 * n
        rmark = b_rmark + tid * n
        stack = b_stack + tid * 2 * n
        bseen = b_bseen + tid * 2 * n
        bstack = b_bstack + tid * 2 * n
        hmark = b_hmark + tid * n
        ctr[tid] += 1
        stamp = ctr[tid]
        hstamp = stamp
        for k in range(mp[x], mp[x + 1]):
            smark[pmi[k]] = stamp
        c = _ball(pip, pnb, pms, pmn, x, -1, smark, stamp, seen, rmark, stamp, stack)
        for k in range(hp[x], hp[x + 1]):
            hmark[phi[k]] = hstamp
        for j in range(mp[x], mp[x + 1]):
            y = pmi[j]
            if hmark[y] == hstamp:
                continue
            ctr[tid] += 1
            stamp = ctr[tid]
            for k in range(bp[x], bp[x + 1]):
                smark[pbi[k]] = stamp
            for k in range(bp[y], bp[y + 1]):
                smark[pbi[k]] = stamp
            smark[x] = 0
            smark[y] = 0
            c = c + _meet(pip, pnb, pms, pmn, x, y, smark, stamp, seen, bseen, stamp, stack, bstack)
        cnt[x] = c
    return int(cnt_arr.sum())


cdef int _collider_nbrs(const int* indptr, const int* nbr, const i8* mself, const i8* mnbr,
                        int x, int* rmark, int* seen, int stamp, int* q) noexcept nogil:
    # nodes joined to x by an edge or a path whose middle nodes are colliders
    cdef int k, b, c, h = 0, t = 0, count = 0
    for k in range(indptr[x], indptr[x + 1]):
        b = nbr[k]
        if rmark[b] != stamp:
            rmark[b] = stamp
            count += 1
        if mnbr[k] == 1 and seen[b] != stamp:
            seen[b] = stamp
            q[t] = b
            t += 1
    while h < t:
        b = q[h]
        h += 1
        for k in range(indptr[b], indptr[b + 1]):
            if mself[k] != 1:
                continue
            c = nbr[k]
            if c == x:
                continue
            if rmark[c] != stamp:
                rmark[c] = stamp
                count += 1
            if mnbr[k] == 1 and seen[c] != stamp:
                seen[c] = stamp
                q[t] = c
                t += 1
    return count


def collider_neighbors(csr, int threads=1):
    """Per node, the sorted nodes joined to it by a collider path (its blanket)."""
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef int n = ip.shape[0] - 1
    cdef int nt = max(1, threads)
    cdef _Scratch sc = _Scratch(n, nt)
    counts_arr = np.zeros(n + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef const int* pip = _ptr_i(ip)
    cdef const int* pnb = _ptr_i(nb)
    cdef const i8* pms = _ptr_b(ms)
    cdef const i8* pmn = _ptr_b(mn)
    cdef int* b_rmark = sc.rmark
    cdef int* b_seen = sc.seen
    cdef int* b_stack = sc.stack
    cdef int* ctr = sc.ctr
    cdef int x, v, tid, stamp, pos
    cdef int* rmark
    cdef int* seen
    cdef int* q
    if n == 0:
        return np.zeros(1, dtype=np.int32), np.zeros(0, dtype=np.int32)
    for x in prange(n, nogil=True, schedule='dynamic', num_threads=nt):
        tid = threadid()
        rmark = b_rmark + tid * n
        seen = b_seen + tid * 2 * n
        q = b_stack + tid * 2 * n
        ctr[tid] += 1
        stamp = ctr[tid]
        counts[x + 1] = _collider_nbrs(pip, pnb, pms, pmn, x, rmark, seen, stamp, q)
    indptr_arr = np.cumsum(counts_arr).astype(np.int32)
    idx_arr = np.zeros(int(indptr_arr[-1]), dtype=np.int32)
    cdef const int[::1] indptr = indptr_arr
    cdef int[::1] idx = idx_arr
    cdef int* pidx = &idx[0] if idx.shape[0] else NULL
    for x in prange(n, nogil=True, schedule='dynamic', num_threads=nt):
        tid = threadid()
        rmark = b_rmark + tid * n
        seen = b_seen + tid * 2 * n
        q = b_stack + tid * 2 * n
        ctr[tid] += 1
        stamp = ctr[tid]
        _collider_nbrs(pip, pnb, pms, pmn, x, rmark, seen, stamp, q)
        pos = indptr[x]
        for v in range(n):
            if rmark[v] == stamp:
                pidx[pos] = v
                pos = pos + 1
    return indptr_arr, idx_arr


cdef int _reach_within(const int* indptr, const int* nbr, const i8* mself, const i8* mnbr,
                       int a, const int* keep, int kstamp, int* hit, int* ent, int stamp,
                       int* f, int* found) noexcept nogil:
    # collider-path neighbours of a inside the kept set, written to found
    cdef int k, b, c, h = 0, t = 0, count = 0
    for k in range(indptr[a], indptr[a + 1]):
        b = nbr[k]
        if keep[b] != kstamp:
            continue
        if hit[b] != stamp:
            hit[b] = stamp
            found[count] = b
            count += 1
        if mnbr[k] == 1 and ent[b] != stamp:
            ent[b] = stamp
            f[t] = b
            t += 1
    while h < t:
        b = f[h]
        h += 1
        for k in range(indptr[b], indptr[b + 1]):
            if mself[k] != 1:
                continue
            c = nbr[k]
            if c == a or keep[c] != kstamp:
                continue
            if hit[c] != stamp:
                hit[c] = stamp
                found[count] = c
                count += 1
            if mnbr[k] == 1 and ent[c] != stamp:
                ent[c] = stamp
                f[t] = c
                t += 1
    return count


cdef int _zl_one(const int* indptr, const int* nbr, const i8* mself, const i8* mnbr,
                 int x, int y, int* keep, int* near, int* vis, int stamp,
                 int* hit, int* ent, int* rctr, int* q, int* f, int* found, int* out) noexcept nogil:
    # -1 when x and y cannot be separated, else the separator size (in out)
    cdef int h = 0, t = 2, k, v, w, j, m, cnt = 0
    keep[x] = stamp
    keep[y] = stamp
    q[0] = x
    q[1] = y
    while h < t:
        v = q[h]
        h += 1
        for k in range(indptr[v], indptr[v + 1]):
            if mself[k] == 1 and mnbr[k] == 0:
                w = nbr[k]
                if keep[w] != stamp:
                    keep[w] = stamp
                    q[t] = w
                    t += 1
    rctr[0] += 1
    m = _reach_within(indptr, nbr, mself, mnbr, x, keep, stamp, hit, ent, rctr[0], f, found)
    for j in range(m):
        near[found[j]] = stamp
    if near[y] == stamp:
        return -1
    vis[y] = stamp
    q[0] = y
    h = 0
    t = 1
    while h < t:
        v = q[h]
        h += 1
        rctr[0] += 1
        m = _reach_within(indptr, nbr, mself, mnbr, v, keep, stamp, hit, ent, rctr[0], f, found)
        for j in range(m):
            w = found[j]
            if vis[w] == stamp:
                continue
            vis[w] = stamp
            if near[w] == stamp:
                out[cnt] = w
                cnt += 1
            else:
                q[t] = w
                t += 1
    return cnt


def zl_separators(csr, xs, ys, int threads=1):
    """Minimal separator nearest to ``xs[i]`` for each pair, or none.

    Returns ``(found, indptr, idx)``; see the pure-Python version.
    """
    cdef const int[::1] ip
    cdef const int[::1] nb
    cdef const i8[::1] ms
    cdef const i8[::1] mn
    ip, nb, ms, mn = _views(csr)
    cdef const int[::1] vx = _i32(xs)
    cdef const int[::1] vy = _i32(ys)
    cdef int n = ip.shape[0] - 1
    cdef Py_ssize_t m = vx.shape[0]
    cdef int nt = max(1, threads)
    cdef Py_ssize_t i
    cdef int tid, stamp, cnt
    cdef int* w
    cdef int* buf = <int*> calloc(<size_t> nt * 9 * n + 1, sizeof(int))
    cdef int* ctr = <int*> calloc(<size_t> nt * 2 + 1, sizeof(int))
    cdef int** res = <int**> calloc(<size_t> m + 1, sizeof(int*))
    lens_arr = np.zeros(m, dtype=np.int32)
    cdef int[::1] lens = lens_arr
    cdef const int* pip = _ptr_i(ip)
    cdef const int* pnb = _ptr_i(nb)
    cdef const i8* pms = _ptr_b(ms)
    cdef const i8* pmn = _ptr_b(mn)
    if not (buf and ctr and res):
        free(buf)
        free(ctr)
        free(res)
        raise MemoryError()
    try:
        for i in prange(m, nogil=True, schedule='dynamic', num_threads=nt):
            tid = threadid()
            w = buf + <size_t> tid * 9 * n
            ctr[2 * tid] += 1
            stamp = ctr[2 * tid]
            # keep, near, vis, hit, ent, q, f, found, out
            cnt = _zl_one(pip, pnb, pms, pmn, vx[i], vy[i], w, w + n, w + 2 * n, stamp,
                          w + 3 * n, w + 4 * n, &ctr[2 * tid + 1],
                          w + 5 * n, w + 6 * n, w + 7 * n, w + 8 * n)
            lens[i] = cnt
            if cnt > 0:
                res[i] = <int*> malloc(<size_t> cnt * sizeof(int))
                if res[i] != NULL:
                    memcpy(res[i], w + 8 * n, <size_t> cnt * sizeof(int))
        found = lens_arr >= 0
        sizes = np.where(found, lens_arr, 0)
        indptr = np.zeros(m + 1, dtype=np.int32)
        np.cumsum(sizes, out=indptr[1:])
        idx = np.zeros(int(indptr[-1]), dtype=np.int32)
        for i in range(m):
            if lens[i] > 0:
                if res[i] == NULL:
                    raise MemoryError()
                idx[indptr[i]:indptr[i + 1]] = sorted(res[i][j] for j in range(lens[i]))
        return found, indptr, idx
    finally:
        for i in range(m):
            free(res[i])
        free(res)
        free(buf)
        free(ctr)
