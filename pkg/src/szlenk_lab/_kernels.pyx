# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels; mirror of ``_kernels_py`` (same arguments, same
return conventions, float64 only)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def t_table(idx, a):
    cdef long[:] ix = np.ascontiguousarray(idx, dtype=np.int_)
    cdef double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t L = av.shape[0]
    val_np = np.zeros((L, L), dtype=np.float64)
    cs_np = np.full((L, L), -1, dtype=np.int_)
    ck_np = np.zeros((L, L), dtype=np.int_)
    best_np = np.zeros((L + 1, L + 1), dtype=np.float64)
    cdef double[:, :] val = val_np
    cdef long[:, :] cs = cs_np
    cdef long[:, :] ck = ck_np
    cdef double[:, :] best = best_np
    cdef Py_ssize_t i, j, s, k, e, kmax
    cdef double bv, c, half, run_best, mx
    cdef long run_s, run_k
    cdef bint have_run
    with nogil:
        for j in range(L):
            have_run = False
            run_best = 0.0
            run_s = -1
            run_k = 0
            mx = -1.0
            for s in range(j, -1, -1):
                kmax = j - s + 1
                if ix[s] < kmax:
                    kmax = ix[s]
                for k in range(2, kmax + 1):
                    bv = -1.0
                    for e in range(s, j - k + 2):
                        c = val[s, e] + best[e + 1, k - 1]
                        if c > bv:
                            bv = c
                    best[s, k] = bv
                    half = bv / 2.0
                    if not have_run or half > run_best:
                        have_run = True
                        run_best = half
                        run_s = s
                        run_k = k
                if av[s] > mx:
                    mx = av[s]
                if have_run and run_best > mx:
                    val[s, j] = run_best
                    cs[s, j] = run_s
                    ck[s, j] = run_k
                else:
                    val[s, j] = mx
                best[s, 1] = val[s, j]
    return val_np, cs_np, ck_np


def s_table(a, phi):
    cdef double[:] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t L = av.shape[0]
    val_np = np.zeros((L, L), dtype=np.float64)
    cn_np = np.zeros((L, L), dtype=np.int_)
    best_np = np.zeros((L + 1, L + 1), dtype=np.float64)
    cdef double[:, :] val = val_np
    cdef long[:, :] cn = cn_np
    cdef double[:, :] best = best_np
    cdef Py_ssize_t j, s, n, e, length
    cdef double bv, c, top, mx
    cdef long top_n
    with nogil:
        for j in range(L):
            mx = -1.0
            for s in range(j, -1, -1):
                length = j - s + 1
                top = -1.0
                top_n = 0
                for n in range(2, length + 1):
                    bv = -1.0
                    for e in range(s, j - n + 2):
                        c = val[s, e] + best[e + 1, n - 1]
                        if c > bv:
                            bv = c
                    best[s, n] = bv
                    c = bv / ph[n]
                    if c > top:
                        top = c
                        top_n = n
                if av[s] > mx:
                    mx = av[s]
                if top_n > 0 and top > mx:
                    val[s, j] = top
                    cn[s, j] = top_n
                else:
                    val[s, j] = mx
                best[s, 1] = val[s, j]
    return val_np, cn_np


def partition(valarr, Py_ssize_t s, Py_ssize_t j, Py_ssize_t k):
    cdef double[:, :] val = np.ascontiguousarray(valarr, dtype=np.float64)
    cdef Py_ssize_t n = j - s + 1
    P_np = np.zeros((n + 1, k + 1), dtype=np.float64)
    arg_np = np.full((n + 1, k + 1), -1, dtype=np.int_)
    cdef double[:, :] P = P_np
    cdef long[:, :] arg = arg_np
    cdef Py_ssize_t p, r, e, rmax
    cdef double bv, c
    with nogil:
        for p in range(j, s - 1, -1):
            P[p - s, 1] = val[p, j]
            rmax = j - p + 1
            if k < rmax:
                rmax = k
            for r in range(2, rmax + 1):
                bv = -1.0
                for e in range(p, j - r + 2):
                    c = val[p, e] + P[e + 1 - s, r - 1]
                    if c > bv:
                        bv = c
                        arg[p - s, r] = e
                P[p - s, r] = bv
    runs = []
    p = s
    r = k
    while r > 1:
        e = arg[p - s, r]
        runs.append((p, e))
        p = e + 1
        r -= 1
    runs.append((p, j))
    return runs


cdef struct BnB:
    Py_ssize_t L
    long *idx
    double *a
    double *suffix
    double best
    int *choice
    int *best_choice


cdef void _bnb_rec(BnB *st, Py_ssize_t p, double acc, double cur, long cap) noexcept nogil:
    cdef double total, rest
    cdef Py_ssize_t q
    if p == st.L:
        total = acc + cur * cur
        if total > st.best:
            st.best = total
            for q in range(st.L):
                st.best_choice[q] = st.choice[q]
        return
    rest = cur + st.suffix[p]
    if acc + rest * rest <= st.best:
        return
    if cap > 0:
        st.choice[p] = 1
        _bnb_rec(st, p + 1, acc, cur + st.a[p], cap - 1)
    st.choice[p] = 2
    _bnb_rec(st, p + 1, acc + cur * cur, st.a[p], st.idx[p] - 1)
    st.choice[p] = 0
    _bnb_rec(st, p + 1, acc, cur, cap)


def b_bnb(idx, a):
    idx_np = np.ascontiguousarray(idx, dtype=np.int_)
    a_np = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t L = a_np.shape[0]
    suffix_np = np.zeros(L + 1, dtype=np.float64)
    suffix_np[:L] = np.cumsum(a_np[::-1])[::-1]
    choice_np = np.zeros(L, dtype=np.intc)
    best_choice_np = np.full(L, 2, dtype=np.intc)
    cdef long[:] ix = idx_np
    cdef double[:] av = a_np
    cdef double[:] sv = suffix_np
    cdef int[:] ch = choice_np
    cdef int[:] bch = best_choice_np
    cdef BnB st
    st.L = L
    st.best = float(np.dot(a_np, a_np))
    if L > 0:
        st.idx = &ix[0]
        st.a = &av[0]
        st.suffix = &sv[0]
        st.choice = &ch[0]
        st.best_choice = &bch[0]
        with nogil:
            _bnb_rec(&st, 0, 0.0, 0.0, 0)
    blocks = []
    for q in range(L):
        if bch[q] == 2:
            blocks.append([q])
        elif bch[q] == 1:
            blocks[len(blocks) - 1].append(q)
    return st.best, blocks


cdef inline void _sift_down(double *h, Py_ssize_t n, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t c
    cdef double t
    while True:
        c = 2 * i + 1
        if c >= n:
            return
        if c + 1 < n and h[c + 1] < h[c]:
            c += 1
        if h[c] >= h[i]:
            return
        t = h[c]
        h[c] = h[i]
        h[i] = t
        i = c


cdef inline void _sift_up(double *h, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t par
    cdef double t
    while i > 0:
        par = (i - 1) // 2
        if h[par] <= h[i]:
            return
        t = h[par]
        h[par] = h[i]
        h[i] = t
        i = par


def b_topk(idx, a):
    idx_np = np.ascontiguousarray(idx, dtype=np.int_)
    a_np = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t L = a_np.shape[0]
    D_np = np.zeros(L + 1, dtype=np.float64)
    span_np = np.full(L, -1, dtype=np.int_)
    heap_np = np.zeros(L + 1, dtype=np.float64)
    cdef long[:] ix = idx_np
    cdef double[:] av = a_np
    cdef double[:] D = D_np
    cdef long[:] span = span_np
    cdef double[:] heap = heap_np
    cdef Py_ssize_t p, q, hn
    cdef long cap
    cdef double extra, blk, c
    with nogil:
        for p in range(L - 1, -1, -1):
            D[p] = D[p + 1]
            cap = ix[p] - 1
            hn = 0
            extra = 0.0
            for q in range(p, L):
                if q > p and cap > 0:
                    if hn < cap:
                        heap[hn] = av[q]
                        _sift_up(&heap[0], hn)
                        hn += 1
                        extra += av[q]
                    elif av[q] > heap[0]:
                        extra += av[q] - heap[0]
                        heap[0] = av[q]
                        _sift_down(&heap[0], hn, 0)
                blk = av[p] + extra
                c = blk * blk + D[q + 1]
                if c > D[p]:
                    D[p] = c
                    span[p] = q
    blocks = []
    p = 0
    while p < L:
        q = span[p]
        if q < 0:
            p += 1
            continue
        cap = ix[p] - 1
        chosen = sorted(range(p + 1, q + 1), key=lambda t: (-a_np[t], t))[:cap]
        blocks.append([p] + sorted(chosen))
        p = q + 1
    return D[0], blocks


def b_interval(idx, a):
    idx_np = np.ascontiguousarray(idx, dtype=np.int_)
    a_np = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t L = a_np.shape[0]
    D_np = np.zeros(L + 1, dtype=np.float64)
    span_np = np.full(L, -1, dtype=np.int_)
    cdef long[:] ix = idx_np
    cdef double[:] av = a_np
    cdef double[:] D = D_np
    cdef long[:] span = span_np
    cdef Py_ssize_t p, q, qend
    cdef double blk, c
    with nogil:
        for p in range(L - 1, -1, -1):
            D[p] = D[p + 1]
            blk = 0.0
            qend = p + ix[p]
            if qend > L:
                qend = L
            for q in range(p, qend):
                blk = blk + av[q]
                c = blk * blk + D[q + 1]
                if c > D[p]:
                    D[p] = c
                    span[p] = q
    blocks = []
    p = 0
    while p < L:
        if span[p] < 0:
            p += 1
            continue
        blocks.append(list(range(p, span[p] + 1)))
        p = span[p] + 1
    return D[0], blocks
