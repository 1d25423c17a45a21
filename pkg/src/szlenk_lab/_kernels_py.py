"""Pure-Python kernels.

Every routine works on the *positions* ``0..L-1`` of a support, with
``idx[p]`` the 1-based coordinate index at position ``p`` and ``a[p] >= 0``
the coordinate magnitude.  Arithmetic is generic, so the same code runs on
floats or on ``Fraction`` values (exact Tsirelson mode).

The compiled module ``_kernels`` implements the float versions of the same
functions with the same return conventions.
"""

from __future__ import annotations

import heapq


def t_table(idx, a):
    """Interval DP for the Tsirelson norm.

    Returns ``(val, cs, ck)`` where ``val[i][j]`` is the norm of the
    restriction to positions ``i..j`` and, when that value is attained by a
    block family, ``cs[i][j]``/``ck[i][j]`` give the first position of the
    family and its block count (``cs == -1`` marks the sup-norm term).
    """
    L = len(a)
    val = [[None] * L for _ in range(L)]
    cs = [[-1] * L for _ in range(L)]
    ck = [[0] * L for _ in range(L)]
    for j in range(L):
        # best[s][k]: max sum of block norms over partitions of s..j into k runs
        best = [None] * (j + 2)
        run_best = None
        run_s = -1
        run_k = 0
        mx = None
        for s in range(j, -1, -1):
            kmax = min(idx[s], j - s + 1)
            row = [None] * (max(kmax, 1) + 1)
            for k in range(2, kmax + 1):
                bv = None
                for e in range(s, j - k + 2):
                    c = val[s][e] + best[e + 1][k - 1]
                    if bv is None or c > bv:
                        bv = c
                row[k] = bv
                half = bv / 2
                if run_best is None or half > run_best:
                    run_best, run_s, run_k = half, s, k
            if mx is None or a[s] > mx:
                mx = a[s]
            if run_best is not None and run_best > mx:
                val[s][j] = run_best
                cs[s][j] = run_s
                ck[s][j] = run_k
            else:
                val[s][j] = mx
            row[1] = val[s][j]
            best[s] = row
    return val, cs, ck


def s_table(a, phi):
    """Interval DP for the Schlumprecht norm; ``phi[n]`` is the weight of an
    ``n``-block family.  Returns ``(val, cn)`` with ``cn[i][j] == 0`` for the
    sup-norm term and the block count otherwise."""
    L = len(a)
    val = [[None] * L for _ in range(L)]
    cn = [[0] * L for _ in range(L)]
    for j in range(L):
        best = [None] * (j + 2)
        mx = None
        for s in range(j, -1, -1):
            length = j - s + 1
            row = [None] * (length + 1)
            top = None
            top_n = 0
            for n in range(2, length + 1):
                bv = None
                for e in range(s, j - n + 2):
                    c = val[s][e] + best[e + 1][n - 1]
                    if bv is None or c > bv:
                        bv = c
                row[n] = bv
                c = bv / phi[n]
                if top is None or c > top:
                    top, top_n = c, n
            if mx is None or a[s] > mx:
                mx = a[s]
            if top is not None and top > mx:
                val[s][j] = top
                cn[s][j] = top_n
            else:
                val[s][j] = mx
            row[1] = val[s][j]
            best[s] = row
    return val, cn


def partition(val, s, j, k):
    """Split positions ``s..j`` into ``k`` consecutive runs maximising the
    sum of ``val`` over the runs.  Returns the list of ``(lo, hi)`` runs."""
    # P[p][r]: best sum for p..j using exactly r runs
    P = {}
    arg = {}
    for p in range(j, s - 1, -1):
        P[p, 1] = val[p][j]
        for r in range(2, min(k, j - p + 1) + 1):
            bv = None
            be = -1
            for e in range(p, j - r + 2):
                c = val[p][e] + P[e + 1, r - 1]
                if bv is None or c > bv:
                    bv, be = c, e
            P[p, r] = bv
            arg[p, r] = be
    runs = []
    p, r = s, k
    while r > 1:
        e = arg[p, r]
        runs.append((p, e))
        p, r = e + 1, r - 1
    runs.append((p, j))
    return runs


def b_bnb(idx, a):
    """Exhaustive branch-and-bound for the Baernstein sup.

    Walks positions left to right choosing skip / extend the open block /
    open a new block here.  Returns ``(sum of squared block l1 sums, blocks)``
    where blocks are lists of positions.
    """
    L = len(a)
    suffix = [0] * (L + 1)
    for p in range(L - 1, -1, -1):
        suffix[p] = suffix[p + 1] + a[p]
    best = sum(x * x for x in a)
    best_blocks = [[p] for p in range(L)]
    choice = [0] * L  # 0 skip, 1 extend, 2 open

    def rec(p, acc, cur, cap):
        nonlocal best, best_blocks
        if p == L:
            total = acc + cur * cur
            if total > best:
                best = total
                best_blocks = _blocks_from_choices(choice)
            return
        rest = cur + suffix[p]
        if acc + rest * rest <= best:
            return
        if cap > 0:
            choice[p] = 1
            rec(p + 1, acc, cur + a[p], cap - 1)
        choice[p] = 2
        rec(p + 1, acc + cur * cur, a[p], idx[p] - 1)
        choice[p] = 0
        rec(p + 1, acc, cur, cap)
        choice[p] = 0

    rec(0, 0 * best, 0 * best, 0)
    return best, best_blocks


def _blocks_from_choices(choice):
    blocks = []
    for p, c in enumerate(choice):
        if c == 2:
            blocks.append([p])
        elif c == 1:
            blocks[-1].append(p)
    return blocks


def b_topk(idx, a):
    """Exact Baernstein sup by a suffix DP over block spans.

    A block whose smallest element sits at position ``p`` and whose elements
    end by position ``q`` is best filled with ``a[p]`` plus the ``idx[p]-1``
    largest magnitudes in ``p+1..q``.  Returns ``(sum of squares, blocks)``.
    """
    L = len(a)
    zero = 0 * (a[0] if L else 0)
    D = [zero] * (L + 1)
    span = [-1] * L
    for p in range(L - 1, -1, -1):
        D[p] = D[p + 1]
        cap = idx[p] - 1
        heap = []
        extra = zero
        for q in range(p, L):
            if q > p and cap > 0:
                if len(heap) < cap:
                    heapq.heappush(heap, a[q])
                    extra += a[q]
                elif a[q] > heap[0]:
                    extra += a[q] - heapq.heapreplace(heap, a[q])
            blk = a[p] + extra
            c = blk * blk + D[q + 1]
            if c > D[p]:
                D[p] = c
                span[p] = q
    blocks = []
    p = 0
    while p < L:
        q = span[p]
        # span[p] < 0 means no block opened at p beat skipping it
        if q < 0:
            p += 1
            continue
        cap = idx[p] - 1
        chosen = sorted(range(p + 1, q + 1), key=lambda t: (-a[t], t))[:cap]
        blocks.append([p] + sorted(chosen))
        p = q + 1
    return D[0], blocks


def b_interval(idx, a):
    """Lower bound for the Baernstein sup using blocks that are consecutive
    runs of support positions."""
    L = len(a)
    zero = 0 * (a[0] if L else 0)
    D = [zero] * (L + 1)
    span = [-1] * L
    for p in range(L - 1, -1, -1):
        D[p] = D[p + 1]
        blk = zero
        for q in range(p, min(L, p + idx[p])):
            blk += a[q]
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
