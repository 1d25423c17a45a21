"""The Schlumprecht norm

    ||x||_S = max{ ||x||_inf , sup_{E_1 < ... < E_n} 1/phi(n) sum_j ||E_j x||_S },
    phi(n) = log2(n + 1),

and the constructions that pin down the enclosing radius
R(eps) = min{1, log2 3 - eps/2} of the dual-ball derivations.

With no constraint tying the number of blocks to their position, every
family can be enlarged to a partition of the full run without changing
``n``, so the DP only partitions whole runs.
"""

from __future__ import annotations

import math
from functools import lru_cache

from . import kernels
from .results import Leaf, NormResult, OracleCapError, Split, replay
from .vecspace import (
    BlockFamily,
    DomainError,
    FamilyKind,
    IndexSet,
    SparseVec,
    head_proj,
    tail_proj,
)

ORACLE_CAP = 9
LOG2_3 = math.log2(3)


def phi(n: int) -> float:
    if n < 1:
        raise DomainError(f"phi needs n >= 1, got {n}")
    return math.log2(n + 1)


def _phi_table(L):
    return [1.0, 1.0] + [math.log2(n + 1) for n in range(2, L + 1)]


def s_norm(v: SparseVec, witness: bool = True) -> NormResult:
    if not v:
        return NormResult(0.0, None)
    idx = list(v.indices)
    a = [abs(float(x)) for x in v.values]
    L = len(a)
    kern = kernels.fast
    val, cn = kern.s_table(a, _phi_table(L))
    value = float(val[0][L - 1])
    if not witness:
        return NormResult(value)

    def node(i, j):
        n = int(cn[i][j])
        if n == 0:
            p = max(range(i, j + 1), key=lambda q: (a[q], -q))
            return NormResult(float(val[i][j]), Leaf(idx[p]))
        runs = kern.partition(val, i, j, n)
        fam = BlockFamily(
            tuple(IndexSet(tuple(idx[lo:hi + 1])) for lo, hi in runs), FamilyKind.SCHLUMPRECHT
        )
        return NormResult(float(val[i][j]), Split(fam, tuple(node(lo, hi) for lo, hi in runs)))

    return NormResult(value, node(0, L - 1).witness)


def witness_value(v: SparseVec, result: NormResult) -> float:
    return replay(v, result, lambda k: 1.0 / phi(k))


def s_norm_oracle(v: SparseVec, cap: int = ORACLE_CAP) -> float:
    """Exhaustive sup over all successive families of arbitrary subsets of
    the support with at least two blocks."""
    if len(v) > cap:
        raise OracleCapError(f"support size {len(v)} exceeds oracle cap {cap}")
    if not v:
        return 0.0
    a = [abs(float(x)) for x in v.values]

    def above(S, E):
        return S & ~((1 << E.bit_length()) - 1)

    @lru_cache(maxsize=None)
    def value(S):
        best = max(a[p] for p in range(len(a)) if S >> p & 1)
        E = (S - 1) & S
        while E:
            rest = above(S, E)
            if rest:
                for n in range(2, bin(S).count("1") + 1):
                    tail = exactly(rest, n - 1)
                    if tail is not None:
                        c = (value(E) + tail) / phi(n)
                        if c > best:
                            best = c
            E = (E - 1) & S
        return best

    @lru_cache(maxsize=None)
    def exactly(T, r):
        # max sum over exactly r successive nonempty subsets of T
        best = None
        E = T
        while E:
            if r == 1:
                c = value(E)
            else:
                rest = above(T, E)
                sub = exactly(rest, r - 1) if rest else None
                c = None if sub is None else value(E) + sub
            if c is not None and (best is None or c > best):
                best = c
            E = (E - 1) & T
        return best

    return value((1 << len(a)) - 1)


def s_R_curve(eps: float) -> float:
    if not (0 < eps < 2):
        raise DomainError("eps must lie in (0, 2)")
    return min(1.0, LOG2_3 - eps / 2)


def r_upper_term(n: int, eps: float) -> float:
    return (math.log2(n + 2) - eps / 2) / math.log2(n + 1)


def s_r_upper_bound(eps: float, n_max: int = 10**6, patience: int = 50):
    """Minimum over ``n <= n_max`` of ``(log2(n+2) - eps/2) / log2(n+1)``.

    Terms tend to 1, so the scan stops once ``patience`` consecutive terms
    have increased while staying above the running minimum.  Returns
    ``(value, argmin)``; extend ``n_max`` if ``argmin`` is close to it.
    """
    if not (0 < eps < 2):
        raise DomainError("eps must lie in (0, 2)")
    best, arg = r_upper_term(1, eps), 1
    prev = best
    rising = 0
    for n in range(2, n_max + 1):
        t = r_upper_term(n, eps)
        if t < best:
            best, arg = t, n
        rising = rising + 1 if (t > prev and t > best) else 0
        if rising >= patience:
            break
        prev = t
    return best, arg


def _proportional_form(x0: SparseVec):
    """``(r, n)`` when ``x0 = r (e_1 + ... + e_n)``, else ``None``."""
    if not x0:
        return 0.0, 0
    vals = set(float(x) for x in x0.values)
    if len(vals) == 1 and list(x0.indices) == list(range(1, len(x0) + 1)):
        r = vals.pop()
        if r > 0:
            return r, len(x0)
    return None


def s_membership_witness(x0: SparseVec, eps: float, pairs: int = 3, tol: float = 1e-12):
    """Membership certificate from the pairs ``x0 +/- (eps'/2) e_k``.

    For ``x0 = r e_1`` the admissible range is ``r < log2 3 - eps/2`` (and
    ``r <= 1``); there ``||x0 + c e_k|| = max{r, c, (r + c)/log2 3}`` and
    ``eps'`` is taken halfway between ``eps`` and its ceiling
    ``min(2, 2(log2 3 - r))``.  For ``x0 = r(e_1 + ... + e_n)`` the largest
    admissible amplitude is found by bisection on the computed norm.
    """
    from .szlenk import DerivationCertificate

    if not (0 < eps < 2):
        raise DomainError("eps must lie in (0, 2)")
    form = _proportional_form(x0)
    if form is None:
        raise DomainError("x0 must have the form r*e_1 or r*(e_1 + ... + e_n)")
    r, n = form
    x0 = x0.to_float()
    N = max(n, 1)
    if n <= 1:
        if not r < LOG2_3 - eps / 2:
            raise DomainError(f"need r < log2(3) - eps/2 = {LOG2_3 - eps / 2}, got r={r}")
        if r > 1:
            raise DomainError(f"need r <= 1, got {r}")
        ceiling = min(2.0, 2 * (LOG2_3 - r))
    else:
        if s_norm(x0, witness=False).value > 1 + tol:
            raise DomainError("need ||x0||_S <= 1")
        probe = SparseVec.unit(N + 1)

        def fits(c):
            return s_norm(x0 + probe * c, witness=False).value <= 1 + tol

        if not fits(eps / 2 * (1 + 1e-9)):
            raise DomainError("no amplitude above eps/2 keeps ||x0 +/- c e_k|| <= 1")
        lo, hi = eps / 2, 1.0
        if fits(hi):
            lo = hi
        else:
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                lo, hi = (mid, hi) if fits(mid) else (lo, mid)
        ceiling = 2 * lo
    eps_prime = eps + 0.5 * (ceiling - eps)
    c = eps_prime / 2
    pair_list = tuple(
        (x0 + SparseVec.unit(k, c), x0 - SparseVec.unit(k, c)) for k in range(N + 1, N + 1 + pairs)
    )
    return DerivationCertificate(
        point=x0, eps=eps, pairs=pair_list, space="schlumprecht", coord_horizon=N,
        meta={"construction": "x0 +/- (eps'/2) e_k", "eps_prime": eps_prime},
    )


def tail_margins(x0: SparseVec, eps: float, eps_prime: float, N: int, delta: float,
                 samples: int, rng, tail_len: int = 5, tol: float = 1e-12):
    """Sample ``y`` in the weak*-neighbourhood ``{|y_i - x0_i| < delta, i <= N}``
    of the dual ball and return the margins

        phi(2) - ||P_N x0|| + N delta - ||(I - P_N) y||

    which must all be nonnegative.  Preconditions are checked first and a
    violated one raises ``DomainError`` naming it.
    """
    x0 = x0.to_float()
    norm = lambda w: s_norm(w, witness=False).value
    x0_norm = norm(x0)
    head_norm = norm(head_proj(x0, N))
    checks = [
        (LOG2_3 - eps / 2 < x0_norm <= 1 + tol, "log2(3) - eps/2 < ||x0|| <= 1"),
        (2 * (LOG2_3 - 1) < eps_prime < eps, "2(log2(3) - 1) < eps' < eps"),
        (head_norm > LOG2_3 - eps_prime / 2, "||P_N x0|| > log2(3) - eps'/2"),
        (0 < delta < (eps - eps_prime) / (6 * N), "0 < delta < (eps - eps')/(6N)"),
    ]
    for ok, name in checks:
        if not ok:
            raise DomainError(f"precondition violated: {name}")
    bound = LOG2_3 - head_norm + N * delta
    margins = []
    while len(margins) < samples:
        head = SparseVec.from_dict(
            {i: float(x0[i]) + rng.uniform(-0.999 * delta, 0.999 * delta) for i in range(1, N + 1)}
        )
        if norm(head) > 1:
            continue
        size = int(rng.integers(1, tail_len + 1))
        where = sorted(rng.choice(range(N + 1, N + 4 * tail_len + 1), size=size, replace=False))
        tail = SparseVec.from_dict({int(i): float(rng.normal()) for i in where})
        top = _max_scale(head, tail, norm)
        scale = top if rng.random() < 0.5 else top * rng.random()
        y = head + tail * scale
        margins.append(bound - norm(tail_proj(y, N)))
    return margins


def s_tailbound_check(x0: SparseVec, eps: float, eps_prime: float, N: int, delta: float,
                      samples: int, rng=None, tol: float = 1e-12) -> bool:
    import numpy as np

    rng = rng if rng is not None else np.random.default_rng(0)
    return min(tail_margins(x0, eps, eps_prime, N, delta, samples, rng, tol=tol)) >= -tol


def _max_scale(head, tail, norm, iters: int = 50) -> float:
    lo, hi = 0.0, 1.0
    while norm(head + tail * hi) <= 1:
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if norm(head + tail * mid) <= 1 else (lo, mid)
    return lo
