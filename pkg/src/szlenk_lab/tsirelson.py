"""The Figiel-Johnson norm on c00,

    ||x||_T = max{ ||x||_inf , sup_{k <= E_1 < ... < E_k} 1/2 sum_j ||E_j x||_T },

computed exactly, plus the witness constructions behind its Szlenk radii
r = 1 - eps/4 and R = 1.

The fast engine is an interval DP over runs of consecutive support
positions.  It rests on two reductions: blocks may be assumed to lie in the
support, and each block may be enlarged to the full run up to the next
block's minimum (the norm is 1-unconditional, so enlarging never lowers a
block norm, and it leaves every ``min E_j`` unchanged).  Only the prefix
before ``E_1`` is dropped.  ``t_norm_oracle`` searches all subset families
and is the independent check on that reduction.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from . import kernels
from .results import Leaf, NormResult, OracleCapError, Split, replay
from .vecspace import (
    BlockFamily,
    DomainError,
    FamilyKind,
    IndexSet,
    SparseVec,
    lp_norm,
)

ORACLE_CAP = 9
HALF = Fraction(1, 2)


def _prepare(v: SparseVec, exact):
    if exact is None:
        exact = v.is_exact
    if exact:
        a = [abs(Fraction(x)) for x in v.values]
    else:
        a = [abs(float(x)) for x in v.values]
    return exact, list(v.indices), a


def t_norm(v: SparseVec, exact: bool | None = None, witness: bool = True) -> NormResult:
    """Exact Tsirelson norm of ``v``.

    ``exact`` selects rational arithmetic (defaults to whether ``v`` holds
    only ints/Fractions).  With ``witness=False`` only the value is returned,
    which skips the partition reconstruction.
    """
    if not v:
        return NormResult(Fraction(0) if exact else 0.0, None)
    exact, idx, a = _prepare(v, exact)
    kern = kernels.for_values(exact)
    val, cs, ck = kern.t_table(idx, a)
    L = len(a)
    conv = (lambda x: x) if exact else float
    value = conv(val[0][L - 1])
    if not witness:
        return NormResult(value)

    def node(i, j):
        s = int(cs[i][j])
        if s < 0:
            p = max(range(i, j + 1), key=lambda q: (a[q], -q))
            return NormResult(conv(val[i][j]), Leaf(idx[p]))
        k = int(ck[i][j])
        runs = kern.partition(val, s, j, k)
        fam = BlockFamily(
            tuple(IndexSet(tuple(idx[lo:hi + 1])) for lo, hi in runs), FamilyKind.TSIRELSON
        )
        return NormResult(conv(val[i][j]), Split(fam, tuple(node(lo, hi) for lo, hi in runs)))

    root = node(0, L - 1)
    return NormResult(value, root.witness)


def witness_value(v: SparseVec, result: NormResult):
    """Re-evaluate a ``t_norm`` witness tree on ``v``."""
    weight = (lambda k: HALF) if result.value.__class__ is Fraction else (lambda k: 0.5)
    return replay(v, result, weight)


def t_norm_oracle(v: SparseVec, cap: int = ORACLE_CAP, exact: bool | None = None):
    """Exhaustive Tsirelson norm over all admissible families of arbitrary
    subsets of the support (memoised on subsets).  Single-block families
    are skipped, matching the engine."""
    if len(v) > cap:
        raise OracleCapError(f"support size {len(v)} exceeds oracle cap {cap}")
    if not v:
        return Fraction(0) if exact else 0.0
    exact, idx, a = _prepare(v, exact)
    half = HALF if exact else 0.5

    def above(S, E):
        return S & ~((1 << E.bit_length()) - 1)

    def low_index(E):
        return idx[(E & -E).bit_length() - 1]

    @lru_cache(maxsize=None)
    def value(S):
        best = max(a[p] for p in range(len(a)) if S >> p & 1)
        E = (S - 1) & S
        while E:
            K = low_index(E) - 1
            rest = above(S, E)
            if K >= 1 and rest:
                c = half * (value(E) + families(rest, K))
                if c > best:
                    best = c
            E = (E - 1) & S
        return best

    @lru_cache(maxsize=None)
    def families(T, K):
        # max over families of 1..K successive nonempty subsets of T
        best = None
        E = T
        while E:
            c = value(E)
            rest = above(T, E)
            if K > 1 and rest:
                c = c + families(rest, K - 1)
            if best is None or c > best:
                best = c
            E = (E - 1) & T
        return best

    return value((1 << len(a)) - 1)


def t_block_norm(a: int, m: int):
    """``||e_a + ... + e_{a+m-1}||_T`` for ``2 <= m <= a``; this equals m/2
    and the engine is checked against it."""
    if not (2 <= m <= a):
        raise DomainError(f"need 2 <= m <= a, got a={a}, m={m}")
    expected = Fraction(m, 2)
    got = t_norm(SparseVec.block(a, m, Fraction(1)), witness=False).value
    if got != expected:
        raise AssertionError(f"block norm {got} != {expected} for a={a}, m={m}")
    return expected


def perturbation_pair(x0: SparseVec, k: int, m: int, eps_prime):
    """``x0 +/- alpha (e_{N+k+1} + ... + e_{N+k+m})`` with
    ``alpha = eps' / (2N + m)`` and ``N = max supp x0``."""
    N = x0.max_support
    alpha = eps_prime / (2 * N + m)
    bump = SparseVec.block(N + k + 1, m, alpha)
    return x0 + bump, x0 - bump, alpha


def t_xnorm_certify(x0: SparseVec, k: int, m: int, eps_prime, tol: float = 1e-12) -> bool:
    """Check the perturbation pair at ``(k, m)`` against the norm bound

        ||x_{k,m,+-}|| <= max{1, m alpha / 2, (2N+m) alpha / 4}

    and the sharper bound ``max{||x0||_inf, alpha, m alpha/2,
    ||x0||_T + (2N+m) alpha / 4}`` that its proof gives, then confirm
    ``||x_+|| <= 1`` and ``||x_+ - x_-|| = m eps' / (2N+m)``.
    """
    N = x0.max_support
    if not (2 <= m <= N + k):
        raise DomainError(f"need 2 <= m <= N + k (N={N}, k={k}, m={m})")
    x0_norm = t_norm(x0, witness=False).value
    if not (x0_norm < 1 - eps_prime / 4):
        raise DomainError(f"need ||x0||_T < 1 - eps'/4, got {float(x0_norm)} >= {1 - eps_prime / 4}")
    plus, minus, alpha = perturbation_pair(x0, k, m, eps_prime)
    n_plus = t_norm(plus, witness=False).value
    n_minus = t_norm(minus, witness=False).value
    gap = t_norm(plus - minus, witness=False).value
    shown = max(1, m * alpha / 2, (2 * N + m) * alpha / 4)
    sharp = max(lp_norm(x0, math.inf) if x0 else 0, alpha, m * alpha / 2,
                x0_norm + (2 * N + m) * alpha / 4)
    want_gap = m * eps_prime / (2 * N + m)
    exact = x0.is_exact and isinstance(eps_prime, (int, Fraction))
    slack = 0 if exact else tol
    return (
        max(n_plus, n_minus) <= min(shown, sharp) + slack
        and max(n_plus, n_minus) <= 1 + slack
        and abs(gap - want_gap) <= slack
    )


def t_membership_witness(x0: SparseVec, eps: float, pairs: int = 2, eps_prime=None,
                         max_dim: int | None = None):
    """Membership certificate for ``x0`` in the eps-derivation of the dual
    ball, built from the pairs ``x_{m,m,+-}`` with ``m`` large enough that
    the gap ``m eps' / (2N+m)`` exceeds ``eps``.

    ``eps'`` defaults to 90% of the way from ``eps`` to its ceiling
    ``min(2, 4(1 - ||x0||))``.  ``max_dim`` bounds the support of the
    perturbation block; exceeding it raises ``DomainError``.
    """
    from .szlenk import DerivationCertificate

    if not (0 < eps < 2):
        raise DomainError("eps must lie in (0, 2)")
    x0 = x0.to_float()
    x0_norm = t_norm(x0, witness=False).value
    if not (x0_norm < 1 - eps / 4):
        raise DomainError(f"need ||x0||_T < 1 - eps/4 = {1 - eps / 4}, got {x0_norm}")
    ceiling = min(2.0, 4 * (1 - x0_norm))
    if eps_prime is None:
        eps_prime = eps + 0.9 * (ceiling - eps)
    if not (eps < eps_prime < ceiling):
        raise DomainError(f"need eps < eps' < {ceiling}, got eps'={eps_prime}")
    N = x0.max_support
    m0 = max(2, math.floor(2 * N * eps / (eps_prime - eps)) + 1)
    if max_dim is not None and m0 + pairs - 1 > max_dim:
        raise DomainError(f"perturbation size {m0 + pairs - 1} exceeds max_dim {max_dim}")
    pair_list = []
    for m in range(m0, m0 + pairs):
        plus, minus, _ = perturbation_pair(x0, m, m, eps_prime)
        pair_list.append((plus, minus))
    return DerivationCertificate(
        point=x0,
        eps=eps,
        pairs=tuple(pair_list),
        space="tsirelson",
        coord_horizon=max(N, 1),
        meta={"construction": "x0 +/- eps'/(2N+m) (e_{N+m+1}+...+e_{N+2m})",
              "eps_prime": eps_prime, "m_start": m0},
    )


def t_unit_certificate(eps: float, index: int = 1, pairs: int = 3):
    """Certificate that ``e_index`` lies in every eps-derivation: the pairs
    ``e_index +/- e_n`` have norm 1 and gap 2 (requires ``index`` = 1 so that
    ``e_1`` never shares an admissible family with a later coordinate)."""
    from .szlenk import DerivationCertificate

    if index != 1:
        raise DomainError("only e_1 is excluded from every admissible family")
    x0 = SparseVec.unit(1)
    pair_list = tuple((x0 + SparseVec.unit(n), x0 - SparseVec.unit(n)) for n in range(2, 2 + pairs))
    return DerivationCertificate(point=x0, eps=eps, pairs=pair_list, space="tsirelson",
                                 coord_horizon=1, meta={"construction": "e_1 +/- e_n"})


def tail_bound_samples(r: float, m: int, n: int, eps: float, eps_prime: float, delta: float,
                       rng, samples: int = 100, tail_len: int = 4):
    """Sample ``y`` with ``||y||_T <= 1`` and ``|y_i - x0_i| < delta`` for
    ``i <= n`` around ``x0 = r(e_m + e_n)`` and return the margins
    ``2(1 - r + n delta) - ||(I - P_n) y||_T`` (all must be >= 0)."""
    from .vecspace import head_proj, tail_proj

    if not (3 <= m < n):
        raise DomainError("need 3 <= m < n")
    if not (r > 1 - eps_prime / 4 and r <= 1):
        raise DomainError("need 1 - eps'/4 < r <= 1")
    if not (0 < delta < (eps - eps_prime) / (6 * n)):
        raise DomainError("need 0 < delta < (eps - eps')/(6n)")
    x0 = SparseVec.from_dict({m: r, n: r})
    bound = 2 * (1 - r + n * delta)
    margins = []
    while len(margins) < samples:
        head = {i: x0[i] + rng.uniform(-0.999 * delta, 0.999 * delta) for i in range(1, n + 1)}
        hv = SparseVec.from_dict(head)
        if t_norm(hv, witness=False).value > 1:
            continue
        size = int(rng.integers(1, tail_len + 1))
        where = sorted(rng.choice(range(n + 1, n + 3 * tail_len + 1), size=size, replace=False))
        tail = SparseVec.from_dict({int(i): float(rng.normal()) for i in where})
        top = _max_scale(hv, tail)
        scale = top if rng.random() < 0.5 else top * rng.random()
        y = hv + tail * scale
        assert head_proj(y, n) == hv
        margins.append(bound - t_norm(tail_proj(y, n), witness=False).value)
    return margins


def _max_scale(head: SparseVec, tail: SparseVec, norm=None, iters: int = 60) -> float:
    """Largest ``t >= 0`` with ``||head + t tail|| <= 1`` (bisection; the map
    is nondecreasing for disjoint supports by unconditionality)."""
    norm = norm or (lambda w: t_norm(w, witness=False).value)
    lo, hi = 0.0, 1.0
    while norm(head + tail * hi) <= 1:
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if norm(head + tail * mid) <= 1:
            lo = mid
        else:
            hi = mid
    return lo
