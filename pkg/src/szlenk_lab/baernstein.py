"""The Baernstein norm

    ||x||_B = sup ( sum_i ||E_i x||_{l1}^2 )^(1/2)

over successive families ``E_1 < ... < E_n`` of admissible sets, where
``E`` is admissible when ``|E| <= min E``.

Three engines are provided.  ``b_norm_exact`` is a branch-and-bound over
subset families and is capped at small supports.  ``b_norm`` is exact with
no cap: once the smallest element ``p`` of a block and the position ``q``
the block must end by are fixed, the best block is ``p`` together with the
``idx[p] - 1`` largest magnitudes in ``(p, q]``, and a suffix DP over
``(p, q)`` does the rest.  ``b_norm_interval`` only uses consecutive runs
and is a lower bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from . import kernels
from .results import NormResult, OracleCapError, Split
from .vecspace import (
    DEFAULT_TOL,
    BlockFamily,
    DomainError,
    FamilyKind,
    IndexSet,
    SparseVec,
    head_proj,
    is_admissible,
    restrict,
    tail_proj,
)

EXACT_CAP = 14
MAX_N = 2048


def _arrays(v: SparseVec):
    return list(v.indices), [abs(float(x)) for x in v.values]


def _result(v, sumsq, blocks, lower_bound=False, engine=""):
    idx = v.indices
    fam = BlockFamily(tuple(IndexSet(tuple(idx[p] for p in b)) for b in blocks), FamilyKind.BAERNSTEIN)
    return NormResult(math.sqrt(sumsq), Split(fam), lower_bound, {"engine": engine})


def b_norm_exact(v: SparseVec, cap: int = EXACT_CAP) -> NormResult:
    if len(v) > cap:
        raise OracleCapError(f"support size {len(v)} exceeds exact cap {cap}")
    if not v:
        return NormResult(0.0)
    sumsq, blocks = kernels.fast.b_bnb(*_arrays(v))
    return _result(v, sumsq, blocks, engine="branch-and-bound")


def b_norm(v: SparseVec) -> NormResult:
    if not v:
        return NormResult(0.0)
    sumsq, blocks = kernels.fast.b_topk(*_arrays(v))
    return _result(v, sumsq, blocks, engine="top-k")


def b_norm_interval(v: SparseVec) -> NormResult:
    if not v:
        return NormResult(0.0, lower_bound=True)
    sumsq, blocks = kernels.fast.b_interval(*_arrays(v))
    return _result(v, sumsq, blocks, lower_bound=True, engine="interval")


def witness_value(v: SparseVec, result: NormResult) -> float:
    """Recompute ``(sum ||E_i v||_1^2)^(1/2)`` from the witness family."""
    if result.witness is None:
        return 0.0
    fam = result.witness.family
    if not is_admissible(fam):
        raise ValueError(f"inadmissible family in witness: {fam.to_jsonable()}")
    return math.sqrt(math.fsum(
        math.fsum(abs(float(x)) for x in restrict(v, b.indices).values) ** 2 for b in fam.blocks
    ))


def partlemma_check(v: SparseVec, n: int, cap: int | None = EXACT_CAP, tol: float = DEFAULT_TOL) -> bool:
    """``||x||^2 >= ||P_n x||^2 + ||(I - P_n) x||^2`` within ``tol``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    norm = b_norm if cap is None else (lambda w: b_norm_exact(w, cap))
    whole = norm(v).value
    head = norm(head_proj(v, n)).value
    tail = norm(tail_proj(v, n)).value
    return whole ** 2 >= head ** 2 + tail ** 2 - tol


def b_ball_radius(eps: float) -> float:
    if not (0 < eps < 2):
        raise DomainError(f"eps must lie in (0, 2), got {eps}")
    return math.sqrt(1 - (eps / 2) ** 2)


def perturbation(x0: SparseVec, n: int, delta: float, sign: int) -> SparseVec:
    return x0 + SparseVec.block(n, n, sign * delta / (2 * n))


def b_membership_witness(x0: SparseVec, eps: float, delta: float | None = None, n_start: int = 0,
                         pairs: int = 3, max_n: int = MAX_N, tol: float = DEFAULT_TOL):
    """Certificate from ``x_{n,+-} = x0 +- (delta/2n)(e_n + ... + e_{2n-1})``
    for ``n = n_start, ..., n_start + pairs - 1``.

    ``delta`` defaults to the midpoint of ``(eps, 2(1 - ||x0||^2)^(1/2))``.
    With ``n_start = 0`` the start is chosen by galloping from ``N + 1``
    (``N = max supp x0``) until every pair has exact norm ``<= 1``; the
    analytic bound ``||x_n||^2 <= theta + delta N^2 / n`` with
    ``theta = ||x0||^2 + delta^2/4`` caps the search.
    """
    from .szlenk import DerivationCertificate

    if not (0 < eps < 2):
        raise DomainError(f"eps must lie in (0, 2), got {eps}")
    x0 = x0.to_float()
    x0_norm = b_norm(x0).value
    radius = b_ball_radius(eps)
    if not x0_norm < radius:
        raise DomainError(f"need ||x0|| < (1-(eps/2)^2)^(1/2) = {radius}, got {x0_norm}")
    delta_max = 2 * math.sqrt(1 - x0_norm ** 2)
    if delta is None:
        delta = 0.5 * (eps + min(delta_max, 2.0))
    if not (eps < delta < 2):
        raise DomainError(f"need eps < delta < 2, got delta={delta}")
    if not x0_norm < math.sqrt(1 - (delta / 2) ** 2):
        raise DomainError(f"need ||x0|| < (1-(delta/2)^2)^(1/2) = {math.sqrt(1 - (delta / 2) ** 2)}")
    N = x0.max_support
    theta = x0_norm ** 2 + delta ** 2 / 4
    n_bound = max(N + 1, math.ceil(delta * N * N / (1 - theta)) if N else N + 1)

    def fits(n):
        return all(
            b_norm(perturbation(x0, m, delta, s)).value <= 1 + tol
            for m in range(n, n + pairs)
            for s in (1, -1)
        )

    if n_start:
        if n_start <= N:
            raise DomainError(f"need n_start > N = {N}")
        if n_start + pairs - 1 > max_n:
            raise DomainError(f"n_start + pairs - 1 exceeds max_n = {max_n}")
    else:
        n = N + 1
        while not fits(n):
            if n >= min(n_bound, max_n):
                raise DomainError(f"no start n <= {max_n} keeps ||x_n|| <= 1 (analytic bound {n_bound})")
            n = min(2 * n, n_bound, max_n)
        n_start = n
        if n_start + pairs - 1 > max_n:
            raise DomainError(f"n_start + pairs - 1 exceeds max_n = {max_n}")
    pair_list = tuple(
        (perturbation(x0, n, delta, 1), perturbation(x0, n, delta, -1))
        for n in range(n_start, n_start + pairs)
    )
    return DerivationCertificate(
        point=x0, eps=eps, pairs=pair_list, space="baernstein", coord_horizon=max(N, 1),
        meta={"construction": "x0 +/- (delta/2n)(e_n+...+e_{2n-1})", "delta": delta,
              "n_start": n_start, "analytic_n0": n_bound},
    )


@dataclass(frozen=True)
class MStarReport:
    first: tuple
    second: tuple
    verdict: str

    def to_jsonable(self):
        return {"first": [list(x) for x in self.first], "second": [list(x) for x in self.second],
                "verdict": self.verdict}


def mstar_failure_demo(ns=range(3, 11), tol: float = DEFAULT_TOL) -> MStarReport:
    """``||e_1 + e_n|| = 2^(1/2)`` while ``||(e_1+e_2)/2^(1/2) + e_n|| =
    (2 + 2^(1/2))^(1/2)``, although both base points have norm 1."""
    x0 = SparseVec.unit(1)
    y0 = SparseVec.from_pairs([(1, 1.0), (2, 1.0)]) * (1 / math.sqrt(2))
    first = tuple((n, b_norm_exact(x0 + SparseVec.unit(n)).value) for n in ns)
    second = tuple((n, b_norm_exact(y0 + SparseVec.unit(n)).value) for n in ns)
    a = {round(v, 9) for _, v in first}
    b = {round(v, 9) for _, v in second}
    consistent = len(a) == 1 and len(b) == 1 and abs(first[0][1] - second[0][1]) > tol
    verdict = "property (M*) falsified" if consistent else "inconclusive"
    return MStarReport(first, second, verdict)


def interval_gaps(vectors, cap: int = EXACT_CAP, tol: float = DEFAULT_TOL):
    """Instances where consecutive-run blocks lose against general
    admissible blocks: list of ``(vector, interval value, exact value)``."""
    out = []
    for v in vectors:
        lo = b_norm_interval(v).value
        hi = b_norm_exact(v, cap).value
        if lo < hi - tol:
            out.append((v, lo, hi))
    return out


def write_gap_report(gaps, path):
    with open(path, "w") as fh:
        json.dump([{"vector": v.to_jsonable(), "interval": lo, "exact": hi} for v, lo, hi in gaps],
                  fh, indent=1)
