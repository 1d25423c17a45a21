"""Orlicz sequence space for ``M(t) = A t^4 + B t^2``.

The Luxemburg norm solves ``lambda^4 - B lambda^2 ||x||_2^2 - A ||x||_4^4 = 0``,
so ``||x|| = (f(x)/2)^(1/2)`` with
``f(x) = B ||x||_2^2 + (B^2 ||x||_2^4 + 4A ||x||_4^4)^(1/2)``.

Most of the module works in the reduced form ``B = 1`` with parameter
``Ared = 4A/B^2``, where ``f(x) = ||x||_2^2 + (||x||_2^4 + Ared ||x||_4^4)^(1/2)``;
the ``(A, B)`` norm is ``B^(1/2)`` times the reduced one.

Here ``c = 1 + (1 + Ared)^(1/2)`` and ``r = (c/2)^(1/2)`` is the common norm of
``x0 = e_1`` and ``y0 = alpha_n (e_1 + ... + e_n)``.  ``U``, ``V`` and the
interpolants all equal ``2 r^2`` at ``x = 0``, so they are evaluated through
their excess over ``2 r^2`` to avoid cancellation for small arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .parallel import ordered_map
from .rng import stream
from .vecspace import DEFAULT_TOL, DomainError, SparseVec

GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class OrliczParams:
    A: float
    B: float = 1.0

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0):
            raise DomainError(f"need A > 0 and B > 0, got A={self.A}, B={self.B}")

    @property
    def reduced(self) -> float:
        return 4 * self.A / self.B ** 2

    @classmethod
    def from_reduced(cls, Ared: float, B: float = 1.0) -> "OrliczParams":
        return cls(Ared * B * B / 4, B)


def _moments(v: SparseVec):
    vals = [float(x) for x in v.values]
    return math.fsum(x * x for x in vals), math.fsum(x ** 4 for x in vals)


def f_value(v: SparseVec, p: OrliczParams) -> float:
    s, q = _moments(v)
    return p.B * s + math.sqrt((p.B * s) ** 2 + 4 * p.A * q)


def closed_form_norm(v: SparseVec, p: OrliczParams) -> float:
    return math.sqrt(f_value(v, p) / 2)


def f_reduced(v: SparseVec, Ared: float) -> float:
    s, q = _moments(v)
    return s + math.sqrt(s * s + Ared * q)


def norm_reduced(v: SparseVec, Ared: float) -> float:
    return math.sqrt(f_reduced(v, Ared) / 2)


def luxemburg_oracle(v: SparseVec, p: OrliczParams, xtol: float = 1e-13) -> float:
    """Bisection for ``lambda`` with ``sum M(|x_i| / lambda) = 1``."""
    if not v:
        raise DomainError("the zero vector has no positive Luxemburg root")
    a = np.abs(np.array([float(x) for x in v.values]))

    def excess(lam):
        t = a / lam
        return math.fsum(p.A * t ** 4 + p.B * t ** 2) - 1

    s, q = _moments(v)
    lo = max(math.sqrt(p.B * s), (p.A * q) ** 0.25)
    hi = 2 * lo
    while excess(hi) > 0:
        hi *= 2
    if excess(lo) <= 0:
        return lo
    return optimize.bisect(excess, lo, hi, xtol=xtol * lo, rtol=4 * np.finfo(float).eps, maxiter=400)


def _c(Ared):
    return 1 + math.sqrt(1 + Ared)


def r_value(Ared: float) -> float:
    return math.sqrt(_c(Ared) / 2)


def alpha_n(n: int, Ared: float) -> float:
    if n < 1:
        raise DomainError("n must be >= 1")
    return math.sqrt(_c(Ared) / (n + math.sqrt(n * n + Ared * n)))


def n_alpha_sq(n: int, Ared: float) -> float:
    return n * alpha_n(n, Ared) ** 2


def n_alpha_sq_limit(Ared: float) -> float:
    return _c(Ared) / 2


def smallest_n(Ared: float) -> int:
    """Smallest ``n`` with ``n alpha_n^2 > 1``."""
    n = 1
    while n_alpha_sq(n, Ared) <= 1:
        n += 1
    return n


def y0(n: int, Ared: float) -> SparseVec:
    return SparseVec.block(1, n, alpha_n(n, Ared))


def _P0(n, Ared):
    return (n * n + Ared * n) * alpha_n(n, Ared) ** 4


def F_objective(s, t, n, Ared):
    na = n_alpha_sq(n, Ared)
    return na + s + math.sqrt(_P0(n, Ared) + 2 * na * s + s * s + Ared * t * t)


def g(s, t, mu, Ared):
    return s + math.sqrt(s * s + Ared * t * t) - mu


def h1(s, t):
    return -t


def h2(s, t):
    return t - s


def V1(mu, n, Ared):
    na = n_alpha_sq(n, Ared)
    return na + mu / 2 + math.sqrt(_P0(n, Ared) + na * mu + mu * mu / 4)


def V2(mu, n, Ared):
    na = n_alpha_sq(n, Ared)
    c = _c(Ared)
    return na + mu / c + math.sqrt(_P0(n, Ared) + 2 * na * mu / c + (1 + Ared) * mu * mu / c ** 2)


def V_function(x, n, Ared):
    return 2 * r_value(Ared) ** 2 + V_excess(x, n, Ared)


def U_function(x, Ared):
    return 2 * r_value(Ared) ** 2 + U_excess(x, Ared)


def V_excess(x, n, Ared):
    c = _c(Ared)
    na = n_alpha_sq(n, Ared)
    P0 = _P0(n, Ared)
    extra = 4 * na / c * x * x + 4 * (1 + Ared) / c ** 2 * x ** 4
    return 2 / c * x * x + extra / (math.sqrt(P0 + extra) + math.sqrt(P0))


def U_excess(x, Ared):
    c = _c(Ared)
    extra = 4 / c * x * x + 4 * (1 + Ared) / c ** 2 * x ** 4
    return 2 / c * x * x + extra / (math.sqrt(1 + Ared + extra) + math.sqrt(1 + Ared))


def increasing_h(t, a, b):
    """``(a + t)^(1/2) - (b + t)^(1/2)``, strictly increasing for ``0 < a < b``."""
    return math.sqrt(a + t) - math.sqrt(b + t)


@dataclass(frozen=True)
class KktReport:
    n: int
    Ared: float
    mu: float
    V1: float
    V2: float
    grid_min: float
    argmin: tuple
    case_label: str
    endpoint_t0: float
    tol: float = 1e-8

    @property
    def ok(self) -> bool:
        return (abs(self.grid_min - self.V2) <= self.tol and abs(self.endpoint_t0 - self.V1) <= self.tol
                and self.V2 < self.V1 and self.case_label == "boundary_t_eq_s")

    def to_jsonable(self):
        return {"n": self.n, "Ared": self.Ared, "mu": self.mu, "V1": self.V1, "V2": self.V2,
                "gridMin": self.grid_min, "argmin": list(self.argmin), "caseLabel": self.case_label,
                "endpointT0": self.endpoint_t0}


def golden_section(fn, lo, hi, xtol=1e-10):
    """Minimise a unimodal ``fn`` on ``[lo, hi]``; returns ``(x, fn(x))``
    with the endpoints included as candidates."""
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = fn(x2)
    mid = 0.5 * (a + b)
    return min(((x, fn(x)) for x in (lo, mid, hi)), key=lambda p: p[1])


def kkt_minimize(mu, n, Ared, grid: int = 2001, tol: float = 1e-8) -> KktReport:
    """Minimise ``F`` over ``{g = 0, 0 <= t <= s}``.

    On ``g = 0`` the first coordinate is ``s(t) = (mu^2 - Ared t^2)/(2 mu)`` and
    ``t <= s`` holds exactly for ``t <= mu/c``; a grid scan picks the best cell
    and golden-section search refines it.
    """
    if not (mu > 0 and n >= 1 and Ared > 0):
        raise DomainError(f"need mu > 0, n >= 1, Ared > 0; got mu={mu}, n={n}, Ared={Ared}")
    t_max = mu / _c(Ared)
    s_of = lambda t: (mu * mu - Ared * t * t) / (2 * mu)
    obj = lambda t: F_objective(s_of(t), t, n, Ared)
    ts = np.linspace(0.0, t_max, grid)
    vals = [obj(t) for t in ts]
    k = int(np.argmin(vals))
    lo = ts[max(k - 1, 0)]
    hi = ts[min(k + 1, grid - 1)]
    t_star, best = golden_section(obj, lo, hi, xtol=1e-10 * max(t_max, 1e-300))
    # on the boundary t = t_max the two coordinates coincide
    span = max(t_max, 1e-300)
    if t_star >= t_max - 1e-6 * span:
        t_star, label = t_max, "boundary_t_eq_s"
        best = min(best, F_objective(t_max, t_max, n, Ared))
    elif t_star <= 1e-6 * span:
        label = "boundary_t_eq_0"
    else:
        label = "interior"
    s_star = t_max if label == "boundary_t_eq_s" else s_of(t_star)
    return KktReport(n, Ared, mu, V1(mu, n, Ared), V2(mu, n, Ared), best, (s_star, t_star), label,
                     obj(0.0), tol)


def _claim_chunk(n, Ared, count, rng, max_support=12):
    """Vectorised margins ``f(y0 + u) - V(||u||)`` for ``count`` samples of
    ``u`` supported beyond ``n``.  Only the values of ``u`` matter (the
    norm is symmetric), so supports are represented by value rows."""
    k = rng.integers(1, max_support + 1, size=count)
    kind = rng.integers(0, 4, size=count)
    scale = 10 ** rng.uniform(-3, 1, size=count)
    vals = rng.standard_normal((count, max_support))
    vals[kind == 1] = 1.0  # flat
    heavy = kind == 2
    vals[heavy] = rng.standard_cauchy((int(heavy.sum()), max_support))
    vals[kind == 3, 1:] = 0.0  # single coordinate, where the bound is tight
    mask = np.arange(max_support)[None, :] < k[:, None]
    vals = np.where(mask, vals, 0.0)
    norms = np.sqrt((vals ** 2).sum(axis=1))
    norms[norms == 0] = 1.0
    vals = vals / norms[:, None] * scale[:, None]
    s_u = (vals ** 2).sum(axis=1)
    q_u = (vals ** 4).sum(axis=1)
    na = n_alpha_sq(n, Ared)
    a4 = n * alpha_n(n, Ared) ** 4
    S = na + s_u
    f_total = S + np.sqrt(S * S + Ared * (a4 + q_u))
    u_norm = np.sqrt((s_u + np.sqrt(s_u * s_u + Ared * q_u)) / 2)
    V = np.array([V_function(x, n, Ared) for x in u_norm])
    return f_total - V, vals


@dataclass(frozen=True)
class ClaimReport:
    n: int
    Ared: float
    samples: int
    min_margin: float
    violations: int
    direct_checked: int
    direct_max_error: float
    n_alpha_sq: float
    slack: float

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.direct_max_error < 1e-9

    def to_jsonable(self):
        return dict(self.__dict__)


def claim_report(n: int, Ared: float, sample_count: int, seed: int = 0, slack: float = 1e-10,
                 chunk: int = 2500, direct: int = 50) -> ClaimReport:
    """Sample ``u`` with ``supp u`` beyond ``n`` and check
    ``f(y0 + u) >= V(||u||)``.  The first ``direct`` samples of every chunk
    are re-evaluated through sparse vectors with advancing supports."""
    if sample_count < 1:
        raise DomainError("sample_count must be >= 1")
    chunks = [(i, min(chunk, sample_count - i * chunk)) for i in range(-(-sample_count // chunk))]

    def run(item):
        cid, count = item
        rng = stream(seed, "claim", n, repr(Ared), cid)
        margins, vals = _claim_chunk(n, Ared, count, rng)
        base = y0(n, Ared)
        err = 0.0
        for j in range(min(direct, count)):
            row = vals[j][vals[j] != 0]
            start = n + 1 + j
            u = SparseVec.from_pairs([(start + i, float(x)) for i, x in enumerate(row)])
            lhs = f_reduced(base + u, Ared)
            rhs = V_function(norm_reduced(u, Ared), n, Ared)
            err = max(err, abs((lhs - rhs) - margins[j]))
        return margins, err, min(direct, count)

    parts = ordered_map(run, chunks)
    margins = np.concatenate([p[0] for p in parts])
    return ClaimReport(n, Ared, sample_count, float(margins.min()), int((margins < -slack).sum()),
                       sum(p[2] for p in parts), max(p[1] for p in parts), n_alpha_sq(n, Ared), slack)


def claim_check(n: int, Ared: float, sample_count: int, seed: int = 0, slack: float = 1e-10) -> bool:
    return claim_report(n, Ared, sample_count, seed, slack).ok


def log_grid(lo=1e-6, hi=1e6, count=241):
    return list(np.logspace(math.log10(lo), math.log10(hi), count))


def _require_large_n(n, Ared):
    if not n_alpha_sq(n, Ared) > 1:
        raise DomainError(f"need n alpha_n^2 > 1, got {n_alpha_sq(n, Ared)} at n={n}")


def u_lt_v_check(n: int, Ared: float, grid=None) -> bool:
    _require_large_n(n, Ared)
    grid = log_grid() if grid is None else grid
    return all(U_excess(x, Ared) < V_excess(x, n, Ared) for x in grid)


@dataclass(frozen=True)
class PhiPsi:
    """``phi(delta) = (Vt(delta)/2)^(1/2) - r``, ``psi(delta) = (Ut(delta)/2)^(1/2) - r``
    built from ``Ut = (2U + W)/3`` and ``Vt = (U + 2W)/3`` with
    ``W = min(V, 2(r + x)^2)``."""

    n: int
    Ared: float
    r: float
    chain_failures: tuple = field(default=(), compare=False)

    def _w_excess(self, x):
        return min(V_excess(x, self.n, self.Ared), 4 * self.r * x + 2 * x * x)

    def Ut_excess(self, x):
        return (2 * U_excess(x, self.Ared) + self._w_excess(x)) / 3

    def Vt_excess(self, x):
        return (U_excess(x, self.Ared) + 2 * self._w_excess(x)) / 3

    def U_tilde(self, x):
        return 2 * self.r ** 2 + self.Ut_excess(x)

    def V_tilde(self, x):
        return 2 * self.r ** 2 + self.Vt_excess(x)

    def _lift(self, excess):
        # (2r^2 + e)/2)^(1/2) - r without cancellation
        h = excess / 2
        return h / (math.sqrt(self.r ** 2 + h) + self.r)

    def phi(self, delta):
        return self._lift(self.Vt_excess(delta))

    def psi(self, delta):
        return self._lift(self.Ut_excess(delta))


def build_phi_psi(n: int, Ared: float, grid=None) -> PhiPsi:
    """Construct ``phi``, ``psi`` and validate on ``grid``:
    ``U < Ut < Vt < V``, ``Ut < 2(r+x)^2`` and ``psi < min(delta, phi)``.
    Raises ``ArithmeticError`` naming the first offending ``x``.  Grid points
    where ``2(r+x)^2 < V`` fails are recorded in ``chain_failures``."""
    _require_large_n(n, Ared)
    r = r_value(Ared)
    pp = PhiPsi(n, Ared, r)
    grid = log_grid() if grid is None else grid
    failures = []
    for x in grid:
        u, v = U_excess(x, Ared), V_excess(x, n, Ared)
        ut, vt = pp.Ut_excess(x), pp.Vt_excess(x)
        sq = 4 * r * x + 2 * x * x
        if not (u < ut < vt < v and ut < sq):
            raise ArithmeticError(f"interpolant chain violated at x={x!r}")
        if not pp.psi(x) < min(x, pp.phi(x)):
            raise ArithmeticError(f"psi(delta) < min(delta, phi(delta)) fails at delta={x!r}")
        if not sq < v:
            failures.append(x)
    return PhiPsi(n, Ared, r, tuple(failures))


def test_L_epsilon(delta: float, r: float, psi) -> float:
    """``eps(delta) = 2 delta / (r + psi(delta))``; ``psi`` may be a callable
    or the value ``psi(delta)``."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    p = psi(delta) if callable(psi) else psi
    if not p < delta:
        raise DomainError(f"need psi(delta) < delta, got psi={p} >= delta={delta}")
    eps = 2 * delta / (r + p)
    if not (0 < eps < 2):
        raise ArithmeticError(f"eps(delta) = {eps} left (0, 2)")
    return eps


test_L_epsilon.__test__ = False


def invert_epsilon(eps: float, r: float, psi, lo: float = 1e-9, hi: float = 1e6, checks: int = 400):
    """``delta`` with ``eps(delta) = eps`` by bisection after checking that
    ``eps(.)`` increases on a log grid over ``[lo, hi]`` and brackets ``eps``.
    Returns ``(delta, residual)``."""
    if not (0 < eps < 2):
        raise DomainError(f"eps must lie in (0, 2), got {eps}")
    fn = lambda d: test_L_epsilon(d, r, psi)
    probe = [fn(d) for d in np.logspace(math.log10(lo), math.log10(hi), checks)]
    if any(b <= a for a, b in zip(probe, probe[1:])):
        raise ArithmeticError("eps(delta) is not increasing on the bracket")
    if not (probe[0] < eps < probe[-1]):
        raise ArithmeticError(f"eps={eps} not bracketed by [{probe[0]}, {probe[-1]}]")
    delta = optimize.bisect(lambda d: fn(d) - eps, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                            maxiter=500)
    return delta, abs(fn(delta) - eps)


def membership_certificate(eps: float, Ared: float = 3.0, n: int | None = None, B: float = 1.0,
                           pairs: int = 3):
    """Certificate for ``x0/a`` (``x0 = e_1``, ``a = r + psi(delta)``,
    ``eps(delta) = eps``) from the pairs ``(x0 +- tau e_k)/a``, ``k = 2, 3, ...``.

    ``tau`` is chosen so that ``x = ||tau e_k||`` lies halfway between
    ``delta`` and the root ``x*`` of ``U(x*) = Ut(delta)``; then
    ``||x0 +- tau e_k|| < a`` and the gap ``2x/a`` exceeds ``eps``.  With
    ``B != 1`` all points are divided by ``B^(1/2)``.  Returns
    ``(certificate, info)``.
    """
    from .szlenk import DerivationCertificate

    n = smallest_n(Ared) if n is None else n
    pp = build_phi_psi(n, Ared)
    r = pp.r
    delta, residual = invert_epsilon(eps, r, pp.psi)
    a = r + pp.psi(delta)
    target = pp.Ut_excess(delta)
    hi = 2 * delta + 1
    while U_excess(hi, Ared) < target:
        hi *= 2
    x_star = optimize.bisect(lambda x: U_excess(x, Ared) - target, delta, hi, xtol=1e-15,
                             rtol=4 * np.finfo(float).eps)
    x = 0.5 * (delta + x_star)
    tau = x / r
    k = 1 / (a * math.sqrt(B))
    point = SparseVec.unit(1, k)
    pair_list = tuple(
        (SparseVec.from_pairs([(1, k), (j, tau * k)]), SparseVec.from_pairs([(1, k), (j, -tau * k)]))
        for j in range(2, 2 + pairs)
    )
    cert = DerivationCertificate(
        point=point, eps=eps, pairs=pair_list, space="orlicz", coord_horizon=1,
        params={"A": Ared * B * B / 4, "B": B},
        meta={"construction": "(e_1 +/- tau e_k)/a", "delta": delta, "a": a, "tau": tau},
    )
    info = {"n": n, "r": r, "delta": delta, "a": a, "x": x, "x_star": x_star, "tau": tau,
            "residual": residual, "r_over_a": r / a, "phi_psi": pp}
    return cert, info


@dataclass(frozen=True)
class NotABallReport:
    Ared: float
    eps: float
    n: int
    r: float
    delta: float
    a: float
    residual: float
    certificate_valid: bool
    certificate_max_norm: float
    certificate_min_gap: float
    samples: int
    exclusion_bound: float
    min_excluded_norm: float
    norm_gap: float
    chain_failures: int
    tol: float = DEFAULT_TOL

    @property
    def exclusion_ok(self) -> bool:
        return self.min_excluded_norm >= self.exclusion_bound

    @property
    def ok(self) -> bool:
        return (self.certificate_valid and self.exclusion_ok and self.residual < 1e-9
                and self.norm_gap <= 1e-12)

    def to_jsonable(self):
        out = dict(self.__dict__)
        out["ok"] = self.ok
        return out


def not_a_ball_demo(Ared: float, eps: float, samples: int = 1000, seed: int = 0,
                    n: int | None = None, tol: float = DEFAULT_TOL) -> NotABallReport:
    """``x0/a`` lies in ``s_eps B`` (certificate) while ``y0/a``, of the same
    norm ``r/a``, is excluded: sampled ``u`` supported beyond ``n`` with
    ``||u|| > delta`` all give ``||y0 + u|| >= r + phi(delta)``."""
    from .szlenk import check_certificate

    if not (0 < eps < 2):
        raise DomainError(f"eps must lie in (0, 2), got {eps}")
    cert, info = membership_certificate(eps, Ared, n)
    n, r, delta, a, pp = info["n"], info["r"], info["delta"], info["a"], info["phi_psi"]
    check = check_certificate(cert, tol)
    base = y0(n, Ared)
    bound = r + pp.phi(delta)
    rng = stream(seed, "not-a-ball", repr(Ared), repr(eps))
    worst = math.inf
    for i in range(samples):
        size = int(rng.integers(1, 9))
        vals = rng.standard_normal(size)
        w = SparseVec.from_pairs([(n + 1 + i + j, float(x)) for j, x in enumerate(vals)])
        target = delta * (1 + float(rng.exponential(0.5))) + 1e-12
        u = w * (target / norm_reduced(w, Ared))
        worst = min(worst, norm_reduced(base + u, Ared))
    gap = abs(norm_reduced(SparseVec.unit(1) / a, Ared) - norm_reduced(base / a, Ared))
    return NotABallReport(Ared, eps, n, r, delta, a, info["residual"], check.valid, check.max_norm,
                          check.min_gap, samples, bound, worst, gap, len(pp.chain_failures), tol)
