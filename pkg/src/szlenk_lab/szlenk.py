"""Szlenk-derivation scaffolding shared by all four spaces.

A point ``x0`` lies in ``s_eps B`` when every weak*-neighbourhood of it
meets the unit ball in a set of diameter ``> eps``.  A
:class:`DerivationCertificate` is finite-resolution evidence of this: a list
of pairs ``(plus, minus)`` in the unit ball, with ``||plus - minus|| > eps``,
that agree with ``x0`` better and better on the first ``coord_horizon``
coordinates while their difference moves to the right.  This is a proxy for
weak*-convergence, never a proof.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field, replace

from .vecspace import DEFAULT_TOL, DomainError, SparseVec, head_proj

SPACES = ("tsirelson", "schlumprecht", "baernstein", "orlicz")

# norm evaluations available to each curve sample for certificate checks
DEFAULT_BUDGET = 200
BISECTION_STEPS = 20


def _check_eps(eps):
    if not (0 < eps < 2):
        raise DomainError(f"eps must lie in (0, 2), got {eps}")


@dataclass(frozen=True)
class DerivationCertificate:
    point: SparseVec
    eps: float
    pairs: tuple
    space: str
    coord_horizon: int
    params: dict | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def to_jsonable(self):
        out = {
            "space": self.space,
            "eps": self.eps,
            "coordHorizon": self.coord_horizon,
            "point": self.point.to_jsonable(),
            "pairs": [[p.to_jsonable(), m.to_jsonable()] for p, m in self.pairs],
        }
        if self.params is not None:
            out["params"] = dict(self.params)
        if self.meta:
            out["meta"] = dict(self.meta)
        return out

    @classmethod
    def from_jsonable(cls, data):
        return cls(
            point=SparseVec.from_jsonable(data["point"]),
            eps=data["eps"],
            pairs=tuple(
                (SparseVec.from_jsonable(p), SparseVec.from_jsonable(m)) for p, m in data["pairs"]
            ),
            space=data["space"],
            coord_horizon=int(data["coordHorizon"]),
            params=data.get("params"),
            meta=data.get("meta", {}),
        )


def space_norm(space: str, params: dict | None = None):
    """The norm of ``space`` as a function ``SparseVec -> float`` (exact
    values are kept for rational Tsirelson input)."""
    if space == "tsirelson":
        from .tsirelson import t_norm

        return lambda v: t_norm(v, witness=False).value
    if space == "schlumprecht":
        from .schlumprecht import s_norm

        return lambda v: s_norm(v, witness=False).value
    if space == "baernstein":
        from .baernstein import b_norm

        return lambda v: b_norm(v).value
    if space == "orlicz":
        from .orlicz import OrliczParams, closed_form_norm

        p = params or {}
        op = OrliczParams(float(p.get("A", 0.75)), float(p.get("B", 1.0)))
        return lambda v: closed_form_norm(v, op)
    raise DomainError(f"unknown space {space!r}; expected one of {', '.join(SPACES)}")


class Counter:
    """Thread-safe tally of norm evaluations."""

    def __init__(self, limit: int | None = None):
        self.used = 0
        self.limit = limit
        self._lock = threading.Lock()

    def can_spend(self, n: int) -> bool:
        return self.limit is None or self.used + n <= self.limit

    def spend(self, n: int = 1):
        with self._lock:
            self.used += n


@dataclass(frozen=True)
class CertificateCheck:
    valid: bool
    max_norm: float
    min_gap: float
    reasons: tuple = ()


def check_certificate(cert: DerivationCertificate, tol: float = DEFAULT_TOL,
                      counter: Counter | None = None) -> CertificateCheck:
    """Re-evaluate every certificate invariant with the space's norm."""
    norm = space_norm(cert.space, cert.params)
    if not cert.pairs:
        raise DomainError("certificate has no pairs")
    reasons = []
    max_norm = -math.inf
    min_gap = math.inf
    dists = []
    fronts = []
    H = cert.coord_horizon
    base = head_proj(cert.point, H)
    for i, (plus, minus) in enumerate(cert.pairs):
        np_, nm, gap = norm(plus), norm(minus), norm(plus - minus)
        if counter is not None:
            counter.spend(3)
        max_norm = max(max_norm, float(np_), float(nm))
        min_gap = min(min_gap, float(gap))
        if np_ > 1 + tol or nm > 1 + tol:
            reasons.append(f"pair {i}: norm {float(max(np_, nm))!r} exceeds 1")
        if not gap > cert.eps:
            reasons.append(f"pair {i}: gap {float(gap)!r} <= eps")
        dp = (head_proj(plus, H) - base).to_float()
        dm = (head_proj(minus, H) - base).to_float()
        dists.append(max(max(map(abs, dp.values), default=0.0), max(map(abs, dm.values), default=0.0)))
        fronts.append((plus - minus).min_support)
    for i in range(1, len(dists)):
        if dists[i] > dists[i - 1] + tol:
            reasons.append(f"pair {i}: moved away from the point on coordinates <= {H}")
        if fronts[i] < fronts[i - 1]:
            reasons.append(f"pair {i}: perturbation support moved left")
    return CertificateCheck(not reasons, max_norm, min_gap, tuple(reasons))


def validate_certificate(cert: DerivationCertificate, tol: float = DEFAULT_TOL,
                         counter: Counter | None = None) -> bool:
    return check_certificate(cert, tol, counter).valid


def radial_scale(cert: DerivationCertificate, theta, tol: float = DEFAULT_TOL) -> DerivationCertificate:
    """Certificate for ``theta * point`` with the same ``eps``.

    Each pair ``(u, v)`` becomes ``a = (1+theta)/2 u - (1-theta)/2 v`` and
    ``b = (1+theta)/2 v - (1-theta)/2 u``; then ``a - b = u - v`` and
    ``||a||, ||b|| <= 1``.
    """
    if not (0 < theta < 1):
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if not validate_certificate(cert, tol):
        raise DomainError("input certificate does not validate")
    p = (1 + theta) / 2
    q = (1 - theta) / 2
    pairs = tuple((u * p - v * q, v * p - u * q) for u, v in cert.pairs)
    meta = dict(cert.meta)
    meta["radial"] = meta.get("radial", 1.0) * float(theta)
    return replace(cert, point=cert.point * theta, pairs=pairs, meta=meta)


def mq_radius(eps: float, q: float) -> float:
    """Radius ``(1 - (eps/2)^q)^(1/q)`` of ``s_eps B`` under property (m_q*)."""
    _check_eps(eps)
    if not q >= 1:
        raise DomainError(f"q must be >= 1, got {q}")
    return (1 - (eps / 2) ** q) ** (1 / q)


def universal_lower_bound(eps: float) -> float:
    _check_eps(eps)
    return 1 - eps / 2


def tsirelson_radii(eps: float):
    _check_eps(eps)
    return 1 - eps / 4, 1.0


def certified_radius(make_cert, lo: float, hi: float, steps: int = BISECTION_STEPS,
                     counter: Counter | None = None, tol: float = DEFAULT_TOL):
    """Bisection for the largest ``rho`` in ``[lo, hi]`` such that
    ``make_cert(rho)`` builds a certificate that validates.

    ``make_cert`` may raise ``DomainError`` to signal failure.  Returns
    ``(rho, certificate, exhausted)``; ``rho`` is ``None`` when not even
    ``lo`` certifies.  ``exhausted`` is true if the counter ran out.
    """
    def attempt(rho):
        try:
            cert = make_cert(rho)
        except DomainError:
            return None
        cost = 3 * len(cert.pairs)
        if counter is not None:
            if not counter.can_spend(cost):
                raise _Exhausted
        return cert if validate_certificate(cert, tol, counter) else None

    best = None
    try:
        cert = attempt(lo)
        if cert is None:
            return None, None, False
        best = (lo, cert)
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            cert = attempt(mid)
            if cert is None:
                hi = mid
            else:
                lo = mid
                best = (mid, cert)
    except _Exhausted:
        return (best[0], best[1], True) if best else (None, None, True)
    return best[0], best[1], False


class _Exhausted(Exception):
    pass


@dataclass(frozen=True)
class RadiusSample:
    eps: float
    r_lower: float
    r_upper: float
    R_lower: float
    R_upper: float
    provenance: tuple = ()
    partial: bool = False

    def as_row(self):
        return [self.eps, self.r_lower, self.r_upper, self.R_lower, self.R_upper,
                ";".join(self.provenance)]


@dataclass(frozen=True)
class RadiusCurve:
    space: str
    samples: tuple

    COLUMNS = ("eps", "rLower", "rUpper", "RLower", "RUpper", "provenance")

    def violations(self, tol: float = DEFAULT_TOL):
        out = []
        for s in self.samples:
            checks = [
                (s.r_lower <= s.r_upper + tol, "rLower <= rUpper"),
                (s.R_lower <= s.R_upper + tol, "RLower <= RUpper"),
                (s.r_upper <= s.R_upper + tol, "rUpper <= RUpper"),
                (s.r_lower >= 1 - s.eps / 2 - tol, "rLower >= 1 - eps/2"),
                (s.r_upper >= 1 - s.eps / 2 - tol, "rUpper >= 1 - eps/2"),
            ]
            out += [f"eps={s.eps}: {name}" for ok, name in checks if not ok]
        return out

    def to_jsonable(self):
        return {
            "space": self.space,
            "samples": [dict(zip(self.COLUMNS, s.as_row()), partial=s.partial) for s in self.samples],
        }


def _tsirelson_sample(eps, counter, tol):
    from .tsirelson import t_membership_witness, t_unit_certificate

    r, R = tsirelson_radii(eps)
    prov = ["r,R: analytic 1-eps/4, 1"]
    partial = False
    rho = round(r - 0.01, 12)
    cert = t_membership_witness(SparseVec.unit(2, rho), eps)
    unit = t_unit_certificate(eps)
    need = 3 * (len(cert.pairs) + len(unit.pairs))
    if counter.can_spend(need):
        ok = validate_certificate(cert, tol, counter)
        prov.append(f"certificate {'valid' if ok else 'INVALID'} at |x0|={rho:.12g}")
        ok_unit = validate_certificate(unit, tol, counter)
        prov.append(f"certificate {'valid' if ok_unit else 'INVALID'} at |x0|=1")
        partial = not (ok and ok_unit)
    else:
        prov.append("budget exhausted before certificate")
        partial = True
    return RadiusSample(eps, r, r, R, R, tuple(prov), partial)


def _schlumprecht_sample(eps, counter, tol):
    from .schlumprecht import s_membership_witness, s_r_upper_bound, s_R_curve

    R = s_R_curve(eps)
    ru, n = s_r_upper_bound(eps)
    prov = ["rLower: universal 1-eps/2", f"rUpper: scan min at n={n}", "R: analytic min(1, log2(3)-eps/2)"]
    make = lambda rho: s_membership_witness(SparseVec.unit(1, rho), eps)
    rho, _, exhausted = certified_radius(make, 0.0, min(1.0, R), counter=counter, tol=tol)
    if rho is not None:
        prov.append(f"certified |r e_1| up to {rho:.12g}")
    if exhausted:
        prov.append("budget exhausted")
    return RadiusSample(eps, 1 - eps / 2, ru, R, R, tuple(prov), exhausted or rho is None)


def _baernstein_sample(eps, counter, tol):
    from .baernstein import b_ball_radius, b_membership_witness

    rad = b_ball_radius(eps)
    probe = SparseVec.from_pairs([(1, 1.0), (2, 1.0)]) * (1 / math.sqrt(2))
    prov = ["r,R: analytic (1-(eps/2)^2)^(1/2)"]
    make = lambda rho: b_membership_witness(probe * rho, eps)
    rho, _, exhausted = certified_radius(make, 0.0, rad, counter=counter, tol=tol)
    if rho is not None:
        prov.append(f"certified |x0| up to {rho:.12g}")
    if exhausted:
        prov.append("budget exhausted")
    return RadiusSample(eps, rad, rad, rad, rad, tuple(prov), exhausted or rho is None)


def _orlicz_sample(eps, counter, tol, Ared):
    from .orlicz import membership_certificate

    cert, info = membership_certificate(eps, Ared)
    ratio = info["r_over_a"]
    prov = ["rLower: universal 1-eps/2", "rUpper=RLower: r/a, x0/a in and y0/a out",
            f"n={info['n']}", f"delta={info['delta']:.12g}"]
    partial = False
    if counter.can_spend(3 * len(cert.pairs)):
        ok = validate_certificate(cert, tol, counter)
        prov.append(f"certificate {'valid' if ok else 'INVALID'} at |x0/a|={ratio:.12g}")
        partial = not ok
    else:
        prov.append("budget exhausted before certificate")
        partial = True
    return RadiusSample(eps, 1 - eps / 2, ratio, ratio, 1.0, tuple(prov), partial)


def build_curve(space: str, eps_grid, budget: int | None = DEFAULT_BUDGET, Ared: float = 3.0,
                tol: float = DEFAULT_TOL) -> RadiusCurve:
    """Radius bounds per ``eps``: analytic values where known, plus
    certificates checked within ``budget`` norm evaluations per sample.
    Samples whose certificates could not be completed are flagged
    ``partial``."""
    grid = [float(e) for e in eps_grid]
    for e in grid:
        _check_eps(e)
    if space == "tsirelson":
        one = _tsirelson_sample
    elif space == "schlumprecht":
        one = _schlumprecht_sample
    elif space == "baernstein":
        one = _baernstein_sample
    elif space == "orlicz":
        one = lambda e, c, t: _orlicz_sample(e, c, t, Ared)
    else:
        raise DomainError(f"unknown space {space!r}; expected one of {', '.join(SPACES)}")
    from .parallel import ordered_map

    samples = ordered_map(lambda e: one(e, Counter(budget), tol), grid)
    return RadiusCurve(space, tuple(samples))


def parse_grid(spec: str):
    """``"a:b:step"`` -> list of floats from ``a`` to ``b`` inclusive, rounded
    to 12 decimals; ``""`` -> empty list."""
    spec = spec.strip()
    if not spec:
        return []
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must look like a:b:step, got {spec!r}")
    a, b, step = (float(x) for x in parts)
    if step <= 0:
        raise DomainError("grid step must be positive")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(max(count, 0))]
