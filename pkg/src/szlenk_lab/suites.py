"""Named verification checks grouped by space.

Each check returns a :class:`Record`; ``anchor`` names the identity or
inequality being checked.  Records hold no timings or addresses, so a
report is a pure function of ``(suite, seed, samples, tol)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .rng import stream
from .vecspace import SparseVec

SUITES = ("tsirelson", "schlumprecht", "baernstein", "orlicz", "szlenk")


@dataclass(frozen=True)
class Record:
    suite: str
    check: str
    anchor: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: float = 0.0

    def to_jsonable(self):
        return {"suite": self.suite, "check": self.check, "anchor": self.anchor,
                "status": "pass" if self.passed else "fail", "measured": self.measured,
                "tolerance": self.tolerance}


def random_vector(rng, max_support: int, max_index: int = 12, exact: bool = False, min_support: int = 1):
    """Random sparse vector with ``min_support..max_support`` entries among
    indices ``1..max_index``; rational entries when ``exact``."""
    size = int(rng.integers(min_support, max_support + 1))
    where = sorted(int(i) for i in rng.choice(range(1, max_index + 1), size=size, replace=False))
    out = {}
    for i in where:
        if exact:
            num = int(rng.integers(1, 21)) * (1 if rng.random() < 0.5 else -1)
            out[i] = Fraction(num, int(rng.integers(1, 9)))
        else:
            out[i] = float(rng.uniform(-2, 2)) or 1.0
    return SparseVec.from_dict(out)


def _f(x):
    return float(x)


# tsirelson

def tsirelson_checks(seed, samples, tol, oracle_cap=9):
    from . import szlenk
    from .tsirelson import (t_block_norm, t_membership_witness, t_norm, t_norm_oracle,
                            t_xnorm_certify, tail_bound_samples)

    out = []
    rng = stream(seed, "tsirelson", "oracle")
    mism = 0
    for _ in range(samples):
        v = random_vector(rng, min(8, oracle_cap), exact=True)
        if t_norm(v, exact=True).value != t_norm_oracle(v, cap=oracle_cap, exact=True):
            mism += 1
    out.append(Record("tsirelson", "dp_oracle_equivalence",
                      "DP over contiguous runs = exhaustive admissible families (rational)",
                      mism == 0, {"instances": samples, "mismatches": mism}, 0.0))

    bad = [(a, m) for a in range(2, 13) for m in range(2, a + 1)
           if t_norm(SparseVec.block(a, m, Fraction(1)), exact=True).value != Fraction(m, 2)]
    t_block_norm(5, 4)
    out.append(Record("tsirelson", "block_norm", "||e_a + ... + e_{a+m-1}||_T = m/2, 2 <= m <= a",
                      not bad, {"failures": len(bad), "max_a": 12}, 0.0))

    ok = t_xnorm_certify(SparseVec.unit(1, 0.5), 4, 4, 1.5) and t_xnorm_certify(SparseVec.zero(), 2, 2, 1.0)
    out.append(Record("tsirelson", "perturbation_bound",
                      "||x0 +- alpha(e_{N+k+1}+...+e_{N+k+m})|| <= max{1, m alpha/2, (2N+m) alpha/4}",
                      ok, {}, tol))

    gaps = {}
    ok = True
    for eps in (0.5, 1.0, 1.5):
        rho = 1 - eps / 4 - 0.01
        chk = szlenk.check_certificate(t_membership_witness(SparseVec.unit(2, rho), eps), tol)
        ok &= chk.valid
        gaps[str(eps)] = chk.min_gap
    out.append(Record("tsirelson", "membership_r_curve", "r(eps) = 1 - eps/4: x0 certified at r(eps) - 0.01",
                      ok, {"min_gap": gaps}, tol))

    rng = stream(seed, "tsirelson", "tail")
    margins = tail_bound_samples(0.95, 3, 4, 1.0, 0.5, 0.02, rng, samples=max(10, samples // 10))
    out.append(Record("tsirelson", "tail_bound", "||(I - P_n) y|| <= 2(1 - r + n delta)",
                      min(margins) >= -tol, {"min_margin": min(margins)}, tol))
    return out


# schlumprecht

def schlumprecht_checks(seed, samples, tol, oracle_cap=9):
    from . import szlenk
    from .schlumprecht import (LOG2_3, phi, s_membership_witness, s_norm, s_norm_oracle,
                               s_r_upper_bound, s_R_curve, s_tailbound_check)

    out = []
    err = max(abs(s_norm(SparseVec.block(1, n)).value - n / phi(n)) for n in range(1, 26))
    out.append(Record("schlumprecht", "flat_vectors", "||e_1 + ... + e_n||_S = n / log2(n+1), n <= 25",
                      err <= 1e-12, {"max_error": err}, 1e-12))

    rng = stream(seed, "schlumprecht", "oracle")
    worst = 0.0
    for _ in range(samples):
        v = random_vector(rng, min(8, oracle_cap))
        worst = max(worst, abs(s_norm(v).value - s_norm_oracle(v, cap=oracle_cap)))
    out.append(Record("schlumprecht", "dp_oracle_equivalence",
                      "DP over full-run partitions = exhaustive successive families",
                      worst <= 1e-12, {"instances": samples, "max_error": worst}, 1e-12))

    ok = True
    measured = {}
    for eps in (1.3, 1.5, 1.8):
        r = LOG2_3 - eps / 2 - 0.01
        chk = szlenk.check_certificate(s_membership_witness(SparseVec.unit(1, r), eps), tol)
        ok &= chk.valid
        measured[str(eps)] = chk.max_norm
    out.append(Record("schlumprecht", "membership_R_curve",
                      "R(eps) = min{1, log2 3 - eps/2}: r e_1 certified at R(eps) - 0.01",
                      ok, {"max_norm": measured}, tol))

    ok = True
    for eps, ep in ((1.3, 1.25), (1.5, 1.3), (1.8, 1.5)):
        N = 1
        delta = 0.9 * (eps - ep) / (6 * N)
        ok &= s_tailbound_check(SparseVec.unit(1), eps, ep, N, delta, max(10, samples // 10),
                                stream(seed, "schlumprecht", "tail", repr(eps)), tol)
    out.append(Record("schlumprecht", "tail_bound", "||(I - P_N) y|| <= log2 3 - ||P_N x0|| + N delta",
                      ok, {}, tol))

    ok = True
    for k in range(1, 20):
        eps = k / 10
        ub, _ = s_r_upper_bound(eps)
        ok &= (1 - eps / 2 <= ub <= s_R_curve(eps))
    out.append(Record("schlumprecht", "r_upper_bound",
                      "1 - eps/2 <= inf_n (log2(n+2) - eps/2)/log2(n+1) <= R(eps)", ok, {}, 0.0))
    return out


# baernstein

def baernstein_checks(seed, samples, tol, cap=14):
    from . import szlenk
    from .baernstein import b_ball_radius, b_norm_exact, mstar_failure_demo, partlemma_check

    out = []
    err = max(abs(b_norm_exact(SparseVec.block(n, n)).value - n) for n in range(1, 7))
    out.append(Record("baernstein", "admissible_block", "||e_n + ... + e_{2n-1}||_B = n, n <= 6",
                      err <= tol, {"max_error": err}, tol))

    rng = stream(seed, "baernstein", "partlemma")
    fails = 0
    for _ in range(samples):
        v = random_vector(rng, 10, max_index=16)
        n = int(rng.integers(0, 17))
        fails += not partlemma_check(v, n, cap, tol)
    out.append(Record("baernstein", "partlemma", "||x||^2 >= ||P_n x||^2 + ||(I - P_n) x||^2",
                      fails == 0, {"pairs": samples, "violations": fails}, tol))

    curve = szlenk.build_curve("baernstein", [0.25 * k for k in range(1, 8)])
    shortfall = []
    for s in curve.samples:
        cert = [p for p in s.provenance if p.startswith("certified")]
        rho = float(cert[0].rsplit(" ", 1)[1]) if cert else -1.0
        shortfall.append(b_ball_radius(s.eps) - rho)
    ok = all(0 <= d <= 0.01 for d in shortfall)
    out.append(Record("baernstein", "ball_radius", "s_eps B = (1 - (eps/2)^2)^(1/2) B, certified from below",
                      ok, {"max_shortfall": max(shortfall)}, 0.01))

    rep = mstar_failure_demo()
    e1 = max(abs(v - math.sqrt(2)) for _, v in rep.first)
    e2 = max(abs(v - math.sqrt(2 + math.sqrt(2))) for _, v in rep.second)
    out.append(Record("baernstein", "mstar_failure",
                      "||e_1 + e_n|| = 2^(1/2), ||(e_1+e_2)/2^(1/2) + e_n|| = (2 + 2^(1/2))^(1/2)",
                      e1 <= 1e-12 and e2 <= 1e-12 and rep.verdict == "property (M*) falsified",
                      {"error_first": e1, "error_second": e2, "verdict": rep.verdict}, 1e-12))
    return out


# orlicz

KKT_GRID = [(mu, n, A) for mu in (0.5, 1.0, 2.0) for n in (3, 5, 8) for A in (1.0, 3.0, 10.0)]


def orlicz_checks(seed, samples, tol):
    from . import orlicz

    out = []
    rng = stream(seed, "orlicz", "luxemburg")
    worst = 0.0
    for _ in range(samples):
        v = random_vector(rng, 8, max_index=20)
        p = orlicz.OrliczParams(float(10 ** rng.uniform(-2, 2)), float(10 ** rng.uniform(-2, 2)))
        worst = max(worst, abs(orlicz.closed_form_norm(v, p) - orlicz.luxemburg_oracle(v, p)))
    out.append(Record("orlicz", "closed_form", "||x|| = (f(x)/2)^(1/2) solves the Luxemburg equation",
                      worst < 1e-10, {"instances": samples, "max_error": worst}, 1e-10))

    reports = [orlicz.kkt_minimize(mu, n, A) for mu, n, A in KKT_GRID]
    e2 = max(abs(r.grid_min - r.V2) for r in reports)
    e1 = max(abs(r.endpoint_t0 - r.V1) for r in reports)
    strict = all(r.V2 < r.V1 for r in reports)
    large = all(orlicz.n_alpha_sq(n, A) > 1 for _, n, A in KKT_GRID)
    out.append(Record("orlicz", "kkt", "min F on {g = 0, 0 <= t <= s} = V2 < V1 = F at t = 0",
                      e2 <= 1e-8 and e1 <= 1e-8 and strict and large,
                      {"triples": len(reports), "max_V2_error": e2, "max_V1_error": e1, "V2_lt_V1": strict},
                      1e-8))

    pairs = sorted({(n, A) for _, n, A in KKT_GRID})
    viol = 0
    worst = math.inf
    for n, A in pairs:
        rep = orlicz.claim_report(n, A, samples * 10, seed)
        viol += rep.violations + (not rep.ok)
        worst = min(worst, rep.min_margin)
    out.append(Record("orlicz", "claim", "f(y0 + u) >= V(||u||) for supp u beyond n",
                      viol == 0, {"pairs": len(pairs), "violations": viol, "min_margin": worst}, 1e-10))

    ok = all(orlicz.u_lt_v_check(n, A) for n, A in pairs)
    out.append(Record("orlicz", "u_lt_v", "U(x) < V(x) for x > 0", ok, {}, 0.0))

    h_ok = True
    hrng = stream(seed, "orlicz", "increasing")
    for _ in range(samples):
        a, b = sorted(float(x) for x in hrng.uniform(0.01, 10, 2))
        t1, t2 = sorted(float(x) for x in hrng.uniform(0, 10, 2))
        if a < b and t1 < t2:
            h_ok &= orlicz.increasing_h(t1, a, b) < orlicz.increasing_h(t2, a, b)
    out.append(Record("orlicz", "increasing_h", "(a+t)^(1/2) - (b+t)^(1/2) increasing for a < b",
                      h_ok, {}, 0.0))

    res = {}
    ok = True
    for eps in (0.1, 0.5, 1.0, 1.5, 1.9):
        rep = orlicz.not_a_ball_demo(3.0, eps, samples=samples, seed=seed)
        ok &= rep.ok
        res[str(eps)] = rep.residual
    out.append(Record("orlicz", "not_a_ball", "x0/a in s_eps B while y0/a of equal norm is excluded",
                      ok, {"max_residual": max(res.values())}, 1e-9))
    return out


# szlenk

def szlenk_checks(seed, samples, tol):
    from . import szlenk
    from .baernstein import b_ball_radius, b_membership_witness
    from .orlicz import membership_certificate
    from .schlumprecht import s_membership_witness
    from .tsirelson import t_membership_witness

    out = []
    grid = [k / 20 for k in range(1, 40)]
    err = max(abs(szlenk.mq_radius(e, 2) - b_ball_radius(e)) for e in grid)
    out.append(Record("szlenk", "mq_ball", "(1 - (eps/2)^q)^(1/q) at q = 2 equals the Baernstein radius",
                      err <= 1e-15, {"max_error": err}, 1e-15))

    bad = []
    for space in szlenk.SPACES:
        curve = szlenk.build_curve(space, [0.5, 1.0, 1.5])
        bad += curve.violations(tol)
    out.append(Record("szlenk", "curve_invariants", "1 - eps/2 <= r_lower <= r_upper <= R_upper",
                      not bad, {"violations": bad}, tol))

    certs = {
        "tsirelson": t_membership_witness(SparseVec.unit(2, 0.6), 1.0),
        "schlumprecht": s_membership_witness(SparseVec.unit(1, 0.5), 1.0),
        "baernstein": b_membership_witness(SparseVec.unit(1, 0.5), 1.0),
        "orlicz": membership_certificate(1.0, 3.0)[0],
    }
    ok = True
    for cert in certs.values():
        for theta in (0.25, 0.5, 0.9):
            ok &= szlenk.validate_certificate(szlenk.radial_scale(cert, theta), tol)
    out.append(Record("szlenk", "radial_scale", "a = (1+t)/2 u - (1-t)/2 v keeps ||a|| <= 1 and a - b = u - v",
                      ok, {"spaces": len(certs)}, tol))
    return out


def run_suite(suite: str, seed: int, samples: int, tol: float, oracle_cap: int = 9):
    if suite == "tsirelson":
        return tsirelson_checks(seed, samples, tol, oracle_cap)
    if suite == "schlumprecht":
        return schlumprecht_checks(seed, samples, tol, oracle_cap)
    if suite == "baernstein":
        return baernstein_checks(seed, samples, tol)
    if suite == "orlicz":
        return orlicz_checks(seed, samples, tol)
    if suite == "szlenk":
        return szlenk_checks(seed, samples, tol)
    raise KeyError(suite)
