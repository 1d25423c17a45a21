"""The eleven acceptance criteria, each at its stated tolerance and time
limit.  Every criterion prints one ``PASS``/``FAIL`` line."""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from szlenk_lab import baernstein, orlicz, schlumprecht, szlenk, tsirelson
from szlenk_lab.suites import KKT_GRID
from szlenk_lab.vecspace import SparseVec


@contextmanager
def criterion(number, title, limit):
    state = {"detail": ""}
    start = time.perf_counter()
    ok = False
    try:
        yield state
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed <= limit
        status = "PASS" if ok and within else "FAIL"
        line = f"criterion {number}: {status} {title} ({elapsed:.2f}s / {limit}s) {state['detail']}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert within, f"criterion {number} took {elapsed:.1f}s, limit {limit}s"


def random_vec(rng, max_support, max_index=12, rational=False):
    k = int(rng.integers(1, max_support + 1))
    idx = sorted(int(i) for i in rng.choice(np.arange(1, max_index + 1), size=k, replace=False))
    if rational:
        vals = [Fraction(int(rng.integers(-20, 21)) or 1, int(rng.integers(1, 9))) for _ in idx]
    else:
        vals = [float(x) for x in rng.normal(size=k)]
    return SparseVec.from_pairs(list(zip(idx, vals)))


def test_criterion_01_tsirelson_oracle():
    rng = np.random.default_rng(101)
    with criterion(1, "Tsirelson DP == oracle, 500 rational vectors", 60) as c:
        mismatches = 0
        for _ in range(500):
            v = random_vec(rng, 8, rational=True)
            mismatches += tsirelson.t_norm(v, exact=True).value != tsirelson.t_norm_oracle(v, exact=True)
        c["detail"] = f"mismatches={mismatches}"
        assert mismatches == 0


def test_criterion_02_block_norms():
    with criterion(2, "Tsirelson ||e_a + ... + e_(a+m-1)|| = m/2, 2 <= m <= a <= 12", 60) as c:
        bad = [(a, m) for a in range(2, 13) for m in range(2, a + 1)
               if tsirelson.t_norm(SparseVec.block(a, m, Fraction(1)), exact=True).value != Fraction(m, 2)]
        c["detail"] = f"failures={bad}"
        assert not bad


def test_criterion_03_tsirelson_curve():
    with criterion(3, "Tsirelson curve r = 1-eps/4, R = 1; certificates at r-0.01", 120) as c:
        curve = szlenk.build_curve("tsirelson", szlenk.parse_grid("0.1:1.9:0.1"))
        assert len(curve.samples) == 19
        for s in curve.samples:
            assert s.r_lower == s.r_upper == 1 - s.eps / 4
            assert s.R_lower == s.R_upper == 1
            assert not s.partial
        for eps in (0.5, 1.0, 1.5):
            cert = tsirelson.t_membership_witness(SparseVec.unit(2, 1 - eps / 4 - 0.01), eps)
            assert szlenk.validate_certificate(cert)
        c["detail"] = "19 samples"


def test_criterion_04_schlumprecht_flat():
    with criterion(4, "Schlumprecht ||e_1 + ... + e_n|| = n/log2(n+1), n <= 25", 30) as c:
        err = max(abs(schlumprecht.s_norm(SparseVec.block(1, n)).value - n / math.log2(n + 1))
                  for n in range(1, 26))
        c["detail"] = f"max_error={err:.2e}"
        assert err <= 1e-12


def test_criterion_05_schlumprecht_R():
    with criterion(5, "Schlumprecht certificates at R-0.01 and tail bound, 200 samples", 120) as c:
        worst = math.inf
        for eps, eps_prime in ((1.3, 1.25), (1.5, 1.3), (1.8, 1.5)):
            r = schlumprecht.LOG2_3 - eps / 2 - 0.01
            assert szlenk.validate_certificate(schlumprecht.s_membership_witness(SparseVec.unit(1, r), eps))
            delta = 0.9 * (eps - eps_prime) / 6
            margins = schlumprecht.tail_margins(SparseVec.unit(1), eps, eps_prime, 1, delta, 200,
                                                np.random.default_rng(int(eps * 100)))
            assert len(margins) == 200
            worst = min(worst, min(margins))
        c["detail"] = f"min_margin={worst:.3e}"
        assert worst >= -1e-12


def test_criterion_06_baernstein():
    with criterion(6, "Baernstein block norms, decomposition inequality, certified radius, (M*) failure", 180) as c:
        for n in range(1, 7):
            assert abs(baernstein.b_norm_exact(SparseVec.block(n, n)).value - n) <= 1e-12
        rng = np.random.default_rng(606)
        violations = 0
        for _ in range(1000):
            v = random_vec(rng, 10, max_index=16)
            violations += not baernstein.partlemma_check(v, int(rng.integers(0, 17)))
        assert violations == 0
        grid = [0.25 * k for k in range(1, 8)]
        curve = szlenk.build_curve("baernstein", grid)
        shortfall = []
        for s in curve.samples:
            rho = float([p for p in s.provenance if p.startswith("certified")][0].rsplit(" ", 1)[1])
            shortfall.append(baernstein.b_ball_radius(s.eps) - rho)
        assert all(0 <= d <= 0.01 for d in shortfall)
        rep = baernstein.mstar_failure_demo()
        assert all(abs(v - math.sqrt(2)) <= 1e-12 for _, v in rep.first)
        assert all(abs(v - math.sqrt(2 + math.sqrt(2))) <= 1e-12 for _, v in rep.second)
        c["detail"] = f"partlemma_violations={violations} max_shortfall={max(shortfall):.2e}"


def test_criterion_07_orlicz_closed_form():
    rng = np.random.default_rng(707)
    with criterion(7, "Orlicz closed form vs Luxemburg bisection, 1000 instances", 30) as c:
        worst = 0.0
        for _ in range(1000):
            v = random_vec(rng, 8, max_index=20)
            p = orlicz.OrliczParams(float(10 ** rng.uniform(-2, 2)), float(10 ** rng.uniform(-2, 2)))
            worst = max(worst, abs(orlicz.closed_form_norm(v, p) - orlicz.luxemburg_oracle(v, p)))
        c["detail"] = f"max_error={worst:.2e}"
        assert worst < 1e-10


def test_criterion_08_kkt():
    with criterion(8, "KKT minimiser = V2, endpoint = V1, V2 < V1 on 27 triples", 30) as c:
        assert len(KKT_GRID) == 27
        reports = [orlicz.kkt_minimize(mu, n, A) for mu, n, A in KKT_GRID]
        assert all(orlicz.n_alpha_sq(n, A) > 1 for _, n, A in KKT_GRID)
        e2 = max(abs(r.grid_min - r.V2) for r in reports)
        e1 = max(abs(r.endpoint_t0 - r.V1) for r in reports)
        c["detail"] = f"V2_error={e2:.2e} V1_error={e1:.2e}"
        assert e2 <= 1e-8 and e1 <= 1e-8
        assert all(r.V2 < r.V1 for r in reports)


def test_criterion_09_claim():
    with criterion(9, "lower bound f(y0 + u) >= V(||u||), 10^4 samples per (n, Ared)", 120) as c:
        pairs = sorted({(n, A) for _, n, A in KKT_GRID})
        reports = [orlicz.claim_report(n, A, 10_000, seed=909) for n, A in pairs]
        violations = sum(r.violations for r in reports)
        c["detail"] = f"pairs={len(pairs)} violations={violations} min_margin={min(r.min_margin for r in reports):.2e}"
        assert violations == 0
        assert all(r.ok and r.samples == 10_000 and r.slack == 1e-10 for r in reports)


def test_criterion_10_not_a_ball():
    with criterion(10, "Orlicz not_a_ball_demo at Ared = 3, 10^3 samples", 120) as c:
        residual = 0.0
        for eps in (0.1, 0.5, 1.0, 1.5, 1.9):
            rep = orlicz.not_a_ball_demo(3.0, eps, samples=1000)
            assert rep.certificate_valid and rep.exclusion_ok
            assert rep.residual < 1e-9
            residual = max(residual, rep.residual)
        c["detail"] = f"max_residual={residual:.2e}"


def test_criterion_11_cross_space():
    with criterion(11, "cross-space identities and radial scaling", 120) as c:
        grid = [k / 100 for k in range(1, 200)]
        assert all(szlenk.mq_radius(e, 2) == baernstein.b_ball_radius(e) for e in grid)
        eps_grid = szlenk.parse_grid("0.25:1.75:0.25")
        for space in szlenk.SPACES:
            curve = szlenk.build_curve(space, eps_grid)
            for s in curve.samples:
                assert s.r_lower >= szlenk.universal_lower_bound(s.eps) - 1e-12
                assert s.r_upper >= szlenk.universal_lower_bound(s.eps) - 1e-12
            assert curve.violations() == []
        certs = [
            tsirelson.t_membership_witness(SparseVec.unit(2, 0.6), 1.0),
            schlumprecht.s_membership_witness(SparseVec.unit(1, 0.5), 1.0),
            baernstein.b_membership_witness(SparseVec.unit(1, 0.5), 1.0),
            orlicz.membership_certificate(1.0, 3.0)[0],
        ]
        for cert in certs:
            for theta in (0.25, 0.5, 0.9):
                assert szlenk.validate_certificate(szlenk.radial_scale(cert, theta))
        c["detail"] = "4 spaces"
