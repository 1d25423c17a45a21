import json
import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from szlenk_lab import szlenk
from szlenk_lab.baernstein import b_ball_radius, b_membership_witness
from szlenk_lab.orlicz import membership_certificate
from szlenk_lab.schlumprecht import LOG2_3, s_membership_witness
from szlenk_lab.tsirelson import t_membership_witness
from szlenk_lab.vecspace import DomainError, SparseVec


@pytest.fixture(scope="module")
def certs():
    return {
        "tsirelson": t_membership_witness(SparseVec.unit(2, 0.6), 1.0),
        "schlumprecht": s_membership_witness(SparseVec.unit(1, 0.5), 1.0),
        "baernstein": b_membership_witness(SparseVec.unit(1, 0.5), 1.0),
        "orlicz": membership_certificate(1.0, 3.0)[0],
    }


def test_every_space_certificate_validates(certs):
    for cert in certs.values():
        assert szlenk.validate_certificate(cert)


def test_gap_at_most_eps_is_rejected(certs):
    cert = certs["baernstein"]
    gap = szlenk.check_certificate(cert).min_gap
    assert not szlenk.validate_certificate(replace(cert, eps=gap))


def test_large_norm_is_rejected(certs):
    cert = certs["baernstein"]
    plus, minus = cert.pairs[0]
    bad = (plus + SparseVec.unit(1, 1.0), minus)
    chk = szlenk.check_certificate(replace(cert, pairs=(bad,) + cert.pairs[1:]))
    assert not chk.valid and chk.max_norm >= 1.5


def test_leftward_drift_is_rejected(certs):
    cert = certs["schlumprecht"]
    assert not szlenk.validate_certificate(replace(cert, pairs=cert.pairs[::-1]))


def test_unknown_space_and_empty_pairs(certs):
    with pytest.raises(DomainError):
        szlenk.validate_certificate(replace(certs["tsirelson"], space="hilbert"))
    with pytest.raises(DomainError):
        szlenk.validate_certificate(replace(certs["tsirelson"], pairs=()))


def test_json_round_trip(certs):
    for cert in certs.values():
        back = szlenk.DerivationCertificate.from_jsonable(json.loads(json.dumps(cert.to_jsonable())))
        assert back == cert
        assert szlenk.validate_certificate(back)


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.9])
def test_radial_scale(certs, theta):
    for cert in certs.values():
        scaled = szlenk.radial_scale(cert, theta)
        assert scaled.point == cert.point * theta
        assert scaled.eps == cert.eps
        assert szlenk.validate_certificate(scaled)
        norm = szlenk.space_norm(cert.space, cert.params)
        for (u, v), (a, b) in zip(cert.pairs, scaled.pairs):
            assert norm(a - b) == pytest.approx(norm(u - v), rel=1e-14)
            assert max(norm(a), norm(b)) <= max(norm(u), norm(v)) + 1e-12


@given(st.floats(0.1, 0.95), st.floats(0.1, 0.95))
def test_radial_scale_composes(t1, t2):
    cert = b_membership_witness(SparseVec.unit(1, 0.5), 1.0)
    twice = szlenk.radial_scale(szlenk.radial_scale(cert, t1), t2)
    assert szlenk.validate_certificate(twice)
    assert twice.point.to_float()[1] == pytest.approx(0.5 * t1 * t2)
    assert twice.meta["radial"] == pytest.approx(t1 * t2)


def test_radial_scale_domain(certs):
    for theta in (0.0, 1.0, -0.5):
        with pytest.raises(DomainError):
            szlenk.radial_scale(certs["tsirelson"], theta)
    with pytest.raises(DomainError):
        szlenk.radial_scale(replace(certs["tsirelson"], eps=1.99), 0.5)


def test_mq_radius():
    assert szlenk.mq_radius(1.0, 2) == pytest.approx(math.sqrt(3) / 2)
    assert szlenk.mq_radius(1.0, 1) == pytest.approx(0.5)
    assert szlenk.mq_radius(2 - 1e-12, 3) < 1e-3
    for args in ((0.0, 2), (1.0, 0.5)):
        with pytest.raises(DomainError):
            szlenk.mq_radius(*args)


@given(st.floats(1e-6, 2 - 1e-6))
def test_mq_matches_baernstein(eps):
    assert szlenk.mq_radius(eps, 2) == b_ball_radius(eps)


def test_bounds():
    assert szlenk.universal_lower_bound(1.0) == 0.5
    assert szlenk.universal_lower_bound(1e-9) == pytest.approx(1.0)
    assert szlenk.tsirelson_radii(1.0) == (0.75, 1.0)
    assert szlenk.tsirelson_radii(2 - 1e-12)[0] == pytest.approx(0.5)
    with pytest.raises(DomainError):
        szlenk.tsirelson_radii(2.0)


def test_tsirelson_curve_example():
    s = szlenk.build_curve("tsirelson", [1.0]).samples[0]
    assert (s.r_lower, s.r_upper, s.R_lower, s.R_upper) == (0.75, 0.75, 1.0, 1.0)
    assert any("valid at |x0|=0.74" in p for p in s.provenance)
    assert not s.partial


def test_schlumprecht_curve_example():
    s = szlenk.build_curve("schlumprecht", [1.0]).samples[0]
    assert s.r_upper == pytest.approx(0.8900, abs=5e-5)
    assert s.R_upper == 1.0 and s.r_lower == 0.5


def test_baernstein_curve_example():
    s = szlenk.build_curve("baernstein", [1.0]).samples[0]
    assert s.r_lower == s.r_upper == szlenk.mq_radius(1.0, 2)
    rho = float([p for p in s.provenance if p.startswith("certified")][0].rsplit(" ", 1)[1])
    assert 0 <= s.r_lower - rho <= 0.01


@pytest.mark.parametrize("space", szlenk.SPACES)
def test_curves_respect_invariants(space):
    curve = szlenk.build_curve(space, [0.3, 1.1, 1.7])
    assert curve.violations() == []
    for s in curve.samples:
        assert s.r_upper >= szlenk.universal_lower_bound(s.eps)
        assert not s.partial


def test_schlumprecht_R():
    s = szlenk.build_curve("schlumprecht", [1.5]).samples[0]
    assert s.R_upper == pytest.approx(LOG2_3 - 0.75)


def test_budget_exhaustion_marks_partial():
    for space in szlenk.SPACES:
        s = szlenk.build_curve(space, [1.0], budget=1).samples[0]
        assert s.partial
        assert any("budget exhausted" in p for p in s.provenance)


def test_counter_counts_evaluations(certs):
    c = szlenk.Counter()
    szlenk.validate_certificate(certs["orlicz"], counter=c)
    assert c.used == 3 * len(certs["orlicz"].pairs)
    assert szlenk.Counter(5).can_spend(5) and not szlenk.Counter(5).can_spend(6)


def test_certified_radius_bisection():
    make = lambda rho: b_membership_witness(SparseVec.unit(1, rho), 1.0)
    rho, cert, exhausted = szlenk.certified_radius(make, 0.0, 1.0)
    assert not exhausted and szlenk.validate_certificate(cert)
    assert b_ball_radius(1.0) - 1e-5 <= rho <= b_ball_radius(1.0)


def test_curve_rejects_bad_input():
    with pytest.raises(DomainError):
        szlenk.build_curve("tsirelson", [2.0])
    with pytest.raises(DomainError):
        szlenk.build_curve("hilbert", [1.0])


def test_parse_grid():
    assert szlenk.parse_grid("0.5:1.5:0.5") == [0.5, 1.0, 1.5]
    assert szlenk.parse_grid("0.1:1.9:0.1")[-1] == 1.9
    assert len(szlenk.parse_grid("0.1:1.9:0.1")) == 19
    assert szlenk.parse_grid("") == []
    for bad in ("1:2", "1:2:0"):
        with pytest.raises(DomainError):
            szlenk.parse_grid(bad)
