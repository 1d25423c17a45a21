import json
import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import sparse_vecs
from szlenk_lab import szlenk
from szlenk_lab.baernstein import (
    b_ball_radius,
    b_membership_witness,
    b_norm,
    b_norm_exact,
    b_norm_interval,
    interval_gaps,
    mstar_failure_demo,
    partlemma_check,
    perturbation,
    witness_value,
    write_gap_report,
)
from szlenk_lab.results import OracleCapError
from szlenk_lab.vecspace import DomainError, SparseVec, lp_norm


def enumerate_norm(v):
    """Max over every successive family of admissible subsets, by listing them."""
    items = [(i, abs(float(x))) for i, x in v]

    def best(rest):
        top = 0.0
        for size in range(1, len(rest) + 1):
            for E in combinations(rest, size):
                if len(E) > E[0][0]:
                    continue
                later = [p for p in rest if p[0] > E[-1][0]]
                top = max(top, sum(x for _, x in E) ** 2 + best(later))
        return top

    return math.sqrt(best(items))


@given(sparse_vecs(max_size=6, max_index=9))
@settings(max_examples=150)
def test_engines_match_enumeration(v):
    truth = enumerate_norm(v)
    assert b_norm_exact(v).value == pytest.approx(truth, abs=1e-12)
    assert b_norm(v).value == pytest.approx(truth, abs=1e-12)
    assert b_norm_interval(v).value <= truth + 1e-12


@given(sparse_vecs(max_size=12, max_index=24))
@settings(max_examples=100)
def test_topk_equals_branch_and_bound(v):
    assert b_norm(v).value == pytest.approx(b_norm_exact(v).value, abs=1e-12)


@given(sparse_vecs(max_size=14, max_index=30))
def test_witnesses_replay(v):
    for engine in (b_norm, b_norm_exact, b_norm_interval):
        res = engine(v)
        assert witness_value(v, res) == pytest.approx(res.value, abs=1e-12)


@given(sparse_vecs(max_size=10, max_index=20))
def test_between_l2_and_l1(v):
    val = b_norm(v).value
    assert lp_norm(v, 2) - 1e-12 <= val <= lp_norm(v, 1) + 1e-12


@pytest.mark.parametrize("n", range(1, 7))
def test_admissible_block(n):
    assert b_norm_exact(SparseVec.block(n, n)).value == pytest.approx(n, abs=1e-12)


@pytest.mark.parametrize("vec,expected", [
    (SparseVec.block(1, 3), math.sqrt(5)),
    (SparseVec.from_pairs([(1, 1.0), (5, 1.0)]), math.sqrt(2)),
])
def test_examples(vec, expected):
    assert enumerate_norm(vec) == pytest.approx(expected)
    assert b_norm_exact(vec).value == pytest.approx(expected, abs=1e-12)


def test_exact_cap():
    with pytest.raises(OracleCapError):
        b_norm_exact(SparseVec.block(1, 15))


def test_partlemma_sweep():
    rng = np.random.default_rng(3)
    for _ in range(200):
        k = int(rng.integers(1, 11))
        idx = sorted(rng.choice(np.arange(1, 17), size=k, replace=False))
        v = SparseVec.from_pairs([(int(i), float(rng.normal())) for i in idx])
        assert partlemma_check(v, int(rng.integers(0, 17)))
    with pytest.raises(DomainError):
        partlemma_check(SparseVec.unit(1), -1)


def test_interval_strict_gap(tmp_path):
    v = SparseVec.from_pairs([(2, 1.0), (3, 0.01), (4, 1.0)])
    gaps = interval_gaps([v, SparseVec.block(1, 3)])
    assert [g[0] for g in gaps] == [v]
    _, lo, hi = gaps[0]
    assert hi == pytest.approx(2.0) and lo < hi - 1e-3
    path = tmp_path / "gaps.json"
    write_gap_report(gaps, path)
    assert json.loads(path.read_text())[0]["exact"] == pytest.approx(2.0)


def test_ball_radius():
    assert b_ball_radius(1.0) == pytest.approx(math.sqrt(0.75))
    for bad in (0.0, 2.0):
        with pytest.raises(DomainError):
            b_ball_radius(bad)


@pytest.mark.parametrize("eps", [0.5, 1.0, 1.5])
def test_membership_witness(eps):
    x0 = SparseVec.unit(1, b_ball_radius(eps) - 0.01)
    cert = b_membership_witness(x0, eps)
    chk = szlenk.check_certificate(cert)
    assert chk.valid, chk.reasons
    for plus, minus in cert.pairs:
        assert b_norm(plus - minus).value == pytest.approx(cert.meta["delta"])


def test_membership_refusals():
    with pytest.raises(DomainError):
        b_membership_witness(SparseVec.unit(1, 0.9), 1.0)
    with pytest.raises(DomainError):
        b_membership_witness(SparseVec.unit(1, 0.5), 1.0, delta=0.9)
    with pytest.raises(DomainError):
        b_membership_witness(SparseVec.unit(3, 0.5), 1.0, n_start=2)


def test_perturbation_shape():
    p = perturbation(SparseVec.zero(), 3, 1.2, -1)
    assert list(p.indices) == [3, 4, 5]
    assert all(x == pytest.approx(-0.2) for x in p.values)


def test_mstar_failure():
    rep = mstar_failure_demo()
    assert all(v == pytest.approx(math.sqrt(2), abs=1e-12) for _, v in rep.first)
    assert all(v == pytest.approx(math.sqrt(2 + math.sqrt(2)), abs=1e-12) for _, v in rep.second)
    assert rep.verdict == "property (M*) falsified"
