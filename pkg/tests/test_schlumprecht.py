import math
from functools import lru_cache
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sparse_vecs
from szlenk_lab import szlenk
from szlenk_lab.results import OracleCapError
from szlenk_lab.schlumprecht import (
    LOG2_3,
    phi,
    s_membership_witness,
    s_norm,
    s_norm_oracle,
    s_r_upper_bound,
    s_R_curve,
    s_tailbound_check,
    tail_margins,
    witness_value,
)
from szlenk_lab.vecspace import DomainError, SparseVec, lp_norm, restrict


def brute_force(v):
    """Sup over every successive family of at least two subsets, recursively."""

    @lru_cache(maxsize=None)
    def norm(S):
        best = max(abs(x) for _, x in S)
        for fam in families(S):
            if len(fam) >= 2:
                best = max(best, sum(norm(E) for E in fam) / math.log2(len(fam) + 1))
        return best

    def families(S):
        for size in range(1, len(S) + 1):
            for E in combinations(S, size):
                rest = tuple(p for p in S if p[0] > E[-1][0])
                yield (E,)
                if rest:
                    for tail in families(rest):
                        yield (E,) + tail

    items = tuple((i, float(x)) for i, x in v)
    return norm(items) if items else 0.0


@given(sparse_vecs(max_size=5, max_index=8))
@settings(max_examples=120)
def test_dp_equals_definition_brute_force(v):
    assert s_norm(v).value == pytest.approx(brute_force(v), abs=1e-12)


@given(sparse_vecs(max_size=8))
@settings(max_examples=150)
def test_dp_equals_oracle(v):
    assert s_norm(v).value == pytest.approx(s_norm_oracle(v), abs=1e-12)


def test_phi_values():
    assert [phi(n) for n in (1, 3, 7)] == [1.0, 2.0, 3.0]
    with pytest.raises(DomainError):
        phi(0)


@pytest.mark.parametrize("n", range(1, 26))
def test_flat_vectors(n):
    assert s_norm(SparseVec.block(1, n)).value == pytest.approx(n / math.log2(n + 1), abs=1e-12)


def test_two_units():
    assert s_norm(SparseVec.from_pairs([(1, 1.0), (2, 1.0)])).value == pytest.approx(2 / LOG2_3)


def test_oracle_cap():
    with pytest.raises(OracleCapError):
        s_norm_oracle(SparseVec.block(1, 10))


@given(sparse_vecs(max_size=12, max_index=20))
def test_witness_replays(v):
    res = s_norm(v)
    assert witness_value(v, res) == pytest.approx(res.value, abs=1e-12)


@given(sparse_vecs(max_size=8), st.integers(1, 5))
def test_subsymmetric_under_spreading(v, shift):
    spread = SparseVec.from_dict({i * 2 + shift: x for i, x in v})
    assert s_norm(spread).value == pytest.approx(s_norm(v).value, abs=1e-12)


@given(sparse_vecs(max_size=8), sparse_vecs(max_size=8), st.lists(st.integers(1, 12)))
def test_norm_axioms(u, v, E):
    n = lambda w: s_norm(w, witness=False).value
    assert n(u + v) <= n(u) + n(v) + 1e-12
    assert n(u * -2.5) == pytest.approx(2.5 * n(u))
    assert lp_norm(u, np.inf) <= n(u) + 1e-12 <= lp_norm(u, 1) + 2e-12
    assert n(restrict(u, E)) <= n(u) + 1e-12


def test_R_curve():
    assert s_R_curve(0.5) == 1.0
    assert s_R_curve(1.5) == pytest.approx(LOG2_3 - 0.75)
    with pytest.raises(DomainError):
        s_R_curve(2.0)


@pytest.mark.parametrize("eps", [0.01, 0.3, 1.0, 1.7])
def test_r_upper_bound_against_numpy_scan(eps):
    n = np.arange(1, 200_001, dtype=float)
    terms = (np.log2(n + 2) - eps / 2) / np.log2(n + 1)
    value, arg = s_r_upper_bound(eps)
    assert value == pytest.approx(terms.min(), abs=1e-12)
    assert arg == int(n[terms.argmin()])
    assert 1 - eps / 2 <= value <= s_R_curve(eps)


def test_r_upper_bound_eps_one():
    value, arg = s_r_upper_bound(1.0)
    assert arg == 7
    assert value == pytest.approx((math.log2(9) - 0.5) / 3)


@pytest.mark.parametrize("eps", [1.3, 1.5, 1.8])
def test_membership_at_R(eps):
    r = LOG2_3 - eps / 2 - 0.01
    chk = szlenk.check_certificate(s_membership_witness(SparseVec.unit(1, r), eps))
    assert chk.valid, chk.reasons


def test_membership_flat_point():
    x0 = SparseVec.block(1, 3, 0.2)
    assert szlenk.validate_certificate(s_membership_witness(x0, 0.8))


def test_membership_refusals():
    with pytest.raises(DomainError):
        s_membership_witness(SparseVec.unit(1, 1.0), 1.5)
    with pytest.raises(DomainError):
        s_membership_witness(SparseVec.unit(3, 0.5), 1.0)


@pytest.mark.parametrize("eps,eps_prime", [(1.3, 1.25), (1.5, 1.3), (1.8, 1.5)])
def test_tail_bound(eps, eps_prime):
    delta = 0.9 * (eps - eps_prime) / 6
    rng = np.random.default_rng(11)
    margins = tail_margins(SparseVec.unit(1), eps, eps_prime, 1, delta, 50, rng)
    assert min(margins) >= -1e-12
    assert s_tailbound_check(SparseVec.unit(1), eps, eps_prime, 1, delta, 20)


@pytest.mark.parametrize("args,name", [
    ((SparseVec.unit(1, 0.5), 1.5, 1.3, 1, 0.01), "||x0|| <= 1"),
    ((SparseVec.unit(1), 1.5, 1.6, 1, 0.01), "eps' < eps"),
    ((SparseVec.unit(1), 1.5, 1.3, 1, 0.5), "delta"),
])
def test_tail_bound_preconditions(args, name):
    with pytest.raises(DomainError, match="precondition violated") as info:
        tail_margins(*args, samples=1, rng=np.random.default_rng(0))
    assert name in str(info.value)
