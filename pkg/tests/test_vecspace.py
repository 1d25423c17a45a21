import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rational_vecs, sparse_vecs
from szlenk_lab.vecspace import (
    BlockFamily,
    DomainError,
    FamilyKind,
    IndexSet,
    SparseVec,
    head_proj,
    is_admissible,
    is_successive,
    lp_norm,
    restrict,
    tail_proj,
)


@given(sparse_vecs(), st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, math.inf]))
def test_lp_norm_matches_numpy(v, p):
    dense = np.zeros(13)
    for i, x in v:
        dense[i] = x
    assert lp_norm(v, p) == pytest.approx(np.linalg.norm(dense, p), rel=1e-12, abs=1e-300)


def test_lp_norm_examples():
    e12 = SparseVec.from_pairs([(1, 1.0), (2, 1.0)])
    assert lp_norm(e12, 1) == 2
    assert lp_norm(e12, math.inf) == 1
    assert lp_norm(SparseVec.from_pairs([(1, 3.0), (2, 4.0)]), 2) == 5
    with pytest.raises(DomainError):
        lp_norm(e12, 0.5)


def test_restrict_examples():
    v = SparseVec.block(1, 3)
    assert restrict(v, [2]) == SparseVec.unit(2)
    assert restrict(SparseVec.unit(1), [5]) == SparseVec.zero()
    w = SparseVec.from_pairs([(1, 2.0), (4, 3.0)])
    assert restrict(w, IndexSet.of(1, 4)) == w


def test_projection_examples():
    v = SparseVec.from_pairs([(1, 1.0), (5, 1.0)])
    assert head_proj(v, 3) == SparseVec.unit(1)
    assert tail_proj(v, 3) == SparseVec.unit(5)
    assert head_proj(v, 0) == SparseVec.zero() and tail_proj(v, 0) == v
    assert head_proj(v, 5) == v and tail_proj(v, 9) == SparseVec.zero()
    with pytest.raises(DomainError):
        head_proj(v, -1)


def test_admissibility_examples():
    assert is_admissible(BlockFamily.of(FamilyKind.TSIRELSON, [2], [3]))
    assert not is_admissible(BlockFamily.of(FamilyKind.TSIRELSON, [1], [2]))
    assert not is_admissible(BlockFamily.of(FamilyKind.BAERNSTEIN, [1, 2]))
    assert is_admissible(BlockFamily.of(FamilyKind.BAERNSTEIN, [4, 5, 6, 7]))
    assert is_admissible(BlockFamily.of(FamilyKind.SCHLUMPRECHT, [1], [2], [3], [4]))
    assert not is_successive([IndexSet.of(1, 3), IndexSet.of(2)])


def test_sparsevec_invariants():
    with pytest.raises(ValueError):
        SparseVec((2, 1), (1.0, 1.0))
    with pytest.raises(ValueError):
        SparseVec((1,), (0.0,))
    v = SparseVec.from_pairs([(3, 1.0), (1, 2.0), (3, -1.0)])
    assert v.support() == [1] and v.min_support == 1 and v.max_support == 1
    assert SparseVec.zero().support() == []
    assert IndexSet.of(3, 1, 3).indices == (1, 3)


@given(sparse_vecs())
def test_json_round_trip(v):
    assert SparseVec.from_json(v.to_json()) == v


@given(rational_vecs())
def test_json_round_trip_exact(v):
    assert SparseVec.from_json(v.to_json(), exact=True) == v


@given(sparse_vecs(), st.lists(st.integers(1, 12)), st.floats(-5, 5, allow_nan=False))
def test_restrict_properties(v, E, c):
    once = restrict(v, E)
    assert restrict(once, E) == once
    assert restrict(v * c, E) == restrict(v, E) * c
    for p in (1, 2, math.inf):
        assert lp_norm(once, p) <= lp_norm(v, p)


@given(sparse_vecs(min_size=1))
def test_lp_monotone_in_p(v):
    ps = [1, 1.5, 2, 3, 7, math.inf]
    vals = [lp_norm(v, p) for p in ps]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


@given(sparse_vecs(), st.integers(0, 14))
def test_head_plus_tail_is_bit_exact(v, n):
    h, t = head_proj(v, n), tail_proj(v, n)
    assert h + t == v
    for i, x in v:
        assert (h[i] if i <= n else t[i]) == x


def test_exact_values_preserved():
    v = SparseVec.from_pairs([(1, Fraction(1, 3)), (2, Fraction(2, 3))])
    assert v.is_exact
    assert (v + v)[1] == Fraction(2, 3)
    assert lp_norm(v, 1) == 1
