"""Finitely supported sequences and the block-family combinatorics shared by
all norm engines.

Indices are 1-based. Values are floats by default; ``fractions.Fraction``
values are accepted and preserved, which is what the exact Tsirelson mode
relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Real
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


@dataclass(frozen=True)
class SparseVec:
    """Immutable finitely supported real sequence.

    Stored as two parallel tuples with strictly increasing indices and
    nonzero values.  Use :meth:`from_pairs` or :meth:`from_dict` to build one
    from unsorted or zero-containing data.
    """

    indices: tuple[int, ...] = ()
    values: tuple = ()

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        prev = 0
        for i, x in zip(self.indices, self.values):
            if not isinstance(i, int) or i <= prev:
                raise ValueError("indices must be strictly increasing positive integers")
            if x == 0:
                raise ValueError("stored values must be nonzero")
            prev = i

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence]) -> "SparseVec":
        acc: dict[int, object] = {}
        for i, x in pairs:
            i = int(i)
            if i < 1:
                raise DomainError(f"index {i} is not a positive integer")
            acc[i] = acc.get(i, 0) + x
        return cls.from_dict(acc)

    @classmethod
    def from_dict(cls, d: Mapping[int, object]) -> "SparseVec":
        items = sorted((int(i), x) for i, x in d.items() if x != 0)
        return cls(tuple(i for i, _ in items), tuple(x for _, x in items))

    @classmethod
    def unit(cls, i: int, value=1.0) -> "SparseVec":
        return cls.from_dict({i: value})

    @classmethod
    def block(cls, start: int, length: int, value=1.0) -> "SparseVec":
        """``value * (e_start + ... + e_{start+length-1})``."""
        return cls.from_dict({i: value for i in range(start, start + length)})

    @classmethod
    def zero(cls) -> "SparseVec":
        return cls()

    def support(self) -> list[int]:
        return list(self.indices)

    @property
    def min_support(self) -> int:
        return self.indices[0] if self.indices else 0

    @property
    def max_support(self) -> int:
        return self.indices[-1] if self.indices else 0

    def __len__(self) -> int:
        return len(self.indices)

    def __bool__(self) -> bool:
        return bool(self.indices)

    def __iter__(self) -> Iterator[tuple[int, object]]:
        return iter(zip(self.indices, self.values))

    def __getitem__(self, i: int):
        lo, hi = 0, len(self.indices)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.indices[mid] < i:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.indices) and self.indices[lo] == i:
            return self.values[lo]
        return 0

    def as_dict(self) -> dict[int, object]:
        return dict(zip(self.indices, self.values))

    def _combine(self, other: "SparseVec", sign) -> "SparseVec":
        acc = self.as_dict()
        for i, x in other:
            acc[i] = acc.get(i, 0) + sign * x
        return SparseVec.from_dict(acc)

    def __add__(self, other: "SparseVec") -> "SparseVec":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseVec") -> "SparseVec":
        return self._combine(other, -1)

    def __mul__(self, c) -> "SparseVec":
        if not isinstance(c, Real):
            return NotImplemented
        return SparseVec.from_dict({i: c * x for i, x in self})

    __rmul__ = __mul__

    def __neg__(self) -> "SparseVec":
        return self * -1

    def __truediv__(self, c) -> "SparseVec":
        return SparseVec.from_dict({i: x / c for i, x in self})

    def abs(self) -> "SparseVec":
        return SparseVec(self.indices, tuple(abs(x) for x in self.values))

    def shift(self, offset: int) -> "SparseVec":
        """Move every coordinate ``offset`` places to the right."""
        return SparseVec(tuple(i + offset for i in self.indices), self.values)

    def to_float(self) -> "SparseVec":
        return SparseVec(self.indices, tuple(float(x) for x in self.values))

    def to_fraction(self) -> "SparseVec":
        return SparseVec(self.indices, tuple(Fraction(x) for x in self.values))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in self.values)

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable())

    def to_jsonable(self) -> list:
        return [[i, _json_number(x)] for i, x in self]

    @classmethod
    def from_json(cls, text: str, exact: bool = False) -> "SparseVec":
        return cls.from_jsonable(json.loads(text), exact=exact)

    @classmethod
    def from_jsonable(cls, data, exact: bool = False) -> "SparseVec":
        conv = Fraction if exact else float
        pairs = []
        for item in data:
            if len(item) != 2:
                raise ValueError(f"expected [index, value] pair, got {item!r}")
            pairs.append((int(item[0]), conv(item[1])))
        return cls.from_pairs(pairs)

    def __repr__(self) -> str:
        body = " + ".join(f"{x}*e{i}" for i, x in self)
        return f"SparseVec({body or '0'})"


def _json_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


@dataclass(frozen=True)
class IndexSet:
    """Nonempty finite set of positive integers, kept sorted."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(self.indices)))
        if not idx:
            raise ValueError("IndexSet must be nonempty")
        if idx[0] < 1:
            raise ValueError("indices must be positive")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, *indices: int) -> "IndexSet":
        return cls(tuple(indices))

    @classmethod
    def interval(cls, lo: int, hi: int) -> "IndexSet":
        return cls(tuple(range(lo, hi + 1)))

    @property
    def min(self) -> int:
        return self.indices[0]

    @property
    def max(self) -> int:
        return self.indices[-1]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices


class FamilyKind(str, Enum):
    TSIRELSON = "tsirelson"
    SCHLUMPRECHT = "schlumprecht"
    BAERNSTEIN = "baernstein"


@dataclass(frozen=True)
class BlockFamily:
    """Ordered family of index sets ``E_1 < ... < E_k`` tagged with the
    admissibility rule it should satisfy."""

    blocks: tuple[IndexSet, ...]
    kind: FamilyKind

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "kind", FamilyKind(self.kind))

    @classmethod
    def of(cls, kind, *blocks: Iterable[int]) -> "BlockFamily":
        return cls(tuple(IndexSet(tuple(b)) for b in blocks), kind)

    def __len__(self) -> int:
        return len(self.blocks)

    def to_jsonable(self) -> dict:
        return {"kind": self.kind.value, "blocks": [list(b.indices) for b in self.blocks]}


def is_successive(blocks: Sequence[IndexSet]) -> bool:
    return all(a.max < b.min for a, b in zip(blocks, blocks[1:]))


def is_admissible(fam: BlockFamily) -> bool:
    if not is_successive(fam.blocks):
        return False
    if fam.kind is FamilyKind.TSIRELSON:
        return not fam.blocks or len(fam.blocks) <= fam.blocks[0].min
    if fam.kind is FamilyKind.BAERNSTEIN:
        return all(len(b) <= b.min for b in fam.blocks)
    return True


def lp_norm(v: SparseVec, p: float = 2.0) -> float:
    """Classical l_p norm; ``p`` may be ``math.inf``."""
    if not (p >= 1):
        raise DomainError(f"l_p norm needs p >= 1, got {p}")
    if not v:
        return 0.0
    if math.isinf(p):
        return max(abs(x) for x in v.values)
    if p == 1:
        return sum(abs(x) for x in v.values)
    vals = [abs(float(x)) for x in v.values]
    scale = max(vals)
    return scale * math.fsum((x / scale) ** p for x in vals) ** (1.0 / p)


def restrict(v: SparseVec, E: Iterable[int]) -> SparseVec:
    keep = set(E)
    pairs = [(i, x) for i, x in v if i in keep]
    return SparseVec(tuple(i for i, _ in pairs), tuple(x for _, x in pairs))


def head_proj(v: SparseVec, n: int) -> SparseVec:
    if n < 0:
        raise DomainError("projection rank must be >= 0")
    pairs = [(i, x) for i, x in v if i <= n]
    return SparseVec(tuple(i for i, _ in pairs), tuple(x for _, x in pairs))


def tail_proj(v: SparseVec, n: int) -> SparseVec:
    if n < 0:
        raise DomainError("projection rank must be >= 0")
    pairs = [(i, x) for i, x in v if i > n]
    return SparseVec(tuple(i for i, _ in pairs), tuple(x for _, x in pairs))
