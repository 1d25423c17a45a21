"""Norm values together with the block structure that attains them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

from .vecspace import BlockFamily, SparseVec, is_admissible, restrict


class OracleCapError(ValueError):
    """An exhaustive routine was asked for a support larger than its cap."""


@dataclass(frozen=True)
class Leaf:
    """The sup-norm term attains the value at coordinate ``index``."""

    index: int

    def to_jsonable(self):
        return {"leaf": self.index}


@dataclass(frozen=True)
class Split:
    """A block family attains the value.  ``children`` holds the norm result
    of each block restriction (empty for flat, non-recursive norms)."""

    family: BlockFamily
    children: tuple = ()

    def to_jsonable(self):
        out = {"family": self.family.to_jsonable()}
        if self.children:
            out["children"] = [c.to_jsonable() for c in self.children]
        return out


Witness = Union[Leaf, Split, None]


@dataclass(frozen=True)
class NormResult:
    value: object
    witness: Witness = None
    lower_bound: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __float__(self):
        return float(self.value)

    def to_jsonable(self):
        v = self.value
        out = {"value": str(v) if isinstance(v, Fraction) else float(v)}
        if self.lower_bound:
            out["bound"] = "LOWER_BOUND"
        if self.witness is not None:
            out["witness"] = self.witness.to_jsonable()
        return out


def replay(v: SparseVec, result: NormResult, weight: Callable[[int], object]):
    """Recompute a recursive witness tree bottom-up.

    ``weight(k)`` is the coefficient of a ``k``-block family.  Raises
    ``ValueError`` if any family in the tree is inadmissible or a child does
    not match its block.
    """
    w = result.witness
    if w is None:
        if v:
            raise ValueError("nonzero vector with empty witness")
        return 0
    if isinstance(w, Leaf):
        return abs(v[w.index])
    if not is_admissible(w.family):
        raise ValueError(f"inadmissible family in witness: {w.family.to_jsonable()}")
    if len(w.children) != len(w.family.blocks):
        raise ValueError("witness children do not match its blocks")
    total = 0
    for block, child in zip(w.family.blocks, w.children):
        total = total + replay(restrict(v, block.indices), child, weight)
    return weight(len(w.family.blocks)) * total
